#pragma once

// Independent reference computations shared by the tests. Nothing here calls
// the library's SVD, norms or symbol code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bandop/linalg.hpp"

namespace oracle {

using bandop::cplx;
using bandop::Matrix;

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
    return d;
}

// Plain triple loop, kept separate from the library's product.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            cplx s{};
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

inline Matrix naive_adjoint(const Matrix& a) {
    Matrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
    return r;
}

// Singular values by power iteration with deflation on the Gram matrix M* M,
// finished with a Rayleigh quotient. Adequate for small well-separated cases.
inline std::vector<double> power_singular_values(const Matrix& m, int iterations = 20000) {
    Matrix g = naive_product(naive_adjoint(m), m);
    const std::size_t n = g.rows();
    std::vector<double> out;
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < std::min(m.rows(), m.cols()); ++k) {
        std::vector<cplx> v(n);
        for (auto& z : v) z = cplx(nd(rng), nd(rng));
        double lambda = 0;
        for (int it = 0; it < iterations; ++it) {
            std::vector<cplx> w(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) w[i] += g(i, j) * v[j];
            double nrm = 0;
            for (auto z : w) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm == 0) break;
            for (auto& z : w) z /= nrm;
            v = w;
            lambda = nrm;
        }
        // Rayleigh quotient of the converged vector
        cplx rq{};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rq += std::conj(v[i]) * g(i, j) * v[j];
        lambda = std::max(rq.real(), 0.0);
        out.push_back(std::sqrt(lambda));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g(i, j) -= lambda * v[i] * std::conj(v[j]);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace oracle
