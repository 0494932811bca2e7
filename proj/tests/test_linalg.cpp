#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bandop/errors.hpp"
#include "bandop/linalg.hpp"
#include "oracles.hpp"

using namespace bandop;

namespace {

Matrix reconstruct(const SvdResult& s) {
    Matrix us = s.left_vectors;
    for (std::size_t j = 0; j < s.singular_values.size(); ++j)
        for (std::size_t i = 0; i < us.rows(); ++i) us(i, j) *= s.singular_values[j];
    return oracle::naive_product(us, oracle::naive_adjoint(s.right_vectors));
}

double orthonormality_defect(const Matrix& q) {
    const Matrix g = oracle::naive_product(oracle::naive_adjoint(q), q);
    return oracle::max_abs_diff(g, Matrix::identity(g.rows()));
}

double frob(const Matrix& m) {
    double s = 0;
    for (auto z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("svd reconstructs and has orthonormal factors") {
    std::mt19937_64 rng(1);
    const std::pair<std::size_t, std::size_t> shapes[] = {{1, 1}, {3, 3}, {7, 4}, {4, 7}, {12, 12},
                                                           {40, 33}, {70, 66}, {66, 90}, {130, 100}};
    for (auto [r, c] : shapes) {
        CAPTURE(r);
        CAPTURE(c);
        const Matrix m = oracle::random_matrix(rng, r, c);
        const SvdResult s = svd(m);
        const double scale = frob(m);
        CHECK(oracle::max_abs_diff(reconstruct(s), m) <= 1e-10 * scale);
        CHECK(orthonormality_defect(s.left_vectors) <= 1e-10);
        CHECK(orthonormality_defect(s.right_vectors) <= 1e-10);
        for (std::size_t k = 1; k < s.singular_values.size(); ++k)
            CHECK(s.singular_values[k - 1] >= s.singular_values[k]);
    }
}

TEST_CASE("singular values agree with power iteration up to 6x6") {
    std::mt19937_64 rng(2);
    for (std::size_t r = 1; r <= 6; ++r)
        for (std::size_t c = 1; c <= 6; ++c) {
            const Matrix m = oracle::random_matrix(rng, r, c);
            const auto mine = singular_values(m);
            const auto ref = oracle::power_singular_values(m);
            REQUIRE(mine.size() == ref.size());
            for (std::size_t k = 0; k < ref.size(); ++k) {
                CAPTURE(r);
                CAPTURE(c);
                CHECK(std::abs(mine[k] - ref[k]) <= 1e-8);
            }
        }
}

TEST_CASE("singular_values matches the vector-accumulating svd on both size regimes") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {5, 30, 64, 65, 120}) {
        const Matrix m = oracle::random_matrix(rng, n + 3, n);
        const auto a = singular_values(m);
        const auto b = svd(m).singular_values;
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-11 * a[0]);
    }
}

TEST_CASE("rank-deficient and zero matrices") {
    Matrix z(4, 3);
    const SvdResult s = svd(z);
    for (double v : s.singular_values) CHECK(v == 0.0);
    CHECK(orthonormality_defect(s.left_vectors) <= 1e-12);

    // rank one: x y^*
    Matrix r(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) r(i, j) = cplx(double(i + 1), 0) * cplx(1, double(j));
    const auto sv = singular_values(r);
    CHECK(sv[1] <= 1e-12 * sv[0]);
    CHECK(sigma_min(r) <= 1e-12 * sv[0]);
}

TEST_CASE("sigma_extremes closed forms match the svd") {
    std::mt19937_64 rng(4);
    for (std::size_t n : {1, 2, 3}) {
        for (int t = 0; t < 20; ++t) {
            const Matrix m = oracle::random_matrix(rng, n, n);
            const auto e = sigma_extremes(m);
            const auto sv = oracle::power_singular_values(m);
            CHECK(std::abs(e.max - sv.front()) <= 1e-9);
            CHECK(std::abs(e.min - sv.back()) <= 1e-9);
        }
    }
}

TEST_CASE("solve and singularity detection") {
    std::mt19937_64 rng(5);
    const Matrix m = oracle::random_matrix(rng, 6, 6);
    Vector b(6);
    for (std::size_t k = 0; k < 6; ++k) b[k] = cplx(double(k), 1.0);
    const Vector x = solve(m, b);
    const Vector mx = m * x;
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(mx[k] - b[k]) <= 1e-10);

    Matrix s(2, 2, {1.0, 2.0, 2.0, 4.0});
    CHECK_THROWS_AS(solve(s, Vector{1.0, 1.0}), SingularMatrixError);
}

TEST_CASE("induced norms") {
    // row sums 3 and 7, column sums 4 and 6
    const Matrix m(2, 2, {1.0, -2.0, cplx(0, 3), 4.0});
    CHECK(induced_p_norm(m, Exponent::infinity) == doctest::Approx(7.0));
    CHECK(induced_p_norm(m, Exponent::one) == doctest::Approx(6.0));
    CHECK(induced_p_norm(m, Exponent::two) == doctest::Approx(oracle::power_singular_values(m)[0]).epsilon(1e-12));
    const Vector v{3.0, cplx(0, -4)};
    CHECK(vector_p_norm(v, Exponent::two) == doctest::Approx(5.0));
    CHECK(vector_p_norm(v, Exponent::one) == doctest::Approx(7.0));
    CHECK(vector_p_norm(v, Exponent::infinity) == doctest::Approx(4.0));
}

TEST_CASE("non-finite input is rejected") {
    Matrix m(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(m), std::invalid_argument);
    CHECK_THROWS_AS(Matrix(1, 1, {cplx(INFINITY, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(Matrix(2, 2, {1.0}), std::invalid_argument);
}
