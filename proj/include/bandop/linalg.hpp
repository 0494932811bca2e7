#pragma once

// Dense complex linear algebra: the kernel every operator computation
// eventually reduces to. Matrices are small (a few hundred rows at most), so
// everything here is plain row-major storage and a one-sided Jacobi SVD
// (matrices beyond 64 columns go to LAPACK's zgesvd).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bandop {

using cplx = std::complex<double>;
using Vector = std::vector<cplx>;

/// Dense complex matrix in row-major order.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    /// Throws std::invalid_argument if the entry count is wrong or an entry is not finite.
    Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static Matrix identity(std::size_t n);
    static Matrix scalar(std::size_t n, cplx value);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const noexcept { return data_; }
    std::span<cplx> entries() noexcept { return data_; }

    Matrix adjoint() const;
    Matrix transpose() const;
    double frobenius_norm() const;
    bool is_zero() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(cplx factor);

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, cplx factor);
Matrix operator*(cplx factor, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const cplx> x);

/// Block-structured alias used where a matrix plays the role of an operator entry.
using BlockMatrix = Matrix;

double norm2(std::span<const cplx> x);
cplx inner(std::span<const cplx> x, std::span<const cplx> y);  // sum conj(x_i) y_i

/// Thin singular value decomposition M = U diag(sigma) V*.
///
/// With k = min(rows, cols), U is rows x k and V is cols x k, both with
/// orthonormal columns; singular values are sorted non-increasing.
struct SvdResult {
    std::vector<double> singular_values;
    Matrix left_vectors;
    Matrix right_vectors;
    int sweeps = 0;
};

struct JacobiOptions {
    int max_sweeps = 60;
    double tolerance = 1e-13;  // relative off-diagonal threshold
};

/// Thin SVD, one-sided (Hestenes) Jacobi up to 64 columns and zgesvd beyond
/// (sweeps = 0 then). Throws ConvergenceError when the sweep cap is hit,
/// std::invalid_argument for non-finite input.
SvdResult svd(const Matrix& m, const JacobiOptions& options = {});

/// Singular values only (no vector accumulation), sorted non-increasing.
std::vector<double> singular_values(const Matrix& m, const JacobiOptions& options = {});

double sigma_min(const Matrix& m);
double sigma_max(const Matrix& m);

/// Smallest and largest singular value; closed forms for 1x1 and 2x2.
struct SigmaExtremes {
    double min;
    double max;
};
SigmaExtremes sigma_extremes(const Matrix& m);

/// Relative threshold under which solve() reports a singular matrix.
inline constexpr double kSingularityThreshold = 1e-12;

/// Solves M x = b for square M. Throws SingularMatrixError when
/// sigma_min(M) < kSingularityThreshold * sigma_max(M).
Vector solve(const Matrix& m, std::span<const cplx> b);

/// Eigenvalues of a Hermitian matrix (lower triangle referenced), ascending.
std::vector<double> hermitian_eigenvalues(const Matrix& m);

/// LU-based inverse. Throws SingularMatrixError only for an exactly zero
/// pivot; callers judge conditioning themselves.
Matrix inverse(const Matrix& m);

enum class Exponent { one, two, infinity };

/// Induced matrix norm on (C^n, ||.||_p) for p in {1, 2, inf}.
double induced_p_norm(const Matrix& m, Exponent p);

double vector_p_norm(std::span<const cplx> x, Exponent p);

}  // namespace bandop
