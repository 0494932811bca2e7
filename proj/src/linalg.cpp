#include "bandop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <lapacke.h>
#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw std::invalid_argument(fmt::format(
            "matrix of shape {}x{} needs {} entries, got {}", rows, cols, rows * cols,
            data_.size()));
    }
    if (!all_finite()) throw std::invalid_argument("matrix entries must be finite");
}

Matrix Matrix::identity(std::size_t n) { return scalar(n, 1.0); }

Matrix Matrix::scalar(std::size_t n, cplx value) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

bool Matrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](cplx z) { return z == cplx{}; });
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](cplx z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("matrix sum: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("matrix difference: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx factor) {
    for (auto& z : data_) z *= factor;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, cplx factor) { return a *= factor; }
Matrix operator*(cplx factor, Matrix a) { return a *= factor; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: shape mismatch");
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Vector operator*(const Matrix& a, std::span<const cplx> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product: shape mismatch");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double norm2(std::span<const cplx> x) {
    // Scaled accumulation so that tiny and huge entries do not under/overflow.
    double scale = 0.0;
    double ssq = 1.0;
    for (cplx z : x) {
        for (double v : {z.real(), z.imag()}) {
            if (v == 0.0) continue;
            const double a = std::abs(v);
            if (scale < a) {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    return scale * std::sqrt(ssq);
}

cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
    cplx s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

namespace {

// Column-major working copy so that column operations are contiguous.
struct Columns {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> data;

    cplx* col(std::size_t j) { return data.data() + j * rows; }
    const cplx* col(std::size_t j) const { return data.data() + j * rows; }
};

Columns to_columns(const Matrix& m, bool conjugate_transpose) {
    Columns c;
    if (!conjugate_transpose) {
        c.rows = m.rows();
        c.cols = m.cols();
        c.data.resize(c.rows * c.cols);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) c.data[j * c.rows + i] = m(i, j);
    } else {
        c.rows = m.cols();
        c.cols = m.rows();
        c.data.resize(c.rows * c.cols);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                c.data[i * c.rows + j] = std::conj(m(i, j));
    }
    return c;
}

double col_sq_norm(const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
    return s;
}

// Spelled out in reals: std::complex multiplication goes through the
// NaN-aware library routine and dominates the sweep otherwise.
cplx col_inner(const cplx* x, const cplx* y, std::size_t n) {
    const double* a = reinterpret_cast<const double*>(x);
    const double* b = reinterpret_cast<const double*>(y);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < 2 * n; i += 2) {
        re += a[i] * b[i] + a[i + 1] * b[i + 1];
        im += a[i] * b[i + 1] - a[i + 1] * b[i];
    }
    return {re, im};
}

// Rotates columns (x, y) so that they become orthogonal. gamma = <x, y>.
void rotate_pair(cplx* x, cplx* y, std::size_t n, double c, double s, cplx phase) {
    double* a = reinterpret_cast<double*>(x);
    double* b = reinterpret_cast<double*>(y);
    const double pr = phase.real(), pi = phase.imag();
    for (std::size_t i = 0; i < 2 * n; i += 2) {
        const double xr = a[i], xi = a[i + 1];
        const double yr = b[i] * pr - b[i + 1] * pi;
        const double yi = b[i] * pi + b[i + 1] * pr;
        a[i] = c * xr - s * yr;
        a[i + 1] = c * xi - s * yi;
        b[i] = s * xr + c * yr;
        b[i + 1] = s * xi + c * yi;
    }
}

struct JacobiOutcome {
    Columns g;
    Columns v;  // empty when vectors were not requested
    int sweeps = 0;
};

// Hestenes iteration on the columns of g (rows >= cols assumed).
JacobiOutcome hestenes(Columns g, bool want_v, const JacobiOptions& opt) {
    const std::size_t n = g.cols;
    const std::size_t m = g.rows;
    Columns v;
    if (want_v) {
        v.rows = n;
        v.cols = n;
        v.data.assign(n * n, cplx{});
        for (std::size_t j = 0; j < n; ++j) v.data[j * n + j] = 1.0;
    }
    std::vector<double> sq(n);
    for (std::size_t j = 0; j < n; ++j) sq[j] = col_sq_norm(g.col(j), m);

    int sweep = 0;
    double worst = 0.0;
    for (; sweep < opt.max_sweeps; ++sweep) {
        worst = 0.0;
        bool rotated = false;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const double alpha = sq[j];
                const double beta = sq[k];
                if (alpha == 0.0 || beta == 0.0) continue;
                const cplx gamma = col_inner(g.col(j), g.col(k), m);
                const double agamma = std::abs(gamma);
                const double rel = agamma / std::sqrt(alpha * beta);
                worst = std::max(worst, rel);
                if (rel <= opt.tolerance) continue;
                rotated = true;
                // Remove the phase of gamma, then apply the real Jacobi rotation.
                const cplx phase = std::conj(gamma) / agamma;
                const double zeta = (beta - alpha) / (2.0 * agamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate_pair(g.col(j), g.col(k), m, c, s, phase);
                if (want_v) rotate_pair(v.col(j), v.col(k), n, c, s, phase);
                sq[j] = col_sq_norm(g.col(j), m);
                sq[k] = col_sq_norm(g.col(k), m);
            }
        }
        if (!rotated) break;
    }
    if (sweep == opt.max_sweeps) {
        throw ConvergenceError(
            fmt::format("Jacobi SVD did not converge after {} sweeps (residual {:.3e})",
                        opt.max_sweeps, worst),
            worst);
    }
    return {std::move(g), std::move(v), sweep + 1};
}

void check_finite(const Matrix& m) {
    if (!m.all_finite()) throw std::invalid_argument("svd: matrix has non-finite entries");
}

// Completes the zero columns of u (rows x k) to an orthonormal set.
void complete_orthonormal(Columns& u, const std::vector<bool>& missing) {
    const std::size_t m = u.rows;
    std::size_t probe = 0;
    for (std::size_t j = 0; j < u.cols; ++j) {
        if (!missing[j]) continue;
        for (; probe < m; ++probe) {
            std::vector<cplx> e(m, cplx{});
            e[probe] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t l = 0; l < u.cols; ++l) {
                    if (l == j || (missing[l] && l > j)) continue;
                    const cplx* ul = u.col(l);
                    const cplx proj = col_inner(ul, e.data(), m);
                    for (std::size_t i = 0; i < m; ++i) e[i] -= proj * ul[i];
                }
            }
            const double nrm = std::sqrt(col_sq_norm(e.data(), m));
            if (nrm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) u.col(j)[i] = e[i] / nrm;
                ++probe;
                break;
            }
        }
    }
}

// Householder QR with column pivoting, returned as the columns of R^H.
// Same singular values as g; Jacobi on R^H needs far fewer sweeps.
Columns qr_precondition(Columns g) {
    const std::size_t m = g.rows;
    const std::size_t n = g.cols;
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = col_sq_norm(g.col(j), m);
    std::vector<cplx> v(m);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t p = static_cast<std::size_t>(
            std::max_element(norms.begin() + static_cast<std::ptrdiff_t>(k), norms.end()) - norms.begin());
        if (p != k) {
            std::swap_ranges(g.col(k), g.col(k) + m, g.col(p));
            std::swap(norms[k], norms[p]);
        }
        cplx* x = g.col(k);
        const double xn = std::sqrt(col_sq_norm(x + k, m - k));
        if (xn == 0.0) continue;
        const cplx phase = std::abs(x[k]) > 0.0 ? x[k] / std::abs(x[k]) : cplx(1.0);
        const cplx alpha = -phase * xn;
        for (std::size_t i = k; i < m; ++i) v[i] = x[i];
        v[k] -= alpha;
        const double vn = col_sq_norm(v.data() + k, m - k);
        x[k] = alpha;
        for (std::size_t i = k + 1; i < m; ++i) x[i] = 0.0;
        if (vn == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) {
            cplx* y = g.col(j);
            const cplx f = 2.0 * col_inner(v.data() + k, y + k, m - k) / vn;
            for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i];
            norms[j] = col_sq_norm(y + k + 1, m - k - 1);
        }
    }
    Columns r;
    r.rows = n;
    r.cols = n;
    r.data.assign(n * n, cplx{});
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i) r.data[i * n + j] = std::conj(g.col(j)[i]);
    return r;
}

// Above this size LAPACK's QR-iteration SVD (zgesvd) is an order of
// magnitude faster than Jacobi; the two agree to roughly eps * ||M||.
constexpr std::size_t kJacobiLimit = 64;

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

SvdResult svd_lapack(const Matrix& m, bool want_vectors) {
    std::vector<cplx> a(m.entries().begin(), m.entries().end());
    const auto r = static_cast<lapack_int>(m.rows());
    const auto c = static_cast<lapack_int>(m.cols());
    const lapack_int k = std::min(r, c);
    const char job = want_vectors ? 'S' : 'N';
    SvdResult out;
    out.singular_values.resize(static_cast<std::size_t>(k));
    std::vector<double> superb(static_cast<std::size_t>(k));
    std::vector<cplx> u(want_vectors ? static_cast<std::size_t>(r * k) : 1);
    std::vector<cplx> vt(want_vectors ? static_cast<std::size_t>(k * c) : 1);
    const lapack_int info =
        LAPACKE_zgesvd(LAPACK_ROW_MAJOR, job, job, r, c, lp(a.data()), c, out.singular_values.data(), lp(u.data()),
                       want_vectors ? k : 1, lp(vt.data()), want_vectors ? c : 1, superb.data());
    if (info != 0)
        throw ConvergenceError(fmt::format("zgesvd failed (info = {})", info), info > 0 ? superb[0] : 0.0);
    if (want_vectors) {
        const auto kk = static_cast<std::size_t>(k);
        out.left_vectors = Matrix(m.rows(), kk, std::move(u));
        out.right_vectors = Matrix(m.cols(), kk);
        for (std::size_t i = 0; i < kk; ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) out.right_vectors(j, i) = std::conj(vt[i * m.cols() + j]);
    }
    return out;
}

}  // namespace

SvdResult svd(const Matrix& m, const JacobiOptions& options) {
    check_finite(m);
    SvdResult result;
    if (m.rows() == 0 || m.cols() == 0) return result;
    if (std::min(m.rows(), m.cols()) > kJacobiLimit) return svd_lapack(m, true);
    const bool wide = m.rows() < m.cols();
    auto out = hestenes(to_columns(m, wide), true, options);
    const std::size_t k = out.g.cols;
    const std::size_t rows = out.g.rows;

    std::vector<double> sigma(k);
    for (std::size_t j = 0; j < k; ++j) sigma[j] = std::sqrt(col_sq_norm(out.g.col(j), rows));
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    Columns u;
    u.rows = rows;
    u.cols = k;
    u.data.assign(rows * k, cplx{});
    std::vector<bool> missing(k, false);
    for (std::size_t jj = 0; jj < k; ++jj) {
        const std::size_t j = order[jj];
        if (sigma[j] > 0.0 && std::isnormal(sigma[j])) {
            for (std::size_t i = 0; i < rows; ++i) u.col(jj)[i] = out.g.col(j)[i] / sigma[j];
        } else {
            missing[jj] = true;
        }
    }
    complete_orthonormal(u, missing);

    Matrix left(rows, k);
    Matrix right(k, k);
    result.singular_values.resize(k);
    for (std::size_t jj = 0; jj < k; ++jj) {
        const std::size_t j = order[jj];
        result.singular_values[jj] = missing[jj] ? 0.0 : sigma[j];
        for (std::size_t i = 0; i < rows; ++i) left(i, jj) = u.col(jj)[i];
        for (std::size_t i = 0; i < k; ++i) right(i, jj) = out.v.col(j)[i];
    }
    if (!wide) {
        result.left_vectors = std::move(left);
        result.right_vectors = std::move(right);
    } else {
        // Worked on M*, so M = (U' S V'*)* = V' S U'*.
        result.left_vectors = std::move(right);
        result.right_vectors = std::move(left);
    }
    result.sweeps = out.sweeps;
    return result;
}

std::vector<double> singular_values(const Matrix& m, const JacobiOptions& options) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) return {};
    if (std::min(m.rows(), m.cols()) > kJacobiLimit) return svd_lapack(m, false).singular_values;
    const bool wide = m.rows() < m.cols();
    auto out = hestenes(qr_precondition(to_columns(m, wide)), false, options);
    std::vector<double> sigma(out.g.cols);
    for (std::size_t j = 0; j < sigma.size(); ++j)
        sigma[j] = std::sqrt(col_sq_norm(out.g.col(j), out.g.rows));
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

SigmaExtremes sigma_extremes(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("sigma of empty matrix");
    if (m.rows() == 1 && m.cols() == 1) {
        const double a = std::abs(m(0, 0));
        return {a, a};
    }
    if (m.rows() == 2 && m.cols() == 2) {
        const double f2 = std::norm(m(0, 0)) + std::norm(m(0, 1)) + std::norm(m(1, 0)) +
                          std::norm(m(1, 1));
        const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
        const double disc = std::sqrt(std::max(0.0, (f2 - 2 * det) * (f2 + 2 * det)));
        const double smax = std::sqrt(0.5 * (f2 + disc));
        const double smin = smax > 0.0 ? det / smax : 0.0;
        return {smin, smax};
    }
    const auto s = singular_values(m);
    return {s.back(), s.front()};
}

double sigma_min(const Matrix& m) { return sigma_extremes(m).min; }
double sigma_max(const Matrix& m) { return sigma_extremes(m).max; }

Vector solve(const Matrix& m, std::span<const cplx> b) {
    if (m.rows() != m.cols()) throw DimensionMismatch("solve: matrix must be square");
    if (b.size() != m.rows()) throw DimensionMismatch("solve: right-hand side size mismatch");
    const auto d = svd(m);
    const double smax = d.singular_values.front();
    const double smin = d.singular_values.back();
    if (smin < kSingularityThreshold * smax || smax == 0.0) {
        throw SingularMatrixError(
            fmt::format("solve: matrix is singular (sigma_min = {:.3e})", smin), smin);
    }
    const std::size_t n = m.rows();
    Vector x(n, cplx{});
    for (std::size_t k = 0; k < n; ++k) {
        cplx c{};
        for (std::size_t i = 0; i < n; ++i) c += std::conj(d.left_vectors(i, k)) * b[i];
        c /= d.singular_values[k];
        for (std::size_t i = 0; i < n; ++i) x[i] += d.right_vectors(i, k) * c;
    }
    return x;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("hermitian_eigenvalues: matrix must be square");
    check_finite(m);
    const auto n = static_cast<lapack_int>(m.rows());
    std::vector<double> w(m.rows());
    if (n == 0) return w;
    std::vector<cplx> a(m.entries().begin(), m.entries().end());
    const lapack_int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'L', n, lp(a.data()), n, w.data());
    if (info != 0) throw ConvergenceError(fmt::format("zheev failed (info = {})", info), 0.0);
    return w;
}

Matrix inverse(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("inverse: matrix must be square");
    check_finite(m);
    const auto n = static_cast<lapack_int>(m.rows());
    if (n == 0) return m;
    std::vector<cplx> a(m.entries().begin(), m.entries().end());
    std::vector<lapack_int> piv(m.rows());
    lapack_int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, lp(a.data()), n, piv.data());
    if (info > 0) throw SingularMatrixError("inverse: exactly singular pivot", 0.0);
    if (info == 0) info = LAPACKE_zgetri(LAPACK_ROW_MAJOR, n, lp(a.data()), n, piv.data());
    if (info != 0) throw SingularMatrixError(fmt::format("inverse: LAPACK info = {}", info), 0.0);
    return Matrix(m.rows(), m.cols(), std::move(a));
}

double induced_p_norm(const Matrix& m, Exponent p) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    switch (p) {
        case Exponent::one: {
            double best = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case Exponent::infinity: {
            double best = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case Exponent::two:
            return sigma_max(m);
    }
    throw UnsupportedError("induced_p_norm: unsupported exponent");
}

double vector_p_norm(std::span<const cplx> x, Exponent p) {
    switch (p) {
        case Exponent::one: {
            double s = 0.0;
            for (cplx z : x) s += std::abs(z);
            return s;
        }
        case Exponent::two:
            return norm2(x);
        case Exponent::infinity: {
            double s = 0.0;
            for (cplx z : x) s = std::max(s, std::abs(z));
            return s;
        }
    }
    throw UnsupportedError("vector_p_norm: unsupported exponent");
}

}  // namespace bandop
