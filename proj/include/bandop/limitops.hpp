#pragma once

// Operator spectrum of eventually periodic band operators and the symbol
// calculus for its (periodic) members on l^2.

#include <functional>
#include <vector>

#include "bandop/operator.hpp"

namespace bandop {

enum class Direction { minus_infinity, plus_infinity };

/// A purely periodic operator together with where it came from. When both
/// tails produce the same operator the entry carries both directions.
struct LimitOperator {
    BandOperator op;
    std::vector<Direction> directions;
    Index residue = 0;
    std::size_t period = 1;
};

/// All limit operators V_{-r} T V_r, r in [0, q), for T the left and right
/// tail operators, deduplicated entrywise. Throws UnsupportedError for
/// seeded-random or derived diagonals.
std::vector<LimitOperator> operator_spectrum(const BandOperator& a);

/// True when every diagonal is Constant or Periodic.
bool is_purely_periodic(const BandOperator& a);
/// Common period of a purely periodic operator.
std::size_t common_period(const BandOperator& a);

/// a(theta) = sum_k coeff_k e^{i k theta}, blocks of size (d q) x (d q).
struct Symbol {
    std::size_t block_dim = 1;
    std::vector<Index> powers;
    std::vector<Matrix> coefficients;

    Matrix at(double theta) const;
    /// sum_k |k| ||coeff_k||_F, a bound for the Lipschitz constant of theta -> a(theta).
    double lipschitz_bound() const;
};

/// Period-q folding: coeff_k[s, t] = entry(q k + s, t), s, t in [0, q).
Symbol fold_symbol(const BandOperator& periodic);
Symbol fold_symbol(const LimitOperator& l);

struct ExtremizeOptions {
    int grid = 1024;
    double tolerance = 1e-9;   // certified gap to stop at
    int max_evaluations = 200000;
};

/// Value found, where, and how far the true extremum can be from it.
struct CertifiedExtremum {
    double value = 0;
    double theta = 0;
    double gap = 0;
    bool certified = false;
    int evaluations = 0;
};

/// min_theta sigma_min(a(theta) - lambda I) or max_theta sigma_max(...).
///
/// Uniform sampling, then branch and bound over theta-cells. A cell of
/// half-width r around m is bounded two ways: first order,
/// |sigma(theta) - sigma(m)| <= Lip(a) r; and second order through the Gram
/// symbol G = (a - lambda)^* (a - lambda), whose extreme eigenvalues over the
/// cell lie within K r^2 / 2 of those of the pencil G(m) + t G'(m), |t| <= r,
/// which are attained at t = +-r (lambda_min of a Hermitian pencil is concave).
/// K = sum_k k^2 ||G_k||_F.
CertifiedExtremum singular_extremum(const Symbol& a, cplx lambda, bool maximize,
                                    const ExtremizeOptions& options = {});

/// Folding of V_{-r} L V_r, r in [0, q), with the smallest bound constants;
/// all of them have the same singular values at every theta.
Symbol best_fold_symbol(const BandOperator& periodic);

/// max_theta sigma_max(a(theta)).
CertifiedExtremum laurent_norm_certified(const BandOperator& periodic, const ExtremizeOptions& options = {});
/// min_theta sigma_min(a(theta) - lambda I).
CertifiedExtremum laurent_resolvent_certified(const BandOperator& periodic, cplx lambda,
                                              const ExtremizeOptions& options = {});

/// Exponent must be 2; UnsupportedError otherwise.
double laurent_norm(const BandOperator& periodic, const ExtremizeOptions& options = {});
double laurent_lower_norm(const BandOperator& periodic, const ExtremizeOptions& options = {});
double laurent_resolvent_recip(const BandOperator& periodic, cplx lambda, const ExtremizeOptions& options = {});
double laurent_norm(const LimitOperator& l, const ExtremizeOptions& options = {});
double laurent_lower_norm(const LimitOperator& l, const ExtremizeOptions& options = {});
double laurent_resolvent_recip(const LimitOperator& l, cplx lambda, const ExtremizeOptions& options = {});

const char* direction_name(Direction d);

}  // namespace bandop
