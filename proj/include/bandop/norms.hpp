#pragma once

// Norm-type functionals: operator norm, essential norm (two ways), lower
// norm nu, the compression limits mu~ and mu, and reciprocal resolvent norms.
//
// Results come as ConvergedValue: cauchy_gap bounds the distance to the true
// value and converged means cauchy_gap <= tol. For p = 2 the extremes of A*A
// are either in its essential spectrum (the tail symbols) or isolated
// eigenvalues, found exactly from the core by a Schur complement against the
// periodic half-lines.

#include "bandop/limitops.hpp"
#include "bandop/operator.hpp"

namespace bandop {

struct ConvergedValue {
    double value = 0;
    Index window_size = 0;
    double cauchy_gap = 0;
    bool converged = true;
};

/// |||A|||_D: sup of ||A x|| / ||x|| over x supported in a window of D
/// consecutive indices. Exact for eventually periodic operators (finitely many
/// distinct windows) in the operator's exponent.
double norm_localized(const BandOperator& a, Index d);

/// Smallest odd D = 2n+1 with 4w/D < (delta/4)^p, which makes
/// (1 - delta) ||B|| <= |||B|||_D for every band operator B of width w.
/// For p = inf this is 2w+1, where equality holds.
Index localization_window(Index bandwidth, double delta, Exponent p);

/// ||A||. p = 1, inf: exact column / row sums. p = 2: max of the tail symbol
/// norms and the top eigenvalue of A*A above them (window_size = core plus one
/// block per half-line).
ConvergedValue op_norm(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});

/// lim ||A Q_m|| evaluated from m = core radius + band-width on, where the
/// sequence is constant for eventually periodic A.
ConvergedValue essential_norm_q(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});

/// max over the operator spectrum of ||A_h||.
double essential_norm_via_limops(const BandOperator& a, const ExtremizeOptions& symbol = {});

/// nu(A) = inf ||Ax|| / ||x||, p = 2 only: min of the tail symbol lower norms
/// and the bottom eigenvalue of A*A below them. That eigenvalue is only known
/// to rounding in A*A, so a nu near 0 carries about half the digits; within
/// rounding of 0 the value is 0 and cauchy_gap says how far it may be off.
ConvergedValue lower_norm(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});

/// mu~(A) = lim_m nu(A restricted to im Q_m) via the tail symbols.
ConvergedValue mu_tilde(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});

/// Windowed inner sequence for mu~: min over windows W of size D with
/// W disjoint from [-m, m] of sigma_min(A on columns W, rows W +- w).
/// Non-decreasing in m; bounded below by mu~(A) once m >= core radius + w.
double compression_lower_norm(const BandOperator& a, Index m, Index d);

/// mu(A) = min(mu~(A), mu~(A*)).
ConvergedValue mu(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});

/// ||A^-1||^-1 = min(nu(A), nu(A*)); 0 when A is not invertible. Throws
/// ConvergenceError when either lower norm fails to settle.
double inverse_norm_recip(const BandOperator& a, double tol = 1e-6, const ExtremizeOptions& symbol = {});
/// Same value without throwing; every reported value is an upper bound.
ConvergedValue inverse_norm_recip_detail(const BandOperator& a, double tol = 1e-6,
                                         const ExtremizeOptions& symbol = {});

struct EssentialResolvent {
    double mu_route = 0;        // mu(A - lambda I)
    double limitops_route = 0;  // min over the operator spectrum of nu-type symbol values
    double discrepancy = 0;
};

/// Reciprocal essential resolvent norm at lambda, computed both ways.
EssentialResolvent essential_resolvent_recip(const BandOperator& a, cplx lambda, double tol = 1e-6,
                                             const ExtremizeOptions& symbol = {});

}  // namespace bandop
