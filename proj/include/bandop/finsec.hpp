#pragma once

// Finite sections A_n = P_n A P_n on [-n, n]: stability, inverse-norm and
// condition-number asymptotics, and the stability spectrum S(A, c).

#include <string>
#include <vector>

#include "bandop/norms.hpp"

namespace bandop {

struct FinSecReport {
    std::vector<Index> n_list;
    std::vector<double> sigma_min_list;
    std::vector<double> sigma_max_list;  // ||A_n||
    std::vector<double> inv_norm_list;   // +inf for singular sections
    std::vector<double> cond_list;
    bool stable = false;
    double limsup_inv_norm = 0;
    double limsup_cond = 0;
    /// True when the tail values of ||A_n^-1|| are all equal (limsup is a limit).
    bool inv_norm_converges = false;
    Index n0 = 0;  // sections are required to be invertible from here on
    double c = 0;
};

inline constexpr double kStabilityBound = 1e6;

/// Sections n = 1..n_max. limsup values are the maximum over the last
/// ceil(n_max / 2) sections. With padding c, ||A_{n,c}^-1|| = max(||A_n^-1||, 1/c).
FinSecReport finite_sections(const BandOperator& a, Index n_max = 40, double c = 0);

/// Members of S(A, c): A itself and half-line truncations of the tail
/// operators padded by c.
struct StabilityMember {
    std::string tag;  // "A", "right_cut" or "left_cut"
    Index cut = 0;    // k of chi_(-inf,k] or chi_[k,inf)
    BandOperator op;
    bool invertible = false;
    double inverse_norm = 0;  // +inf when not invertible
};

struct StabilitySpectrum {
    double c = 0;
    std::vector<StabilityMember> members;
};

/// Right cuts chi_(-inf,k] R chi_(-inf,k] + c chi_(k,inf) and left cuts
/// chi_[k,inf) L chi_[k,inf) + c chi_(-inf,k) for k in [0, q), deduplicated
/// up to shifts. Members are invertible when ||S^-1||^-1 > invert_tol.
StabilitySpectrum stability_spectrum(const BandOperator& a, double c, double tol = 1e-6,
                                     double invert_tol = 1e-10);

struct Q1Result {
    double lhs = 0;  // limsup ||A_n^-1||
    double rhs = 0;  // max over S(A, c) of ||S^-1||
    double gap = 0;
};

/// Throws PreconditionError when (A_n) is not stable.
Q1Result q1_check(const BandOperator& a, double c, Index n_max = 40, double tol = 1e-6);

struct Q3Result {
    double limsup_cond = 0;
    double identity_value = 0;  // ||A|| max ||S^-1||
    double gap = 0;
    double section_norm_gap = 0;  // | ||A_{n_max}|| - ||A|| |
};

Q3Result q3_check(const BandOperator& a, double c, Index n_max = 40, double tol = 1e-6);

/// ||diag(A_1, A_2, ...)|| for a finite list: the largest sigma_max.
double stacked_norm(const std::vector<Matrix>& sections);

}  // namespace bandop
