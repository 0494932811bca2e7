#include "bandop/finsec.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

namespace {

bool singular(double smin, double smax) { return smax == 0.0 || smin < kSingularityThreshold * smax; }

double resolve_c(const BandOperator& a, double c) { return c > 0 ? c : op_norm(a).value; }

// members S and T agree up to some shift V_{-j} S V_j
bool shift_equivalent(const BandOperator& s, const BandOperator& t) {
    if (s.block_dim() != t.block_dim()) return false;
    const auto ss = s.structure();
    const auto ts = t.structure();
    const Index reach = ss.core_radius + ts.core_radius +
                        static_cast<Index>(std::max({ss.left_period, ss.right_period, ts.left_period,
                                                     ts.right_period})) +
                        1;
    for (Index j = -reach; j <= reach; ++j)
        if (entrywise_equal(j == 0 ? s : shift_conjugate(s, j), t)) return true;
    return false;
}

BandOperator half_line_cut(const BandOperator& tail, Side side, Index k, double c) {
    const std::size_t d = tail.block_dim();
    const std::size_t q = common_period(tail);
    auto offsets = tail.offsets();
    offsets.push_back(0);
    const Matrix pad = Matrix::scalar(d, c);
    const bool right = side == Side::right;
    auto kept = [right, k](Index i) { return right ? i <= k : i >= k; };
    auto f = [tail, pad, kept, d](Index i, Index j) {
        if (kept(i) && kept(j)) return tail.entry(i, j);
        if (i == j) return pad;
        return Matrix(d, d);
    };
    const EpStructure st{std::abs(k) + tail.bandwidth() + 1, right ? q : 1, right ? 1 : q};
    return derive(d, tail.exponent(), offsets, f, st);
}

}  // namespace

FinSecReport finite_sections(const BandOperator& a, Index n_max, double c) {
    if (n_max < 1) throw std::invalid_argument("finite_sections: n_max must be at least 1");
    if (a.exponent() != Exponent::two) throw UnsupportedError("finite sections are analysed for p = 2");
    FinSecReport r;
    r.c = resolve_c(a, c);
    const auto st = a.structure();
    r.n0 = std::min(st.core_radius + a.bandwidth(), n_max);
    for (Index n = 1; n <= n_max; ++n) {
        const auto sv = singular_values(truncate(a, n));
        const double smax = sv.front(), smin = sv.back();
        r.n_list.push_back(n);
        r.sigma_min_list.push_back(smin);
        r.sigma_max_list.push_back(smax);
        const bool sing = singular(smin, smax);
        r.inv_norm_list.push_back(sing ? INFINITY : 1.0 / smin);
        r.cond_list.push_back(sing ? INFINITY : smax / smin);
    }
    const std::size_t count = r.n_list.size();
    const std::size_t tail = (count + 1) / 2;
    double lo = INFINITY;
    for (std::size_t k = count - tail; k < count; ++k) {
        r.limsup_inv_norm = std::max(r.limsup_inv_norm, r.inv_norm_list[k]);
        r.limsup_cond = std::max(r.limsup_cond, r.cond_list[k]);
        lo = std::min(lo, r.inv_norm_list[k]);
    }
    r.inv_norm_converges = std::isfinite(r.limsup_inv_norm) && r.limsup_inv_norm - lo <= 1e-9 * r.limsup_inv_norm;
    r.stable = r.limsup_inv_norm <= kStabilityBound;
    for (std::size_t k = 0; k < count; ++k)
        if (r.n_list[k] >= r.n0 && !std::isfinite(r.inv_norm_list[k])) r.stable = false;
    return r;
}

StabilitySpectrum stability_spectrum(const BandOperator& a, double c, double tol, double invert_tol) {
    if (a.exponent() != Exponent::two) throw UnsupportedError("stability spectra are computed for p = 2");
    StabilitySpectrum out;
    out.c = resolve_c(a, c);
    std::vector<StabilityMember> members;
    members.push_back({"A", 0, a, false, 0});
    for (Side side : {Side::right, Side::left}) {
        const BandOperator tail = tail_operator(a, side);
        const auto q = static_cast<Index>(common_period(tail));
        for (Index k = 0; k < q; ++k) {
            BandOperator s = half_line_cut(tail, side, k, out.c);
            const bool dup = std::any_of(members.begin(), members.end(),
                                         [&](const StabilityMember& m) { return shift_equivalent(s, m.op); });
            if (dup) continue;
            members.push_back({side == Side::right ? "right_cut" : "left_cut", k, std::move(s), false, 0});
        }
    }
    for (auto& m : members) {
        const double recip = inverse_norm_recip(m.op, tol);
        m.invertible = recip > invert_tol;
        m.inverse_norm = m.invertible ? 1.0 / recip : INFINITY;
    }
    out.members = std::move(members);
    return out;
}

Q1Result q1_check(const BandOperator& a, double c, Index n_max, double tol) {
    const auto report = finite_sections(a, n_max, c);
    if (!report.stable) throw PreconditionError("the finite section sequence is not stable");
    const auto spec = stability_spectrum(a, report.c, tol);
    Q1Result r;
    r.lhs = report.limsup_inv_norm;
    for (const auto& m : spec.members) r.rhs = std::max(r.rhs, m.inverse_norm);
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

Q3Result q3_check(const BandOperator& a, double c, Index n_max, double tol) {
    const auto report = finite_sections(a, n_max, c);
    if (!report.stable) throw PreconditionError("the finite section sequence is not stable");
    const auto spec = stability_spectrum(a, report.c, tol);
    double rhs = 0;
    for (const auto& m : spec.members) rhs = std::max(rhs, m.inverse_norm);
    const double norm = op_norm(a, tol).value;
    Q3Result r;
    r.limsup_cond = report.limsup_cond;
    r.identity_value = norm * rhs;
    r.gap = std::abs(r.limsup_cond - r.identity_value);
    r.section_norm_gap = std::abs(report.sigma_max_list.back() - norm);
    return r;
}

double stacked_norm(const std::vector<Matrix>& sections) {
    if (sections.empty()) throw std::invalid_argument("stacked_norm: empty list");
    double best = 0;
    for (const auto& m : sections) best = std::max(best, sigma_max(m));
    return best;
}

}  // namespace bandop
