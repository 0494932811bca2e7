#include "bandop/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

namespace {

constexpr Index kMaxWindowScalars = 1200;

bool has_zero_tails(const BandOperator& a) {
    return tail_operator(a, Side::left).diagonals().empty() &&
           tail_operator(a, Side::right).diagonals().empty();
}

void require_l2(const BandOperator& a, const char* what) {
    if (a.exponent() != Exponent::two)
        throw UnsupportedError(fmt::format("{} is only available for p = 2", what));
}

// Corner (T - t)^-1 restricted to block 0 of the half-line block Toeplitz
// operator with diagonal block d and coupling u (block k to block k + 1),
// by cyclic reduction. Empty when t is numerically inside the spectrum of T.
std::optional<Matrix> half_line_corner(const Matrix& d, const Matrix& u, double t) {
    const std::size_t n = d.rows();
    Matrix diag = d - Matrix::scalar(n, t);
    Matrix first = diag;
    Matrix up = u;
    Matrix down = u.adjoint();
    const double scale = d.frobenius_norm() + u.frobenius_norm() + std::abs(t);
    for (int k = 0; k < 100; ++k) {
        if (up.frobenius_norm() <= 1e-17 * scale) {
            const Matrix g = inverse(first);
            if (!g.all_finite() || g.frobenius_norm() * scale > 1e15) return std::nullopt;
            return g;
        }
        Matrix inv;
        try {
            inv = inverse(diag);
        } catch (const SingularMatrixError&) {
            return std::nullopt;
        }
        if (!inv.all_finite() || inv.frobenius_norm() * scale > 1e15) return std::nullopt;
        const Matrix up_inv = up * inv;
        const Matrix down_inv = down * inv;
        first -= up_inv * down;
        diag -= up_inv * down + down_inv * up;
        up = -1.0 * (up_inv * up);
        down = -1.0 * (down_inv * down);
    }
    return std::nullopt;
}

// H = A*A split as core window [-n, n] plus two periodic half-lines, each
// grouped into blocks of whole periods at least as wide as the band.
struct GramSplit {
    Matrix core;
    struct HalfLine {
        Matrix couple;  // H[core, first block]
        Matrix d;
        Matrix u;
    };
    HalfLine right, left;
    Index radius = 0;  // core is [-radius, radius]
    Index block = 0;   // widest half-line block
    Index sites = 0;

    // Schur complement of H - t onto the core; empty when t is not
    // separated from the tail spectrum.
    std::optional<Matrix> schur(double t) const {
        Matrix s = core - Matrix::scalar(core.rows(), t);
        for (const HalfLine* h : {&right, &left}) {
            const auto g = half_line_corner(h->d, h->u, t);
            if (!g) return std::nullopt;
            s -= h->couple * *g * h->couple.adjoint();
        }
        return s;
    }
};

GramSplit split_gram(const BandOperator& a) {
    const BandOperator h = compose(adjoint(a), a);
    const auto st = h.structure();
    const Index w = std::max<Index>(h.bandwidth(), 1);
    const Index n = std::max(st.core_radius, w);
    auto width = [&](std::size_t q) {
        const auto qq = static_cast<Index>(q);
        return qq * ((w + qq - 1) / qq);
    };
    const Index sr = width(st.right_period);
    const Index sl = width(st.left_period);
    const Interval core{-n, n};
    const Interval r0{n + 1, n + sr}, r1{n + sr + 1, n + 2 * sr};
    const Interval l0{-n - sl, -n - 1}, l1{-n - 2 * sl, -n - sl - 1};
    GramSplit g;
    g.core = window_matrix(h, core, core);
    g.right = {window_matrix(h, core, r0), window_matrix(h, r0, r0), window_matrix(h, r0, r1)};
    g.left = {window_matrix(h, core, l0), window_matrix(h, l0, l0), window_matrix(h, l0, l1)};
    g.radius = n;
    g.block = std::max(sr, sl);
    g.sites = core.size() + sr + sl;
    return g;
}

// Largest (top) or smallest eigenvalue of A*A beyond the threshold t0, which
// must lie outside the tail spectrum on the searched side. Returns the
// eigenvalue, t0 itself when there is none, or empty when the half-line
// resolvents fail to settle.
std::optional<double> gram_bound_state(const GramSplit& g, double t0, double t_far, bool top) {
    auto beyond = [&](double t) -> std::optional<bool> {
        const auto s = g.schur(t);
        if (!s) return std::nullopt;
        const auto ev = hermitian_eigenvalues(*s);
        return top ? ev.back() > 0 : ev.front() < 0;
    };
    const auto at_t0 = beyond(t0);
    if (!at_t0) return std::nullopt;
    if (!*at_t0) return t0;
    double inner = t0, outer = t_far;
    for (int k = 0; k < 200; ++k) {
        if (std::abs(std::sqrt(std::max(outer, 0.0)) - std::sqrt(std::max(inner, 0.0))) <= 1e-14 * (1 + std::sqrt(std::abs(inner))))
            break;
        const double mid = 0.5 * (inner + outer);
        const auto b = beyond(mid);
        if (!b) return std::nullopt;
        (*b ? inner : outer) = mid;
    }
    return 0.5 * (inner + outer);
}

BandOperator with_exponent(const BandOperator& a, Exponent p) {
    return BandOperator(a.block_dim(), p, a.diagonals());
}

}  // namespace

double norm_localized(const BandOperator& a, Index d) {
    if (d < 1) throw std::invalid_argument("norm_localized: D must be at least 1");
    if (a.is_zero()) return 0.0;
    const auto st = a.structure();
    const Index m = st.core_radius;
    const Index w = a.bandwidth();
    const Exponent p = a.exponent();

    Index lo, hi;
    if (has_zero_tails(a)) {
        // every nonzero column lies in [-m - w, m + w]
        const Index span = 2 * (m + w) + 1;
        if (d >= span) {
            const Interval cols{-m - w, m + w};
            return induced_p_norm(window_compression(a, cols).matrix, p);
        }
        lo = -m - w;
        hi = m + w - d + 1;
    } else {
        lo = -m - w - d - static_cast<Index>(st.left_period) + 1;
        hi = m + w + static_cast<Index>(st.right_period);
    }
    if (d * static_cast<Index>(a.block_dim()) > kMaxWindowScalars)
        throw UnsupportedError(fmt::format("window of {} columns is too large for a dense evaluation", d));

    double best = 0;
    for (Index s = lo; s <= hi; ++s)
        best = std::max(best, induced_p_norm(window_compression(a, {s, s + d - 1}).matrix, p));
    return best;
}

Index localization_window(Index bandwidth, double delta, Exponent p) {
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (p == Exponent::infinity) return 2 * bandwidth + 1;
    const double bound = p == Exponent::two ? std::pow(delta / 4, 2) : delta / 4;
    // 4w / D < bound  <=>  D > 4w / bound
    auto dd = static_cast<Index>(std::floor(4.0 * static_cast<double>(bandwidth) / bound)) + 1;
    if (dd % 2 == 0) ++dd;
    return std::max<Index>(dd, 1);
}

ConvergedValue op_norm(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    if (!(tol > 0)) throw std::invalid_argument("op_norm: tol must be positive");
    if (a.is_zero()) return {};
    const auto st = a.structure();
    const Index m = st.core_radius;
    const Index w = a.bandwidth();
    const auto ql = static_cast<Index>(st.left_period);
    const auto qr = static_cast<Index>(st.right_period);

    if (a.exponent() == Exponent::infinity) {
        const Interval rows{-m - ql, m + qr};
        const Matrix mat = window_matrix(a, rows, {rows.lo - w, rows.hi + w});
        return {induced_p_norm(mat, Exponent::infinity), rows.size(), 0.0, true};
    }
    if (a.exponent() == Exponent::one) {
        const Interval cols{-m - w - ql, m + w + qr};
        return {induced_p_norm(window_compression(a, cols).matrix, Exponent::one), cols.size(), 0.0, true};
    }

    // sup of the tail symbols is the top of the essential spectrum of A*A;
    // anything above it is an isolated eigenvalue found from the core
    double tails = 0, tail_gap = 0;
    for (Side side : {Side::left, Side::right}) {
        const BandOperator t = tail_operator(a, side);
        if (t.is_zero()) continue;
        const auto c = laurent_norm_certified(t, symbol);
        tails = std::max(tails, c.value);
        tail_gap = std::max(tail_gap, c.gap);
    }
    const double above = tails + tail_gap + 0.5 * tol;
    const double bound = std::sqrt(op_norm(with_exponent(a, Exponent::one)).value *
                                   op_norm(with_exponent(a, Exponent::infinity)).value);
    const GramSplit g = split_gram(a);
    ConvergedValue out;
    out.window_size = g.sites;
    const auto top = gram_bound_state(g, above * above, bound * bound * (1 + 1e-12) + 1e-300, true);
    if (!top) {
        out.value = tails;
        out.cauchy_gap = tail_gap + 0.5 * tol;
        out.converged = false;
        return out;
    }
    if (*top > above * above) {
        out.value = std::sqrt(*top);
        out.cauchy_gap = 0;
    } else {
        out.value = tails;
        out.cauchy_gap = tail_gap + 0.5 * tol;
    }
    out.converged = out.cauchy_gap <= tol;
    return out;
}

ConvergedValue essential_norm_q(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    if (a.is_zero()) return {};
    const auto st = a.structure();
    const Index m0 = st.core_radius + a.bandwidth();
    ConvergedValue out;
    double prev = op_norm(column_truncate(a, m0), tol, symbol).value;
    double gap = 0;
    bool converged = true;
    for (Index m = m0 + 1; m <= m0 + 3; ++m) {
        const auto v = op_norm(column_truncate(a, m), tol, symbol);
        converged = converged && v.converged;
        gap = std::max(gap, std::abs(v.value - prev));
        prev = v.value;
    }
    out.value = prev;
    out.window_size = m0 + 3;
    out.cauchy_gap = gap;
    out.converged = converged && gap <= tol;
    return out;
}

double essential_norm_via_limops(const BandOperator& a, const ExtremizeOptions& symbol) {
    double best = 0;
    for (const auto& l : operator_spectrum(a)) {
        const double v = a.exponent() == Exponent::two ? laurent_norm(l, symbol) : op_norm(l.op).value;
        best = std::max(best, v);
    }
    return best;
}

ConvergedValue lower_norm(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    require_l2(a, "lower_norm");
    if (a.is_zero()) return {};
    double tails = INFINITY, tail_gap = 0;
    for (Side side : {Side::left, Side::right}) {
        const auto c = laurent_resolvent_certified(tail_operator(a, side), 0.0, symbol);
        tails = std::min(tails, c.value);
        tail_gap = std::max(tail_gap, c.gap);
    }
    const GramSplit g = split_gram(a);
    ConvergedValue out;
    out.window_size = g.sites;
    out.value = tails;
    out.cauchy_gap = tail_gap + 0.5 * tol;
    const double below = tails - tail_gap - 0.5 * tol;
    if (below > 0) {
        const auto bottom = gram_bound_state(g, below * below, 0.0, false);
        if (!bottom) {
            out.converged = false;
            return out;
        }
        if (*bottom < below * below) {
            // A*A is only known to rounding level delta, so nu^2 lies in
            // [bottom - delta, bottom + delta]; within delta of 0 report 0
            const double bound2 = op_norm(with_exponent(a, Exponent::one)).value *
                                  op_norm(with_exponent(a, Exponent::infinity)).value;
            const double delta = 64 * std::numeric_limits<double>::epsilon() * bound2;
            const double hi = std::sqrt(std::max(*bottom, 0.0) + delta);
            const double lo = std::sqrt(std::max(*bottom - delta, 0.0));
            out.value = *bottom > delta ? std::sqrt(*bottom) : 0.0;
            out.cauchy_gap = std::max(hi - out.value, out.value - lo);
        }
    } else {
        // nu lies in [0, tails]
        out.cauchy_gap = std::max(out.cauchy_gap, tails);
    }
    // sqrt of an eigenvalue near 0 only carries half the digits (as does a
    // symbol minimum at a zero); any column window gives an upper bound
    const auto d = static_cast<Index>(a.block_dim());
    const Index r = std::min(g.radius + 2 * g.block, (128 / d - 1) / 2);
    out.value = std::min(out.value, sigma_min(window_compression(a, {-r, r}).matrix));
    out.converged = out.cauchy_gap <= tol;
    return out;
}

ConvergedValue mu_tilde(const BandOperator& a, double /*tol*/, const ExtremizeOptions& symbol) {
    require_l2(a, "mu_tilde");
    if (a.is_zero()) return {};
    const auto st = a.structure();
    ConvergedValue out;
    out.value = INFINITY;
    for (Side side : {Side::left, Side::right}) {
        const auto c = laurent_resolvent_certified(tail_operator(a, side), 0.0, symbol);
        out.value = std::min(out.value, c.value);
        out.cauchy_gap = std::max(out.cauchy_gap, c.gap);
        out.converged = out.converged && c.certified;
    }
    out.window_size = st.core_radius + a.bandwidth();
    return out;
}

double compression_lower_norm(const BandOperator& a, Index m, Index d) {
    require_l2(a, "compression_lower_norm");
    if (m < 0 || d < 1) throw std::invalid_argument("compression_lower_norm: need m >= 0 and D >= 1");
    if (a.is_zero()) return 0.0;
    const auto st = a.structure();
    const Index core = st.core_radius;
    const Index w = a.bandwidth();
    double best = INFINITY;
    // right windows [s, s + D - 1], s > m; periodic in s beyond core + w
    const Index r_hi = std::max(m + 1, core + w + 1) + static_cast<Index>(st.right_period) - 1;
    for (Index s = m + 1; s <= r_hi; ++s) best = std::min(best, sigma_min(window_compression(a, {s, s + d - 1}).matrix));
    // left windows [e - D + 1, e], e < -m
    const Index l_lo = std::min(-m - 1, -core - w - 1) - static_cast<Index>(st.left_period) + 1;
    for (Index e = -m - 1; e >= l_lo; --e) best = std::min(best, sigma_min(window_compression(a, {e - d + 1, e}).matrix));
    return best;
}

ConvergedValue mu(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    const auto x = mu_tilde(a, tol, symbol);
    const auto y = mu_tilde(adjoint(a), tol, symbol);
    ConvergedValue out = x.value <= y.value ? x : y;
    out.cauchy_gap = std::max(x.cauchy_gap, y.cauchy_gap);
    out.converged = x.converged && y.converged;
    return out;
}

ConvergedValue inverse_norm_recip_detail(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    const auto x = lower_norm(a, tol, symbol);
    const auto y = lower_norm(adjoint(a), tol, symbol);
    ConvergedValue out = x.value <= y.value ? x : y;
    out.converged = x.converged && y.converged;
    out.cauchy_gap = std::max(x.cauchy_gap, y.cauchy_gap);
    return out;
}

double inverse_norm_recip(const BandOperator& a, double tol, const ExtremizeOptions& symbol) {
    const auto r = inverse_norm_recip_detail(a, tol, symbol);
    if (!r.converged) throw ConvergenceError("inverse_norm_recip: lower norm did not converge", r.cauchy_gap);
    return r.value;
}

EssentialResolvent essential_resolvent_recip(const BandOperator& a, cplx lambda, double tol,
                                             const ExtremizeOptions& symbol) {
    EssentialResolvent r;
    r.mu_route = mu(subtract_scalar(a, lambda), tol, symbol).value;
    r.limitops_route = INFINITY;
    for (const auto& l : operator_spectrum(a))
        r.limitops_route = std::min(r.limitops_route, laurent_resolvent_recip(l, lambda, symbol));
    r.discrepancy = std::abs(r.mu_route - r.limitops_route);
    return r;
}

}  // namespace bandop
