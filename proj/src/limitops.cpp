#include "bandop/limitops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

const char* direction_name(Direction d) {
    return d == Direction::plus_infinity ? "+inf" : "-inf";
}

bool is_purely_periodic(const BandOperator& a) {
    return std::all_of(a.diagonals().begin(), a.diagonals().end(), [](const DiagonalSymbol& s) {
        return std::holds_alternative<ConstantLaw>(s.law) || std::holds_alternative<PeriodicLaw>(s.law);
    });
}

std::size_t common_period(const BandOperator& a) {
    if (!is_purely_periodic(a)) throw UnsupportedError("operator is not purely periodic");
    std::size_t q = 1;
    for (const auto& s : a.diagonals())
        if (const auto* p = std::get_if<PeriodicLaw>(&s.law)) q = std::lcm(q, p->sequence.period());
    return q;
}

std::vector<LimitOperator> operator_spectrum(const BandOperator& a) {
    (void)a.structure();  // rejects classes without a computable operator spectrum
    std::vector<LimitOperator> out;
    for (Side side : {Side::left, Side::right}) {
        const Direction dir = side == Side::right ? Direction::plus_infinity : Direction::minus_infinity;
        const BandOperator tail = tail_operator(a, side);
        const std::size_t q = common_period(tail);
        for (Index r = 0; r < static_cast<Index>(q); ++r) {
            BandOperator shifted = r == 0 ? tail : shift_conjugate(tail, r);
            auto it = std::find_if(out.begin(), out.end(), [&](const LimitOperator& l) {
                return entrywise_equal(l.op, shifted);
            });
            if (it != out.end()) {
                if (std::find(it->directions.begin(), it->directions.end(), dir) == it->directions.end())
                    it->directions.push_back(dir);
                continue;
            }
            out.push_back({std::move(shifted), {dir}, r, q});
        }
    }
    return out;
}

Matrix Symbol::at(double theta) const {
    Matrix m(block_dim, block_dim);
    for (std::size_t k = 0; k < powers.size(); ++k) {
        const double t = static_cast<double>(powers[k]) * theta;
        m += coefficients[k] * cplx(std::cos(t), std::sin(t));
    }
    return m;
}

double Symbol::lipschitz_bound() const {
    double l = 0;
    for (std::size_t k = 0; k < powers.size(); ++k)
        l += static_cast<double>(std::abs(powers[k])) * coefficients[k].frobenius_norm();
    return l;
}

Symbol fold_symbol(const BandOperator& periodic) {
    const std::size_t q = common_period(periodic);
    const std::size_t d = periodic.block_dim();
    const auto qi = static_cast<Index>(q);
    const Index kmax = (periodic.bandwidth() + qi - 1) / qi + 1;
    Symbol sym;
    sym.block_dim = d * q;
    for (Index k = -kmax; k <= kmax; ++k) {
        Matrix c(d * q, d * q);
        for (Index s = 0; s < qi; ++s)
            for (Index t = 0; t < qi; ++t) {
                const Matrix blk = periodic.entry(qi * k + s, t);
                for (std::size_t u = 0; u < d; ++u)
                    for (std::size_t v = 0; v < d; ++v)
                        c(static_cast<std::size_t>(s) * d + u, static_cast<std::size_t>(t) * d + v) = blk(u, v);
            }
        if (c.is_zero()) continue;
        sym.powers.push_back(k);
        sym.coefficients.push_back(std::move(c));
    }
    return sym;
}

Symbol fold_symbol(const LimitOperator& l) { return fold_symbol(l.op); }

namespace {

// Gram symbol G(theta) = (a(theta) - lambda)^* (a(theta) - lambda).
struct GramSymbol {
    std::size_t dim = 1;
    std::vector<Index> powers;
    std::vector<Matrix> coefficients;
    double curvature = 0;  // sum k^2 ||G_k||_F

    Matrix at(double theta) const {
        Matrix m(dim, dim);
        for (std::size_t k = 0; k < powers.size(); ++k) {
            const double t = static_cast<double>(powers[k]) * theta;
            m += coefficients[k] * cplx(std::cos(t), std::sin(t));
        }
        return m;
    }
    Matrix derivative(double theta) const {
        Matrix m(dim, dim);
        for (std::size_t k = 0; k < powers.size(); ++k) {
            const double p = static_cast<double>(powers[k]);
            m += coefficients[k] * (cplx(0, p) * cplx(std::cos(p * theta), std::sin(p * theta)));
        }
        return m;
    }
};

Symbol shifted_by_lambda(const Symbol& a, cplx lambda) {
    Symbol s = a;
    if (lambda == cplx{}) return s;
    auto it = std::find(s.powers.begin(), s.powers.end(), 0);
    const Matrix shift = Matrix::scalar(s.block_dim, -lambda);
    if (it == s.powers.end()) {
        s.powers.push_back(0);
        s.coefficients.push_back(shift);
    } else {
        s.coefficients[static_cast<std::size_t>(it - s.powers.begin())] += shift;
    }
    return s;
}

GramSymbol gram_symbol(const Symbol& a) {
    GramSymbol g;
    g.dim = a.block_dim;
    std::vector<std::pair<Index, Matrix>> acc;
    for (std::size_t j = 0; j < a.powers.size(); ++j) {
        const Matrix aj = a.coefficients[j].adjoint();
        for (std::size_t l = 0; l < a.powers.size(); ++l) {
            const Index k = a.powers[l] - a.powers[j];
            Matrix prod = aj * a.coefficients[l];
            auto it = std::find_if(acc.begin(), acc.end(), [k](const auto& e) { return e.first == k; });
            if (it == acc.end()) acc.emplace_back(k, std::move(prod));
            else it->second += prod;
        }
    }
    for (auto& [k, m] : acc) {
        if (m.is_zero()) continue;
        g.curvature += static_cast<double>(k * k) * m.frobenius_norm();
        g.powers.push_back(k);
        g.coefficients.push_back(std::move(m));
    }
    return g;
}

// Extreme eigenvalues of a Hermitian matrix.
SigmaExtremes hermitian_extremes(const Matrix& h) {
    const std::size_t n = h.rows();
    if (n == 1) return {h(0, 0).real(), h(0, 0).real()};
    if (n == 2) {
        const double a = h(0, 0).real(), d = h(1, 1).real();
        const double r = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
        return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
    }
    // shift to positive semidefinite, where eigenvalues are singular values
    const double s = h.frobenius_norm();
    const auto e = sigma_extremes(h + Matrix::scalar(n, s));
    return {e.min - s, e.max - s};
}

double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

CertifiedExtremum singular_extremum(const Symbol& a0, cplx lambda, bool maximize, const ExtremizeOptions& options) {
    const Symbol a = shifted_by_lambda(a0, lambda);
    const GramSymbol g = gram_symbol(a);
    const double lip = a.lipschitz_bound();
    const double sign = maximize ? -1.0 : 1.0;
    CertifiedExtremum r;

    // sigma at theta, in minimisation orientation
    auto value = [&](double t) {
        const auto e = sigma_extremes(a.at(t));
        return sign * (maximize ? e.max : e.min);
    };
    // bound in minimisation orientation for the cell [m - h, m + h]
    auto bound = [&](double m, double h, double fm) {
        double b = fm - lip * h;
        if (g.curvature * h * h < 1.0) {
            const Matrix gm = g.at(m);
            const Matrix dg = g.derivative(m) * cplx(h, 0);
            const auto lo = hermitian_extremes(gm - dg);
            const auto hi = hermitian_extremes(gm + dg);
            const double rem = 0.5 * g.curvature * h * h;
            b = maximize ? std::max(b, -safe_sqrt(std::max(lo.max, hi.max) + rem))
                         : std::max(b, safe_sqrt(std::min(lo.min, hi.min) - rem));
        }
        return b;
    };

    if (lip <= 0) {
        r.value = sign * value(0.0);
        r.certified = true;
        r.evaluations = 1;
        return r;
    }

    struct Cell {
        double mid, half, f, lb;
        bool operator<(const Cell& o) const { return lb > o.lb; }  // min-heap on lb
    };
    const double two_pi = 2 * std::numbers::pi;
    const int n = std::max(options.grid, 1);
    std::priority_queue<Cell> heap;
    double best = INFINITY, best_t = 0;
    int evals = 0;
    auto add = [&](double m, double h) {
        const double f = value(m);
        ++evals;
        if (f < best) best = f, best_t = m;
        heap.push({m, h, f, bound(m, h, f)});
    };
    for (int j = 0; j < n; ++j) add(two_pi * (j + 0.5) / n, std::numbers::pi / n);

    double gap = 0;
    bool certified = false;
    while (!heap.empty()) {
        const Cell c = heap.top();
        gap = std::max(0.0, best - c.lb);
        if (gap <= options.tolerance) {
            certified = true;
            break;
        }
        if (evals + 2 > options.max_evaluations) break;
        heap.pop();
        add(c.mid - 0.5 * c.half, 0.5 * c.half);
        add(c.mid + 0.5 * c.half, 0.5 * c.half);
    }
    r.value = sign * best;
    r.theta = best_t;
    r.gap = gap;
    r.certified = certified;
    r.evaluations = evals;
    return r;
}

Symbol best_fold_symbol(const BandOperator& periodic) {
    const std::size_t q = common_period(periodic);
    Symbol best = fold_symbol(periodic);
    if (q == 1) return best;
    double best_k = gram_symbol(best).curvature, best_l = best.lipschitz_bound();
    for (Index r = 1; r < static_cast<Index>(q); ++r) {
        Symbol s = fold_symbol(shift_conjugate(periodic, r));
        const double k = gram_symbol(s).curvature, l = s.lipschitz_bound();
        if (k < best_k || (k == best_k && l < best_l)) {
            best = std::move(s);
            best_k = k;
            best_l = l;
        }
    }
    return best;
}

namespace {

void require_l2(const BandOperator& a, const char* what) {
    if (a.exponent() != Exponent::two)
        throw UnsupportedError(fmt::format("{} is only available for p = 2", what));
}

}  // namespace

CertifiedExtremum laurent_norm_certified(const BandOperator& periodic, const ExtremizeOptions& options) {
    require_l2(periodic, "laurent_norm");
    return singular_extremum(best_fold_symbol(periodic), 0.0, true, options);
}

CertifiedExtremum laurent_resolvent_certified(const BandOperator& periodic, cplx lambda,
                                              const ExtremizeOptions& options) {
    require_l2(periodic, "laurent_resolvent_recip");
    return singular_extremum(best_fold_symbol(periodic), lambda, false, options);
}

double laurent_norm(const BandOperator& periodic, const ExtremizeOptions& options) {
    return laurent_norm_certified(periodic, options).value;
}

double laurent_lower_norm(const BandOperator& periodic, const ExtremizeOptions& options) {
    return laurent_resolvent_certified(periodic, 0.0, options).value;
}

double laurent_resolvent_recip(const BandOperator& periodic, cplx lambda, const ExtremizeOptions& options) {
    return laurent_resolvent_certified(periodic, lambda, options).value;
}

double laurent_norm(const LimitOperator& l, const ExtremizeOptions& options) {
    return laurent_norm(l.op, options);
}

double laurent_lower_norm(const LimitOperator& l, const ExtremizeOptions& options) {
    return laurent_lower_norm(l.op, options);
}

double laurent_resolvent_recip(const LimitOperator& l, cplx lambda, const ExtremizeOptions& options) {
    return laurent_resolvent_recip(l.op, lambda, options);
}

}  // namespace bandop
