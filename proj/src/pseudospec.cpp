#include "bandop/pseudospec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

cplx PseudospectrumGrid::node(int ix, int iy) const { return {box.re0 + ix * dx(), box.im0 + iy * dy()}; }

double PseudospectrumGrid::dx() const { return nx > 1 ? (box.re1 - box.re0) / (nx - 1) : 0.0; }

double PseudospectrumGrid::dy() const { return ny > 1 ? (box.im1 - box.im0) / (ny - 1) : 0.0; }

unsigned default_jobs() {
    if (const char* env = std::getenv("BANDOP_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
    if (jobs == 0) jobs = default_jobs();
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

void check_grid(int nx, int ny, const Box& box) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one node per axis");
    if (!(box.re0 <= box.re1 && box.im0 <= box.im1)) throw std::invalid_argument("empty box");
}

ExtremizeOptions grid_symbol_options(double tol) {
    ExtremizeOptions o;
    o.grid = 64;
    o.tolerance = tol;
    return o;
}

}  // namespace

PseudospectrumGrid pseudospectrum_grid(const BandOperator& a, const Box& box, int nx, int ny, double tol,
                                       unsigned jobs) {
    check_grid(nx, ny, box);
    if (a.exponent() != Exponent::two) throw UnsupportedError("pseudospectra are only available for p = 2");
    PseudospectrumGrid g{box, nx, ny, GridKind::plain, {}, {}, 0, 0};
    g.values.assign(static_cast<std::size_t>(nx * ny), 0.0);
    std::vector<char> converged(g.values.size(), 1);
    const auto opts = grid_symbol_options(tol);
    parallel_for(g.values.size(), jobs, [&](std::size_t k) {
        const int ix = static_cast<int>(k) / ny;
        const int iy = static_cast<int>(k) % ny;
        const auto v = inverse_norm_recip_detail(subtract_scalar(a, g.node(ix, iy)), tol, opts);
        g.values[k] = v.value;
        converged[k] = v.converged;
    });
    g.unconverged_nodes = static_cast<int>(std::count(converged.begin(), converged.end(), 0));
    return g;
}

PseudospectrumGrid essential_pseudospectrum_grid(const BandOperator& a, const Box& box, int nx, int ny,
                                                 double tol, EssentialMethod method, unsigned jobs) {
    check_grid(nx, ny, box);
    if (a.exponent() != Exponent::two) throw UnsupportedError("pseudospectra are only available for p = 2");
    PseudospectrumGrid g{box, nx, ny, GridKind::essential, {}, {}, 0, 0};
    const std::size_t n = static_cast<std::size_t>(nx * ny);
    g.values.assign(n, 0.0);
    if (method == EssentialMethod::both) g.alt_values.assign(n, 0.0);
    const auto opts = grid_symbol_options(tol);
    const auto spectrum = operator_spectrum(a);
    auto limitops_value = [&](cplx lambda) {
        double v = INFINITY;
        for (const auto& l : spectrum) v = std::min(v, laurent_resolvent_recip(l, lambda, opts));
        return v;
    };
    parallel_for(n, jobs, [&](std::size_t k) {
        const cplx lambda = g.node(static_cast<int>(k) / ny, static_cast<int>(k) % ny);
        switch (method) {
            case EssentialMethod::mu: g.values[k] = mu(subtract_scalar(a, lambda), tol, opts).value; break;
            case EssentialMethod::limitops: g.values[k] = limitops_value(lambda); break;
            case EssentialMethod::both:
                g.values[k] = mu(subtract_scalar(a, lambda), tol, opts).value;
                g.alt_values[k] = limitops_value(lambda);
                break;
        }
    });
    for (std::size_t k = 0; k < g.alt_values.size(); ++k)
        g.max_discrepancy = std::max(g.max_discrepancy, std::abs(g.values[k] - g.alt_values[k]));
    return g;
}

std::vector<GridNode> level_set(const PseudospectrumGrid& g, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("level_set: eps must be positive");
    std::vector<GridNode> out;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            if (g.value(ix, iy) < eps) out.push_back({ix, iy});
    return out;
}

HausdorffReport hausdorff_gap(const PseudospectrumGrid& g, const std::vector<double>& eps_list, double tol) {
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1])) throw std::invalid_argument("hausdorff_gap: eps_list must decrease");
    HausdorffReport r;
    r.cell_diagonal = std::hypot(g.dx(), g.dy());
    std::vector<cplx> zero;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            if (g.value(ix, iy) <= tol) zero.push_back(g.node(ix, iy));
    auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
        double worst = 0;
        for (const auto& p : from) {
            double best = INFINITY;
            for (const auto& q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    for (double eps : eps_list) {
        std::vector<cplx> level;
        for (const auto& n : level_set(g, eps)) level.push_back(g.node(n.ix, n.iy));
        if (level.empty() || zero.empty()) {
            r.distances.push_back(NAN);
            r.defined.push_back(false);
            continue;
        }
        r.distances.push_back(std::max(directed(level, zero), directed(zero, level)));
        r.defined.push_back(true);
    }
    return r;
}

namespace {

constexpr Index kWitnessMaxScalars = 512;

struct Candidate {
    Interval cols;
    bool left = false;
    Vector vector;  // right singular vector for sigma_min
};

std::optional<Candidate> try_window(const BandOperator& b, Interval cols, double eps, bool left) {
    const Matrix m = window_compression(b, cols).matrix;
    const auto s = svd(m);
    const std::size_t k = s.singular_values.size() - 1;
    if (!(s.singular_values[k] < eps)) return std::nullopt;
    Candidate c{cols, left, Vector(m.cols())};
    for (std::size_t r = 0; r < m.cols(); ++r) c.vector[r] = s.right_vectors(r, k);
    return c;
}

// Centred windows first, then windows reaching into each tail; every window
// is tried for B and for B*.
std::optional<Candidate> find_window(const BandOperator& b, const BandOperator& bstar, double eps) {
    const auto st = b.structure();
    const Index w = b.bandwidth();
    const auto d = static_cast<Index>(b.block_dim());
    const Index m0 = st.core_radius + w;
    const auto step = static_cast<Index>(std::max(st.left_period, st.right_period));
    auto both = [&](Interval cols) {
        auto c = try_window(b, cols, eps, false);
        return c ? c : try_window(bstar, cols, eps, true);
    };
    for (Index r = m0; (2 * r + 1) * d <= kWitnessMaxScalars / 4; r += step)
        if (auto c = both({-r, r})) return c;
    for (Index len = std::max<Index>(4, step); len * d <= kWitnessMaxScalars; len *= 2) {
        for (Index shift = 0; shift < static_cast<Index>(st.right_period); ++shift) {
            const Index s = m0 + 1 + shift;
            if (auto c = both({s, s + len - 1})) return c;
        }
        for (Index shift = 0; shift < static_cast<Index>(st.left_period); ++shift) {
            const Index e = -m0 - 1 - shift;
            if (auto c = both({e - len + 1, e})) return c;
        }
        const Index r = len / 2;
        if ((2 * r + 1) * d > kWitnessMaxScalars / 4)
            if (auto c = both({-r, r})) return c;
    }
    return std::nullopt;
}

WindowVector to_window(Index start, std::size_t d, Vector data) { return {start, d, std::move(data)}; }

}  // namespace

PerturbationWitness witness_perturbation(const BandOperator& a, cplx lambda, double eps, double tol) {
    if (a.exponent() != Exponent::two) throw UnsupportedError("witnesses are only available for p = 2");
    if (!(eps > 0)) throw std::invalid_argument("witness_perturbation: eps must be positive");
    const BandOperator b = subtract_scalar(a, lambda);
    const BandOperator bstar = adjoint(b);
    // a window with sigma_min < eps already certifies the precondition
    const auto found = find_window(b, bstar, eps);
    if (!found) {
        const auto x = lower_norm(b);
        const auto y = lower_norm(bstar);
        const double recip = std::min(x.value, y.value);
        if (!(recip < eps) && x.converged && y.converged)
            throw PreconditionError(fmt::format(
                "lambda = {}{:+}i is not in the {}-pseudospectrum (||(A - lambda)^-1||^-1 = {})", lambda.real(),
                lambda.imag(), eps, recip));
        throw ConvergenceError("no finitely supported witness found within the window budget", recip);
    }
    const bool left = found->left;

    const std::size_t d = a.block_dim();
    const BandOperator& op = left ? bstar : b;
    PerturbationWitness wt;
    wt.lambda = lambda;
    wt.epsilon = eps;
    wt.left_sided = left;
    wt.u = to_window(found->cols.lo, d, found->vector);
    wt.image = apply(op, wt.u);
    wt.k_norm = wt.image.norm(Exponent::two);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < wt.u.data.size(); ++k)
        if (std::abs(wt.u.data[k]) > std::abs(wt.u.data[arg])) arg = k;
    wt.functional_index = wt.u.start + static_cast<Index>(arg / d);
    const Index w = a.bandwidth();
    wt.verification_window = {found->cols.lo - 3 * w, found->cols.hi + 3 * w};
    wt.verification_sigma_min = sigma_min(witness_matrix(a, wt));
    if (!(wt.k_norm < eps) || !(wt.verification_sigma_min <= tol))
        throw ConvergenceError(
            fmt::format("witness check failed: ||K|| = {}, sigma_min = {}", wt.k_norm, wt.verification_sigma_min),
            wt.verification_sigma_min);
    return wt;
}

Matrix witness_matrix(const BandOperator& a, const PerturbationWitness& wt) {
    const Interval v = wt.verification_window;
    const std::size_t d = a.block_dim();
    Matrix m = window_matrix(subtract_scalar(a, wt.lambda), v, v);
    // K = -image u^H (right-sided) or -u image^H (left-sided)
    const WindowVector& rows = wt.left_sided ? wt.u : wt.image;
    const WindowVector& cols = wt.left_sided ? wt.image : wt.u;
    for (std::size_t r = 0; r < rows.data.size(); ++r) {
        const Index gi = rows.start + static_cast<Index>(r / d);
        if (!v.contains(gi)) continue;
        const std::size_t mr = static_cast<std::size_t>(gi - v.lo) * d + r % d;
        for (std::size_t c = 0; c < cols.data.size(); ++c) {
            const Index gj = cols.start + static_cast<Index>(c / d);
            if (!v.contains(gj)) continue;
            const std::size_t mc = static_cast<std::size_t>(gj - v.lo) * d + c % d;
            m(mr, mc) -= rows.data[r] * std::conj(cols.data[c]);
        }
    }
    return m;
}

}  // namespace bandop
