#include <doctest.h>

#include <cmath>
#include <random>

#include "bandop/corpus.hpp"
#include "bandop/errors.hpp"
#include "bandop/norms.hpp"
#include "oracles.hpp"

using namespace bandop;

namespace {

BandOperator with_exponent(const BandOperator& a, Exponent p) { return BandOperator(a.block_dim(), p, a.diagonals()); }

// max over rows i in [-r, r] of sum_j ||a_ij||-entries, straight from entry().
double brute_row_sum(const BandOperator& a, Index r) {
    double best = 0;
    const std::size_t d = a.block_dim();
    for (Index i = -r; i <= r; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0;
            for (Index j = i - a.bandwidth(); j <= i + a.bandwidth(); ++j) {
                const Matrix e = a.entry(i, j);
                for (std::size_t t = 0; t < d; ++t) s += std::abs(e(c, t));
            }
            best = std::max(best, s);
        }
    return best;
}

double brute_col_sum(const BandOperator& a, Index r) {
    double best = 0;
    const std::size_t d = a.block_dim();
    for (Index j = -r; j <= r; ++j)
        for (std::size_t t = 0; t < d; ++t) {
            double s = 0;
            for (Index i = j - a.bandwidth(); i <= j + a.bandwidth(); ++i) {
                const Matrix e = a.entry(i, j);
                for (std::size_t c = 0; c < d; ++c) s += std::abs(e(c, t));
            }
            best = std::max(best, s);
        }
    return best;
}

}  // namespace

TEST_CASE("operator norms with closed forms") {
    CHECK(op_norm(BandOperator::zero(1)).value == 0.0);
    CHECK(op_norm(BandOperator::identity(2)).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(op_norm(corpus::bilateral_shift()).value == doctest::Approx(1.0).epsilon(1e-12));
    // sup |e^{it} + 0.5 e^{-it}| = 1.5
    CHECK(std::abs(op_norm(corpus::shift_pair()).value - 1.5) <= 1e-8);
    // blocks [[mu, 1], [1, mu]] have singular values 1 + mu and 1 - mu
    for (double m : {0.1, 0.25, 0.9}) CHECK(std::abs(op_norm(corpus::example5(m)).value - (1 + m)) <= 1e-12);
    CHECK(std::abs(op_norm(corpus::decaying_multiplication()).value - 1.0) <= 1e-12);
}

TEST_CASE("isolated eigenvalues beyond the tail symbols") {
    // L = V_1 + V_-1 has spectrum [-2, 2]; a point potential v at 0 adds the
    // eigenvalue sign(v) sqrt(4 + v^2), whose eigenvector decays like |v|^|i|
    auto laplacian_plus = [](double shift, double v) {
        EventuallyPeriodicLaw core;
        core.radius = 0;
        core.core = {Matrix::scalar(1, shift + v)};
        core.left_tail = PeriodicSequence{{Matrix::scalar(1, shift)}, 0};
        core.right_tail = PeriodicSequence{{Matrix::scalar(1, shift)}, 0};
        return BandOperator(1, Exponent::two,
                            {{-1, ConstantLaw{Matrix::scalar(1, 1.0)}}, {0, core}, {1, ConstantLaw{Matrix::scalar(1, 1.0)}}});
    };
    // weakly bound: a window of a few hundred sites is still 1e-5 short
    const auto weak = op_norm(laplacian_plus(0, 0.02));
    CHECK(weak.converged);
    CHECK(std::abs(weak.value - std::sqrt(4.0004)) <= 1e-12);
    CHECK(std::abs(op_norm(laplacian_plus(0, -1.5)).value - 2.5) <= 1e-12);
    // spectrum [1, 5] plus 3 - sqrt(4.25) below it
    CHECK(std::abs(lower_norm(laplacian_plus(3, -0.5)).value - (3 - std::sqrt(4.25))) <= 1e-12);
    CHECK(std::abs(lower_norm(laplacian_plus(3, 0.5)).value - 1.0) <= 1e-8);
}

TEST_CASE("lower norm at a kernel") {
    // mixed_tails has a kernel vector: a 161-site window already sees it
    const BandOperator a = corpus::mixed_tails();
    const double window = sigma_min(window_compression(a, {-80, 80}).matrix);
    REQUIRE(window <= 1e-12);
    const auto nu = lower_norm(a);
    CHECK(nu.converged);
    CHECK(nu.value - nu.cauchy_gap <= window);
    CHECK(nu.value <= 1e-8);
}

TEST_CASE("operator norm against dense windows and sampled tail symbols") {
    for (const auto& n : corpus::eventually_periodic_corpus()) {
        CAPTURE(n.name);
        const auto v = op_norm(n.op);
        CHECK(v.converged);
        // column windows are lower bounds converging to ||A||; far-out mass
        // is governed by the tail symbols, sampled densely here
        const double window = sigma_max(window_compression(n.op, {-150, 150}).matrix);
        double sampled = 0;
        for (Side side : {Side::left, Side::right}) {
            const BandOperator t = tail_operator(n.op, side);
            if (t.is_zero()) continue;
            const Symbol sym = fold_symbol(t);
            for (int k = 0; k < 20000; ++k)
                sampled = std::max(sampled, singular_values(sym.at(-M_PI + 2 * M_PI * k / 20000.0)).front());
        }
        CHECK(window <= v.value + 1e-9);
        CHECK(sampled <= v.value + 1e-9);
        CHECK(v.value - std::max(window, sampled) <= 1e-6);
    }
}

TEST_CASE("p = 1 and p = inf norms are exact column and row sums") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BandOperator base = corpus::random_eventually_periodic(seed, 1 + Index(seed % 3), 1 + seed % 2, 3, 3);
        const BandOperator inf = with_exponent(base, Exponent::infinity);
        const BandOperator one = with_exponent(base, Exponent::one);
        CHECK(std::abs(op_norm(inf).value - brute_row_sum(inf, 40)) <= 1e-12);
        CHECK(std::abs(op_norm(one).value - brute_col_sum(one, 40)) <= 1e-12);
    }
}

TEST_CASE("localized norm: exact for p = inf at D = 2w + 1, non-decreasing in D") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Index w = 1 + Index(seed % 3);
        const BandOperator a =
            with_exponent(corpus::random_eventually_periodic(seed, w, 1 + seed % 2, 2, 3), Exponent::infinity);
        CHECK(localization_window(w, 0.1, Exponent::infinity) == 2 * w + 1);
        CHECK(std::abs(norm_localized(a, 2 * w + 1) - brute_row_sum(a, 40)) <= 1e-12);
    }
    const BandOperator a = corpus::mixed_tails();
    double prev = 0;
    for (Index d = 1; d <= 30; ++d) {
        const double v = norm_localized(a, d);
        CHECK(v >= prev - 1e-12);
        CHECK(v <= op_norm(a).value + 1e-9);
        prev = v;
    }
}

TEST_CASE("localization window formula") {
    // 4w / D < (delta / 4)^2: w = 1, delta = 0.1 gives D > 6400
    CHECK(localization_window(1, 0.1, Exponent::two) == 6401);
    CHECK(localization_window(3, 0.1, Exponent::two) == 19201);
    // p = 1: 4w / D < delta / 4
    CHECK(localization_window(2, 0.5, Exponent::one) == 65);
    CHECK_THROWS_AS(localization_window(1, 1.5, Exponent::two), std::invalid_argument);
}

TEST_CASE("essential norm: two routes agree and stay below the norm") {
    for (const auto& n : corpus::eventually_periodic_corpus()) {
        CAPTURE(n.name);
        const auto q = essential_norm_q(n.op);
        CHECK(q.converged);
        CHECK(std::abs(q.value - essential_norm_via_limops(n.op)) <= 1e-6);
        CHECK(q.value <= op_norm(n.op).value + 1e-9);
    }
    CHECK(essential_norm_q(corpus::decaying_multiplication()).value == 0.0);
    CHECK(std::abs(essential_norm_q(corpus::example5(0.25)).value - 1.25) <= 1e-12);
}

TEST_CASE("lower norms with closed forms") {
    CHECK(std::abs(lower_norm(corpus::bilateral_shift()).value - 1.0) <= 1e-12);
    CHECK(std::abs(lower_norm(corpus::shift_pair()).value - 0.5) <= 1e-8);
    CHECK(std::abs(lower_norm(corpus::example5(0.25)).value - 0.75) <= 1e-12);
    CHECK(lower_norm(corpus::decaying_multiplication()).value <= 1e-12);
    CHECK(std::abs(mu(corpus::example5(0.25)).value - 0.75) <= 1e-12);
    CHECK(std::abs(mu(corpus::example5(0.6)).value - 0.4) <= 1e-12);
    // the zero tails make mu vanish even though the core is invertible
    CHECK(mu(corpus::decaying_multiplication()).value == 0.0);
}

TEST_CASE("inverse norms of A and A* coincide") {
    for (const auto& n : corpus::eventually_periodic_corpus()) {
        CAPTURE(n.name);
        const auto a = inverse_norm_recip_detail(n.op);
        const auto b = inverse_norm_recip_detail(adjoint(n.op));
        CHECK(std::abs(a.value - b.value) <= 1e-8);
    }
    CHECK(std::abs(inverse_norm_recip(corpus::example5(0.25)) - 0.75) <= 1e-12);
}

TEST_CASE("compression sequence for mu~ is monotone and bounded by mu~") {
    const BandOperator a = corpus::mixed_tails();
    const double mt = mu_tilde(a).value;
    for (Index d : {3, 8}) {
        double prev = 0;
        for (Index m = 0; m <= 8; ++m) {
            const double v = compression_lower_norm(a, m, d);
            CHECK(v >= prev - 1e-12);
            if (m >= 2 + a.bandwidth()) CHECK(v >= mt - 1e-9);
            prev = v;
        }
    }
    CHECK(compression_lower_norm(a, 10, 200) - mt <= 1e-3);
}

TEST_CASE("mu via Gram operators") {
    for (const auto& n : corpus::eventually_periodic_corpus()) {
        CAPTURE(n.name);
        const BandOperator as = adjoint(n.op);
        const double lhs =
            std::min(std::sqrt(mu_tilde(compose(n.op, as)).value), std::sqrt(mu_tilde(compose(as, n.op)).value));
        CHECK(std::abs(lhs - mu(n.op).value) <= 1e-6);
    }
}

TEST_CASE("direct sums") {
    const auto corpus = corpus::eventually_periodic_corpus();
    for (std::size_t k = 0; k + 1 < corpus.size(); ++k) {
        const BandOperator& a = corpus[k].op;
        const BandOperator& b = corpus[k + 1].op;
        CAPTURE(corpus[k].name);
        const BandOperator s = direct_sum(a, b);
        CHECK(std::abs(op_norm(s).value - std::max(op_norm(a).value, op_norm(b).value)) <= 1e-8);
        CHECK(std::abs(lower_norm(s).value - std::min(lower_norm(a).value, lower_norm(b).value)) <= 1e-8);
        CHECK(std::abs(essential_norm_q(s).value -
                       std::max(essential_norm_q(a).value, essential_norm_q(b).value)) <= 1e-6);
        CHECK(std::abs(mu(s).value - std::min(mu(a).value, mu(b).value)) <= 1e-6);
    }
}

TEST_CASE("resolvent routes agree") {
    const BandOperator a = corpus::mixed_tails();
    for (cplx lambda : {cplx(0.3, 0.2), cplx(-1, 0.5), cplx(1.5, -1)}) {
        const auto r = essential_resolvent_recip(a, lambda);
        CHECK(r.discrepancy <= 1e-6);
        // constrained infima dominate global ones
        CHECK(r.mu_route >= inverse_norm_recip_detail(subtract_scalar(a, lambda)).value - 1e-6);
    }
}

TEST_CASE("unsupported inputs") {
    CHECK_THROWS_AS(lower_norm(with_exponent(corpus::shift_pair(), Exponent::one)), UnsupportedError);
    CHECK_THROWS_AS(mu(with_exponent(corpus::shift_pair(), Exponent::infinity)), UnsupportedError);
    CHECK_THROWS_AS(op_norm(corpus::seeded_random_band(1, 1, 1)), UnsupportedError);
    CHECK_THROWS_AS(norm_localized(corpus::shift_pair(), 5000), UnsupportedError);
    CHECK_THROWS_AS(op_norm(corpus::shift_pair(), -1.0), std::invalid_argument);
}
