#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bandop/corpus.hpp"
#include "bandop/errors.hpp"
#include "bandop/pseudospec.hpp"

using namespace bandop;

namespace {

bool contains(const std::vector<GridNode>& set, GridNode n) { return std::find(set.begin(), set.end(), n) != set.end(); }

// Grid on which -0.75, 1 and 1.25 (the spectrum of example5 at mu = 0.25) are nodes.
const Box kAligned{-1.0, 1.5, -0.5, 0.5};

}  // namespace

TEST_CASE("grid geometry") {
    PseudospectrumGrid g = pseudospectrum_grid(corpus::bilateral_shift(), Box{-1, 1, 0, 2}, 3, 5, 1e-6, 1);
    CHECK(g.node(0, 0) == cplx(-1, 0));
    CHECK(g.node(2, 4) == cplx(1, 2));
    CHECK(g.dx() == doctest::Approx(1.0));
    CHECK(g.dy() == doctest::Approx(0.5));
    CHECK(g.values.size() == 15);
}

TEST_CASE("bilateral shift: reciprocal resolvent norm is the distance to the unit circle") {
    const auto g = pseudospectrum_grid(corpus::bilateral_shift(), Box{}, 21, 21, 1e-6, 0);
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) CHECK(std::abs(g.value(ix, iy) - std::abs(std::abs(g.node(ix, iy)) - 1.0)) <= 5e-3);
}

TEST_CASE("spectrum inclusion and level-set monotonicity") {
    const auto g = pseudospectrum_grid(corpus::example5(0.25), kAligned, 41, 17, 1e-6, 0);
    std::vector<GridNode> spectrum;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            if (g.value(ix, iy) <= 1e-6) spectrum.push_back({ix, iy});
    CHECK(spectrum.size() == 3);
    const double eps_list[] = {1e-5, 0.05, 0.1, 0.25, 0.5};
    for (double eps : eps_list)
        for (GridNode n : spectrum) CHECK(contains(level_set(g, eps), n));
    for (std::size_t k = 0; k + 1 < std::size(eps_list); ++k) {
        const auto small = level_set(g, eps_list[k]);
        const auto large = level_set(g, eps_list[k + 1]);
        for (GridNode n : small) CHECK(contains(large, n));
    }
}

TEST_CASE("Hausdorff distance to the spectrum shrinks with eps") {
    const auto g = pseudospectrum_grid(corpus::example5(0.25), kAligned, 41, 17, 1e-6, 0);
    const auto h = hausdorff_gap(g, {0.5, 0.25, 0.1});
    REQUIRE(h.distances.size() == 3);
    for (bool d : h.defined) CHECK(d);
    CHECK(h.distances[0] >= h.distances[1]);
    CHECK(h.distances[1] >= h.distances[2]);
    // a normal operator: sigma_eps is the eps-neighbourhood of the spectrum
    CHECK(h.distances[2] <= 0.1 + h.cell_diagonal);
    CHECK_THROWS_AS(hausdorff_gap(g, {0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("essential values dominate plain values") {
    const BandOperator a = corpus::mixed_tails();
    const Box box{-2, 2, -1.5, 1.5};
    const auto plain = pseudospectrum_grid(a, box, 9, 7, 1e-6, 0);
    const auto ess = essential_pseudospectrum_grid(a, box, 9, 7, 1e-6, EssentialMethod::both, 0);
    CHECK(ess.max_discrepancy <= 5e-3);
    for (std::size_t k = 0; k < plain.values.size(); ++k) CHECK(ess.values[k] >= plain.values[k] - 1e-6);
}

TEST_CASE("grids do not depend on the worker count") {
    const BandOperator a = corpus::period_two();
    const auto one = essential_pseudospectrum_grid(a, Box{}, 7, 6, 1e-6, EssentialMethod::both, 1);
    const auto many = essential_pseudospectrum_grid(a, Box{}, 7, 6, 1e-6, EssentialMethod::both, 4);
    CHECK(one.values == many.values);
    CHECK(one.alt_values == many.alt_values);
}

TEST_CASE("witnesses are sound") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5), margin(0.02, 0.3);
    int checked = 0;
    for (std::uint64_t k = 0; k < 12; ++k) {
        const BandOperator a = corpus::random_eventually_periodic(200 + k, 1 + Index(k % 2), 1 + k % 2, 2, 2);
        const cplx lambda(u(rng), u(rng));
        const double eps = inverse_norm_recip_detail(subtract_scalar(a, lambda)).value + margin(rng);
        const PerturbationWitness w = witness_perturbation(a, lambda, eps);
        CHECK(w.k_norm < eps);
        CHECK(w.verification_sigma_min <= 1e-8);
        CHECK(std::abs(w.u.norm(Exponent::two) - 1.0) <= 1e-12);
        // the perturbed operator annihilates u (or its adjoint does)
        const Matrix m = witness_matrix(a, w);
        CHECK(sigma_min(m) <= 1e-8);
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("witness preconditions") {
    // ||(V_1 - 0)^-1||^-1 = 1, so 0 is not in the 0.5-pseudospectrum
    CHECK_THROWS_AS(witness_perturbation(corpus::bilateral_shift(), 0.0, 0.5), PreconditionError);
    CHECK_THROWS_AS(witness_perturbation(corpus::bilateral_shift(), 0.0, -1.0), std::invalid_argument);
    const BandOperator inf(1, Exponent::infinity, {{1, ConstantLaw{Matrix::scalar(1, 1.0)}}});
    CHECK_THROWS_AS(witness_perturbation(inf, 0.0, 2.0), UnsupportedError);
    // on the unit circle every eps works
    const auto w = witness_perturbation(corpus::bilateral_shift(), cplx(0, 1), 0.05);
    CHECK(w.k_norm < 0.05);
}
