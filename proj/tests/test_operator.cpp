#include <doctest.h>

#include <random>

#include "bandop/corpus.hpp"
#include "bandop/errors.hpp"
#include "bandop/operator.hpp"
#include "oracles.hpp"

using namespace bandop;

namespace {

Matrix s(cplx v) { return Matrix::scalar(1, v); }

WindowVector random_vector(std::mt19937_64& rng, Index start, std::size_t len, std::size_t d) {
    std::normal_distribution<double> g;
    WindowVector x{start, d, Vector(len * d)};
    for (auto& z : x.data) z = cplx(g(rng), g(rng));
    return x;
}

cplx dot(const WindowVector& x, const WindowVector& y) {
    cplx r{};
    for (Index k = std::max(x.start, y.start); k < std::min(x.end(), y.end()); ++k)
        for (std::size_t c = 0; c < x.block_dim; ++c) r += std::conj(x.at(k, c)) * y.at(k, c);
    return r;
}

// Dense y = A x on an explicit index range, straight from entry().
cplx dense_apply_at(const BandOperator& a, const WindowVector& x, Index i, std::size_t c) {
    cplx r{};
    for (Index j = x.start; j < x.end(); ++j) {
        const Matrix e = a.entry(i, j);
        for (std::size_t t = 0; t < x.block_dim; ++t) r += e(c, t) * x.at(j, t);
    }
    return r;
}

std::vector<BandOperator> sample_operators() {
    std::vector<BandOperator> ops;
    for (const auto& n : corpus::eventually_periodic_corpus()) ops.push_back(n.op);
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
        ops.push_back(corpus::random_eventually_periodic(seed, 1 + Index(seed % 3), 1 + seed % 2, 2, 3));
    ops.push_back(corpus::seeded_random_band(11, 2, 2));
    return ops;
}

}  // namespace

TEST_CASE("entry convention of the shift") {
    const BandOperator v = BandOperator::shift(1);
    CHECK(v.entry(5, 4)(0, 0) == cplx(1));
    CHECK(v.entry(4, 5)(0, 0) == cplx(0));
    WindowVector x{0, 1, {1.0}};
    const WindowVector y = apply(v, x);
    CHECK(y.at(1, 0) == cplx(1));
    CHECK(y.at(0, 0) == cplx(0));
}

TEST_CASE("apply matches the dense entries and is linear") {
    std::mt19937_64 rng(10);
    for (const auto& a : sample_operators()) {
        const std::size_t d = a.block_dim();
        const auto x = random_vector(rng, -4, 9, d);
        const auto y = random_vector(rng, -2, 7, d);
        const auto ax = apply(a, x);
        for (Index i = ax.start; i < ax.end(); ++i)
            for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(ax.at(i, c) - dense_apply_at(a, x, i, c)) <= 1e-12);
        const cplx t(0.7, -0.2);
        WindowVector comb{-4, d, Vector(9 * d)};
        for (Index k = -4; k < 5; ++k)
            for (std::size_t c = 0; c < d; ++c) comb.data[std::size_t(k + 4) * d + c] = x.at(k, c) + t * y.at(k, c);
        const auto lhs = apply(a, comb);
        const auto ay = apply(a, y);
        for (Index i = lhs.start; i < lhs.end(); ++i)
            for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(lhs.at(i, c) - ax.at(i, c) - t * ay.at(i, c)) <= 1e-12);
    }
}

TEST_CASE("adjoint duality <Ax, y> = <x, A* y>") {
    std::mt19937_64 rng(11);
    for (const auto& a : sample_operators()) {
        const auto x = random_vector(rng, -7, 15, a.block_dim());
        const auto y = random_vector(rng, -3, 8, a.block_dim());
        CHECK(std::abs(dot(apply(a, x), y) - dot(x, apply(adjoint(a), y))) <= 1e-10);
    }
}

TEST_CASE("truncate equals the window matrix") {
    for (const auto& a : sample_operators())
        for (Index n : {0, 1, 4, 9}) {
            const Matrix t = truncate(a, n);
            const std::size_t d = a.block_dim();
            REQUIRE(t.rows() == std::size_t(2 * n + 1) * d);
            for (Index i = -n; i <= n; ++i)
                for (Index j = -n; j <= n; ++j) {
                    const Matrix e = a.entry(i, j);
                    for (std::size_t r = 0; r < d; ++r)
                        for (std::size_t c = 0; c < d; ++c)
                            CHECK(t(std::size_t(i + n) * d + r, std::size_t(j + n) * d + c) == e(r, c));
                }
        }
}

TEST_CASE("shift conjugation") {
    for (const auto& a : sample_operators()) {
        if (!a.is_eventually_periodic()) continue;
        for (Index k : {-3, 1, 5}) {
            const BandOperator b = shift_conjugate(a, k);
            CHECK(entrywise_equal(shift_conjugate(b, -k), a));
            for (Index i = -6; i <= 6; ++i) CHECK(b.entry(i, i - 1) == a.entry(i + k, i + k - 1));
        }
    }
}

TEST_CASE("band property on 1000 probes") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<Index> pos(-200, 200), gap(1, 40);
    for (const auto& a : sample_operators()) {
        const Index w = a.bandwidth();
        for (int k = 0; k < 1000; ++k) {
            const Index i = pos(rng);
            const Index j = i + (k % 2 ? 1 : -1) * (w + gap(rng));
            CHECK(a.entry(i, j).is_zero());
        }
    }
}

TEST_CASE("algebra against dense windows") {
    const auto ops = sample_operators();
    const Index n = 6;
    for (std::size_t p = 0; p + 1 < ops.size(); ++p) {
        const BandOperator& a = ops[p];
        const BandOperator& b = ops[p + 1];
        if (a.block_dim() != b.block_dim()) continue;
        const Interval box{-n, n};
        const Index reach = a.bandwidth() + b.bandwidth();
        const Interval mid{-n - reach, n + reach};
        const Matrix prod = oracle::naive_product(window_matrix(a, box, mid), window_matrix(b, mid, box));
        CHECK(oracle::max_abs_diff(window_matrix(compose(a, b), box, box), prod) <= 1e-12);
        const Matrix sum = window_matrix(a, box, box) + window_matrix(b, box, box);
        CHECK(oracle::max_abs_diff(window_matrix(add(a, b), box, box), sum) <= 1e-14);
        CHECK(oracle::max_abs_diff(window_matrix(adjoint(a), box, box),
                                   oracle::naive_adjoint(window_matrix(a, box, box))) == 0.0);
        const Matrix shifted = window_matrix(a, box, box) - Matrix::scalar(window_matrix(a, box, box).rows(), 2.0);
        CHECK(oracle::max_abs_diff(window_matrix(subtract_scalar(a, 2.0), box, box), shifted) <= 1e-14);
    }
}

TEST_CASE("products of eventually periodic operators stay eventually periodic") {
    const BandOperator a = corpus::mixed_tails();
    const BandOperator b = corpus::period_two();
    CHECK(compose(a, b).is_eventually_periodic());
    CHECK(add(a, scale(b, 2.0)).is_eventually_periodic());
    CHECK_FALSE(compose(a, corpus::seeded_random_band(3, 1, 1)).is_eventually_periodic());
}

TEST_CASE("direct sum is block diagonal") {
    const BandOperator a = corpus::shift_pair();
    const BandOperator b = corpus::example5(0.5);
    const BandOperator c = direct_sum(a, b);
    CHECK(c.block_dim() == 2);
    for (Index i = -4; i <= 4; ++i)
        for (Index j = i - 2; j <= i + 2; ++j) {
            const Matrix e = c.entry(i, j);
            CHECK(e(0, 0) == a.entry(i, j)(0, 0));
            CHECK(e(1, 1) == b.entry(i, j)(0, 0));
            CHECK(e(0, 1) == cplx(0));
            CHECK(e(1, 0) == cplx(0));
        }
    CHECK_THROWS_AS(add(a, c), DimensionMismatch);
}

TEST_CASE("column truncation and restriction") {
    const BandOperator a = corpus::mixed_tails();
    const BandOperator t = column_truncate(a, 3);
    for (Index i = -8; i <= 8; ++i)
        for (Index j = i - 1; j <= i + 1; ++j)
            CHECK(t.entry(i, j) == (std::abs(j) <= 3 ? Matrix(1, 1) : a.entry(i, j)));
    const std::vector<Index> cols{-2, 0, 5};
    const BandOperator r = column_restrict(a, cols);
    for (Index i = -8; i <= 8; ++i)
        for (Index j = i - 1; j <= i + 1; ++j) {
            const bool keep = j == -2 || j == 0 || j == 5;
            CHECK(r.entry(i, j) == (keep ? a.entry(i, j) : Matrix(1, 1)));
        }
}

TEST_CASE("tail operators agree with the operator far out") {
    const BandOperator a = corpus::mixed_tails();
    const BandOperator right = tail_operator(a, Side::right);
    const BandOperator left = tail_operator(a, Side::left);
    for (Index i = 5; i <= 20; ++i)
        for (Index j = i - 1; j <= i + 1; ++j) {
            CHECK(right.entry(i, j) == a.entry(i, j));
            CHECK(left.entry(-i, -j) == a.entry(-i, -j));
        }
}

TEST_CASE("simplify finds minimal periods and preserves values") {
    // position -2 already follows the left tail (value 6), position 2 the right one
    EventuallyPeriodicLaw law{2, {s(6), s(2), s(3), s(4), s(4)}, {{s(5), s(6), s(5), s(6)}, 1}, {{s(4), s(4)}, 0}};
    const DiagonalLaw simple = simplify(law);
    const auto ep = to_eventually_periodic(simple);
    CHECK(ep.right_tail.period() == 1);
    CHECK(ep.left_tail.period() == 2);
    CHECK(ep.radius == 1);
    for (Index k = -30; k <= 30; ++k) CHECK(evaluate(simple, k, 1) == evaluate(DiagonalLaw(law), k, 1));

    const DiagonalLaw constant = simplify(EventuallyPeriodicLaw{1, {s(2), s(2), s(2)}, {{s(2)}, 0}, {{s(2), s(2)}, 0}});
    CHECK(std::holds_alternative<ConstantLaw>(constant));
    CHECK(is_zero_law(simplify(EventuallyPeriodicLaw{0, {s(0)}, {{s(0)}, 0}, {{s(0)}, 0}})));
}

TEST_CASE("seeded random diagonals are deterministic and bounded") {
    const BandOperator a = corpus::seeded_random_band(99, 2, 2, Exponent::two, 0.5);
    const BandOperator b = corpus::seeded_random_band(99, 2, 2, Exponent::two, 0.5);
    const BandOperator c = corpus::seeded_random_band(100, 2, 2, Exponent::two, 0.5);
    bool differs = false;
    for (Index i = -50; i <= 50; ++i) {
        CHECK(a.entry(i, i + 1) == b.entry(i, i + 1));
        differs = differs || !(a.entry(i, i) == c.entry(i, i));
        const Matrix e = a.entry(i, i - 2);
        for (auto z : e.entries()) {
            CHECK(std::abs(z.real()) <= 0.5);
            CHECK(z.imag() == 0.0);
        }
    }
    CHECK(differs);
    CHECK_THROWS_AS(a.structure(), UnsupportedError);
    for (int k = 0; k < 100; ++k) {
        const double u = seeded_uniform(7, k - 50, 0, 1, 2);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("derive tabulates eventually periodic entry functions") {
    const BandOperator a = corpus::example5(0.3);
    const BandOperator b = derive(1, Exponent::two, {-1, 0, 1}, [&](Index i, Index j) { return a.entry(i, j); },
                                  EpStructure{1, 2, 2});
    CHECK(entrywise_equal(a, b));
    const BandOperator lazy = derive(1, Exponent::two, {0}, [](Index i, Index) { return s(double(i * i)); }, {});
    CHECK(lazy.entry(7, 7)(0, 0) == cplx(49));
    CHECK_FALSE(lazy.is_eventually_periodic());
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(BandOperator(1, Exponent::two, {{0, ConstantLaw{s(1)}}, {0, ConstantLaw{s(2)}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(BandOperator(2, Exponent::two, {{0, ConstantLaw{s(1)}}}), std::invalid_argument);
    CHECK_THROWS_AS(BandOperator(0, Exponent::two, {}), std::invalid_argument);
    CHECK_THROWS_AS(truncate(corpus::shift_pair(), -1), std::invalid_argument);
    CHECK(BandOperator::zero(1).is_zero());
    CHECK(BandOperator::zero(1).bandwidth() == 0);
}
