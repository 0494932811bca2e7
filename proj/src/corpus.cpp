#include "bandop/corpus.hpp"

#include <random>

namespace bandop::corpus {

namespace {

Matrix s(cplx v) { return Matrix::scalar(1, v); }

PeriodicSequence seq(std::vector<Matrix> values, Index phase = 0) { return {std::move(values), phase}; }

Matrix m2(cplx a, cplx b, cplx c, cplx d) { return Matrix(2, 2, {a, b, c, d}); }

}  // namespace

BandOperator example5(double mu) {
    // a_1(i) = 1 for even i >= 2 and odd i <= -1; a_{-1}(i) = 1 for odd i >= 1 and even i <= -2
    EventuallyPeriodicLaw sub{1, {s(1), s(0), s(0)}, seq({s(0), s(1)}), seq({s(1), s(0)})};
    EventuallyPeriodicLaw super{1, {s(0), s(0), s(1)}, seq({s(1), s(0)}), seq({s(0), s(1)})};
    EventuallyPeriodicLaw diag{0, {s(1)}, seq({s(mu)}), seq({s(mu)})};
    return BandOperator(1, Exponent::two,
                        {{-1, simplify(super)}, {0, simplify(diag)}, {1, simplify(sub)}});
}

BandOperator bilateral_shift() { return BandOperator::shift(1); }

BandOperator shift_pair() {
    return BandOperator(1, Exponent::two, {{1, ConstantLaw{s(1)}}, {-1, ConstantLaw{s(0.5)}}});
}

BandOperator decaying_multiplication(Index radius) {
    EventuallyPeriodicLaw law;
    law.radius = radius;
    for (Index k = -radius; k <= radius; ++k) law.core.push_back(s(1.0 / (1.0 + static_cast<double>(std::abs(k)))));
    law.left_tail = seq({s(0)});
    law.right_tail = seq({s(0)});
    return BandOperator(1, Exponent::two, {{0, law}});
}

BandOperator period_two() {
    return BandOperator(1, Exponent::two,
                        {{0, PeriodicLaw{seq({s(2), s(-1)})}},
                         {1, PeriodicLaw{seq({s(1), s(0.5)})}},
                         {-1, ConstantLaw{s(cplx(0, 0.3))}}});
}

BandOperator mixed_tails() {
    EventuallyPeriodicLaw diag{2,
                               {s(0.5), s(0.7), s(cplx(1, 1)), s(-0.4), s(1)},
                               seq({s(0.5)}),
                               seq({s(1), s(-1)}, 3)};
    EventuallyPeriodicLaw up{2, {s(1), s(0.2), s(0), s(0.3), s(0)}, seq({s(1)}), seq({s(0)})};
    EventuallyPeriodicLaw down{2, {s(0), s(0), s(0.6), s(0.5), s(0.5)}, seq({s(0)}), seq({s(0.5)})};
    return BandOperator(1, Exponent::two, {{1, up}, {0, diag}, {-1, down}});
}

BandOperator block_laurent() {
    return BandOperator(2, Exponent::two,
                        {{0, ConstantLaw{m2(1, 0.5, 0, -1)}},
                         {1, ConstantLaw{m2(0.3, 0, 0.2, cplx(0, 0.4))}},
                         {-1, ConstantLaw{m2(0, 0.1, 0.5, 0)}}});
}

BandOperator random_eventually_periodic(std::uint64_t seed, Index bandwidth, std::size_t block_dim,
                                        Index core_radius, std::size_t max_period) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> period(1, std::max<std::size_t>(max_period, 1));
    const std::size_t d = block_dim;
    auto block = [&] {
        Matrix m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = cplx(u(rng), u(rng));
        return m;
    };
    std::vector<DiagonalSymbol> diags;
    for (Index off = -bandwidth; off <= bandwidth; ++off) {
        EventuallyPeriodicLaw law;
        law.radius = core_radius;
        for (Index k = -core_radius; k <= core_radius; ++k) law.core.push_back(block());
        for (auto* tail : {&law.left_tail, &law.right_tail}) {
            const std::size_t q = period(rng);
            for (std::size_t k = 0; k < q; ++k) tail->values.push_back(block());
        }
        diags.push_back({off, simplify(std::move(law))});
    }
    return BandOperator(d, Exponent::two, std::move(diags));
}

BandOperator seeded_random_band(std::uint64_t seed, Index bandwidth, std::size_t block_dim, Exponent p,
                                double bound) {
    std::vector<DiagonalSymbol> diags;
    for (Index off = -bandwidth; off <= bandwidth; ++off)
        diags.push_back({off, SeededRandomLaw{bound, splitmix64(seed + static_cast<std::uint64_t>(off + 1000))}});
    return BandOperator(block_dim, p, std::move(diags));
}

std::vector<Named> eventually_periodic_corpus(std::uint64_t seed) {
    return {
        {"example5_mu0.25", example5(0.25)},
        {"example5_mu0.75", example5(0.75)},
        {"decaying_multiplication", decaying_multiplication()},
        {"bilateral_shift", bilateral_shift()},
        {"shift_pair", shift_pair()},
        {"identity", BandOperator::identity(1)},
        {"period_two", period_two()},
        {"mixed_tails", mixed_tails()},
        {"block_laurent", block_laurent()},
        {"random_eventually_periodic", random_eventually_periodic(seed)},
    };
}

}  // namespace bandop::corpus
