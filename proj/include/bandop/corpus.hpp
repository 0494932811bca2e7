#pragma once

// Reference operators used by the tests, the acceptance suite and `bandop corpus`.

#include <cstdint>
#include <string>
#include <vector>

#include "bandop/operator.hpp"

namespace bandop::corpus {

/// diag(..., B, B, 1, B, B, ...) with B = [[mu, 1], [1, mu]] and the single 1
/// at (0, 0); the B-pairs sit on (2k+1, 2k+2) for k >= 0 and (-2k-2, -2k-1).
BandOperator example5(double mu);

BandOperator bilateral_shift();
/// V_1 + 0.5 V_{-1}, symbol e^{i theta} + 0.5 e^{-i theta}.
BandOperator shift_pair();
/// Multiplication by 1/(1+|k|) for |k| <= radius, zero beyond.
BandOperator decaying_multiplication(Index radius = 40);
/// Period-2 operator with alternating diagonal and coupling.
BandOperator period_two();
/// Different left and right tails joined through a core.
BandOperator mixed_tails();
/// 2x2-block Laurent operator.
BandOperator block_laurent();
/// Eventually periodic operator with random core and tails.
BandOperator random_eventually_periodic(std::uint64_t seed, Index bandwidth = 2, std::size_t block_dim = 1,
                                        Index core_radius = 3, std::size_t max_period = 3);
/// Band operator with seeded-random diagonals on offsets -w..w.
BandOperator seeded_random_band(std::uint64_t seed, Index bandwidth, std::size_t block_dim,
                                Exponent p = Exponent::two, double bound = 1.0);

struct Named {
    std::string name;
    BandOperator op;
};

/// The ten eventually periodic operators of the reference corpus.
std::vector<Named> eventually_periodic_corpus(std::uint64_t seed = 7);

}  // namespace bandop::corpus
