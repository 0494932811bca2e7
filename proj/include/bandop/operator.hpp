#pragma once

// Band operators on l^p(Z, C^d).
//
// An operator is a finite sum of diagonals a_alpha V_alpha. The diagonal with
// offset alpha stores the sequence a_alpha(i) and contributes the block
//
//     entry(i, i - alpha) = a_alpha(i),
//
// so V_1 (offset 1, value 1) maps x to y with y_{i+1} = x_i.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bandop/linalg.hpp"

namespace bandop {

using Index = std::int64_t;

enum class Side { left, right };

/// Euclidean remainder: result in [0, q).
inline Index floor_mod(Index k, Index q) {
    const Index r = k % q;
    return r < 0 ? r + q : r;
}

/// One period of a periodic sequence; values[0] sits at position `phase` (mod q).
struct PeriodicSequence {
    std::vector<Matrix> values;
    Index phase = 0;

    std::size_t period() const noexcept { return values.size(); }
    const Matrix& at(Index k) const {
        return values[static_cast<std::size_t>(floor_mod(k - phase, static_cast<Index>(values.size())))];
    }
};

struct ConstantLaw {
    Matrix value;
};

struct PeriodicLaw {
    PeriodicSequence sequence;
};

/// core[k + radius] for |k| <= radius; left_tail for k < -radius and
/// right_tail for k > radius.
struct EventuallyPeriodicLaw {
    Index radius = 0;
    std::vector<Matrix> core;
    PeriodicSequence left_tail;
    PeriodicSequence right_tail;
};

/// Deterministic pseudo-random real entries in [-bound, bound]; see seeded_uniform().
struct SeededRandomLaw {
    double bound = 1.0;
    std::uint64_t seed = 0;
};

/// Lazily evaluated sequence produced by algebra on operators outside the
/// eventually periodic class. Not serialisable.
struct GeneratedLaw {
    std::shared_ptr<const std::function<Matrix(Index)>> fn;
};

using DiagonalLaw =
    std::variant<ConstantLaw, PeriodicLaw, EventuallyPeriodicLaw, SeededRandomLaw, GeneratedLaw>;

struct DiagonalSymbol {
    Index offset = 0;
    DiagonalLaw law;
};

/// splitmix64 finaliser applied to seed + golden-ratio increments.
std::uint64_t splitmix64(std::uint64_t state);
/// Uniform double in [0, 1) for (seed, position, row, col) of a block.
double seeded_uniform(std::uint64_t seed, Index position, std::size_t row, std::size_t col,
                      std::size_t block_dim);

Matrix evaluate(const DiagonalLaw& law, Index position, std::size_t block_dim);
bool is_eventually_periodic(const DiagonalLaw& law);
/// Normal form of a Constant/Periodic/EventuallyPeriodic law. Throws UnsupportedError otherwise.
EventuallyPeriodicLaw to_eventually_periodic(const DiagonalLaw& law);
/// Smallest equivalent law: minimal tail periods and core, Periodic/Constant when possible.
DiagonalLaw simplify(EventuallyPeriodicLaw law);
/// True when the law is identically zero (only decidable for the periodic classes).
bool is_zero_law(const DiagonalLaw& law);

/// Core radius and tail periods shared by all diagonals of an eventually periodic operator.
struct EpStructure {
    Index core_radius = 0;
    std::size_t left_period = 1;
    std::size_t right_period = 1;
};

class BandOperator {
public:
    /// Validates block sizes, finiteness, and distinct offsets; diagonals are sorted by offset.
    BandOperator(std::size_t block_dim, Exponent exponent, std::vector<DiagonalSymbol> diagonals);

    static BandOperator zero(std::size_t block_dim, Exponent p = Exponent::two);
    static BandOperator identity(std::size_t block_dim, Exponent p = Exponent::two);
    static BandOperator scalar(std::size_t block_dim, cplx value, Exponent p = Exponent::two);
    /// V_k: (V_k x)_{i+k} = x_i.
    static BandOperator shift(Index k, std::size_t block_dim = 1, Exponent p = Exponent::two);

    std::size_t block_dim() const noexcept { return block_dim_; }
    Exponent exponent() const noexcept { return exponent_; }
    const std::vector<DiagonalSymbol>& diagonals() const noexcept { return diagonals_; }
    std::vector<Index> offsets() const;
    /// max |offset|; 0 for the zero operator.
    Index bandwidth() const noexcept { return bandwidth_; }
    bool is_zero() const;

    const DiagonalSymbol* diagonal(Index offset) const;
    Matrix entry(Index i, Index j) const;

    bool is_eventually_periodic() const;
    /// Throws UnsupportedError for seeded-random or generated diagonals.
    EpStructure structure() const;

private:
    std::size_t block_dim_;
    Exponent exponent_;
    std::vector<DiagonalSymbol> diagonals_;
    Index bandwidth_ = 0;
};

/// Finitely supported vector x with supp x in [start, start + length).
struct WindowVector {
    Index start = 0;
    std::size_t block_dim = 1;
    Vector data;  // length * block_dim scalars, block-major

    std::size_t length() const noexcept { return block_dim == 0 ? 0 : data.size() / block_dim; }
    Index end() const noexcept { return start + static_cast<Index>(length()); }
    double norm(Exponent p) const { return vector_p_norm(data, p); }
    cplx at(Index position, std::size_t component) const;
};

/// Closed integer interval [lo, hi]; empty when hi < lo.
struct Interval {
    Index lo = 0;
    Index hi = -1;

    Index size() const noexcept { return hi < lo ? 0 : hi - lo + 1; }
    bool contains(Index k) const noexcept { return lo <= k && k <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Dense compression of an operator to rows x cols.
struct WindowCompression {
    Interval rows;
    Interval cols;
    Matrix matrix;
};

WindowVector apply(const BandOperator& a, const WindowVector& x);
BandOperator adjoint(const BandOperator& a);
BandOperator add(const BandOperator& a, const BandOperator& b);
BandOperator compose(const BandOperator& a, const BandOperator& b);
BandOperator scale(const BandOperator& a, cplx factor);
/// A - lambda I.
BandOperator subtract_scalar(const BandOperator& a, cplx lambda);
/// V_{-k} A V_k, i.e. result.entry(i, j) = a.entry(i + k, j + k).
BandOperator shift_conjugate(const BandOperator& a, Index k);
BandOperator direct_sum(const BandOperator& a, const BandOperator& b);

/// P_n A P_n as a dense (2n+1)d square matrix on [-n, n].
Matrix truncate(const BandOperator& a, Index n);
/// A Q_m: columns in [-m, m] set to zero.
BandOperator column_truncate(const BandOperator& a, Index m);
/// A chi_F for a finite set F; the result has zero tails.
BandOperator column_restrict(const BandOperator& a, std::span<const Index> columns);

/// Dense matrix of the entries on rows x cols.
Matrix window_matrix(const BandOperator& a, Interval rows, Interval cols);
/// Compression to columns `cols` with rows `cols` expanded by the band-width,
/// so that A (chi_cols x) is captured entirely.
WindowCompression window_compression(const BandOperator& a, Interval cols);

/// Purely periodic operator agreeing with A on the rows beyond its core on `side`.
BandOperator tail_operator(const BandOperator& a, Side side);

/// Exact entrywise equality of two eventually periodic operators.
bool entrywise_equal(const BandOperator& a, const BandOperator& b);

/// Builds an operator from an entry function. With `structure`, f must be
/// periodic in the rows beyond +-core_radius and the result is tabulated into
/// eventually periodic diagonals; without it, the diagonals are generated lazily.
using EntryFunction = std::function<Matrix(Index, Index)>;
BandOperator derive(std::size_t block_dim, Exponent p, std::vector<Index> offsets,
                    const EntryFunction& f, std::optional<EpStructure> structure);

std::size_t lcm_period(std::size_t a, std::size_t b);

}  // namespace bandop
