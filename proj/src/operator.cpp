#include "bandop/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

std::uint64_t splitmix64(std::uint64_t state) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double seeded_uniform(std::uint64_t seed, Index position, std::size_t row, std::size_t col,
                      std::size_t block_dim) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(position));
    h = splitmix64(h ^ static_cast<std::uint64_t>(row * block_dim + col));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool same_sequence(const PeriodicSequence& a, const PeriodicSequence& b) {
    if (a.period() != b.period()) return false;
    for (Index k = 0; k < static_cast<Index>(a.period()); ++k)
        if (!(a.at(k) == b.at(k))) return false;
    return true;
}

PeriodicSequence minimal_period(PeriodicSequence s) {
    const std::size_t q = s.period();
    for (std::size_t p = 1; p < q; ++p) {
        if (q % p != 0) continue;
        bool ok = true;
        for (std::size_t i = p; i < q && ok; ++i) ok = s.values[i] == s.values[i % p];
        if (ok) {
            s.values.resize(p);
            break;
        }
    }
    s.phase = floor_mod(s.phase, static_cast<Index>(s.period()));
    return s;
}

void check_block(const Matrix& m, std::size_t d, const char* what) {
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument(
            fmt::format("{}: block of shape {}x{}, expected {}x{}", what, m.rows(), m.cols(), d, d));
    if (!m.all_finite()) throw std::invalid_argument(fmt::format("{}: non-finite entry", what));
}

void check_sequence(const PeriodicSequence& s, std::size_t d, const char* what) {
    if (s.values.empty()) throw std::invalid_argument(fmt::format("{}: empty period", what));
    for (const auto& m : s.values) check_block(m, d, what);
}

void validate_law(const DiagonalLaw& law, std::size_t d) {
    std::visit(overloaded{
                   [&](const ConstantLaw& c) { check_block(c.value, d, "constant law"); },
                   [&](const PeriodicLaw& p) { check_sequence(p.sequence, d, "periodic law"); },
                   [&](const EventuallyPeriodicLaw& e) {
                       if (e.radius < 0)
                           throw std::invalid_argument("eventually periodic law: negative radius");
                       if (e.core.size() != static_cast<std::size_t>(2 * e.radius + 1))
                           throw std::invalid_argument(
                               "eventually periodic law: core must hold 2*radius+1 blocks");
                       for (const auto& m : e.core) check_block(m, d, "eventually periodic core");
                       check_sequence(e.left_tail, d, "left tail");
                       check_sequence(e.right_tail, d, "right tail");
                   },
                   [&](const SeededRandomLaw& r) {
                       if (!std::isfinite(r.bound) || r.bound < 0)
                           throw std::invalid_argument("seeded random law: bound must be >= 0");
                   },
                   [&](const GeneratedLaw& g) {
                       if (!g.fn) throw std::invalid_argument("generated law without function");
                   }},
               law);
}

}  // namespace

Matrix evaluate(const DiagonalLaw& law, Index k, std::size_t d) {
    return std::visit(
        overloaded{[&](const ConstantLaw& c) { return c.value; },
                   [&](const PeriodicLaw& p) { return p.sequence.at(k); },
                   [&](const EventuallyPeriodicLaw& e) {
                       if (k > e.radius) return e.right_tail.at(k);
                       if (k < -e.radius) return e.left_tail.at(k);
                       return e.core[static_cast<std::size_t>(k + e.radius)];
                   },
                   [&](const SeededRandomLaw& r) {
                       Matrix m(d, d);
                       for (std::size_t i = 0; i < d; ++i)
                           for (std::size_t j = 0; j < d; ++j)
                               m(i, j) = r.bound * (2.0 * seeded_uniform(r.seed, k, i, j, d) - 1.0);
                       return m;
                   },
                   [&](const GeneratedLaw& g) { return (*g.fn)(k); }},
        law);
}

bool is_eventually_periodic(const DiagonalLaw& law) {
    return std::holds_alternative<ConstantLaw>(law) || std::holds_alternative<PeriodicLaw>(law) ||
           std::holds_alternative<EventuallyPeriodicLaw>(law);
}

EventuallyPeriodicLaw to_eventually_periodic(const DiagonalLaw& law) {
    if (const auto* c = std::get_if<ConstantLaw>(&law)) {
        PeriodicSequence s{{c->value}, 0};
        return {0, {c->value}, s, s};
    }
    if (const auto* p = std::get_if<PeriodicLaw>(&law)) {
        return {0, {p->sequence.at(0)}, p->sequence, p->sequence};
    }
    if (const auto* e = std::get_if<EventuallyPeriodicLaw>(&law)) return *e;
    throw UnsupportedError("symbol class is not eventually periodic");
}

DiagonalLaw simplify(EventuallyPeriodicLaw law) {
    law.left_tail = minimal_period(std::move(law.left_tail));
    law.right_tail = minimal_period(std::move(law.right_tail));
    while (law.radius > 0 && law.core.front() == law.left_tail.at(-law.radius) &&
           law.core.back() == law.right_tail.at(law.radius)) {
        law.core.erase(law.core.begin());
        law.core.pop_back();
        --law.radius;
    }
    if (law.radius == 0 && same_sequence(law.left_tail, law.right_tail) &&
        law.core.front() == law.right_tail.at(0)) {
        if (law.right_tail.period() == 1) return ConstantLaw{law.right_tail.values.front()};
        return PeriodicLaw{std::move(law.right_tail)};
    }
    return law;
}

bool is_zero_law(const DiagonalLaw& law) {
    if (!is_eventually_periodic(law)) return false;
    const auto s = simplify(to_eventually_periodic(law));
    const auto* c = std::get_if<ConstantLaw>(&s);
    return c != nullptr && c->value.is_zero();
}

std::size_t lcm_period(std::size_t a, std::size_t b) { return std::lcm(a, b); }

BandOperator::BandOperator(std::size_t block_dim, Exponent exponent,
                           std::vector<DiagonalSymbol> diagonals)
    : block_dim_(block_dim), exponent_(exponent), diagonals_(std::move(diagonals)) {
    if (block_dim_ == 0) throw std::invalid_argument("block_dim must be at least 1");
    std::sort(diagonals_.begin(), diagonals_.end(),
              [](const DiagonalSymbol& a, const DiagonalSymbol& b) { return a.offset < b.offset; });
    for (std::size_t k = 0; k < diagonals_.size(); ++k) {
        if (k > 0 && diagonals_[k].offset == diagonals_[k - 1].offset)
            throw std::invalid_argument(
                fmt::format("duplicate diagonal offset {}", diagonals_[k].offset));
        validate_law(diagonals_[k].law, block_dim_);
        bandwidth_ = std::max(bandwidth_, std::abs(diagonals_[k].offset));
    }
}

BandOperator BandOperator::zero(std::size_t d, Exponent p) { return BandOperator(d, p, {}); }

BandOperator BandOperator::identity(std::size_t d, Exponent p) { return scalar(d, 1.0, p); }

BandOperator BandOperator::scalar(std::size_t d, cplx value, Exponent p) {
    if (value == cplx{}) return zero(d, p);
    return BandOperator(d, p, {{0, ConstantLaw{Matrix::scalar(d, value)}}});
}

BandOperator BandOperator::shift(Index k, std::size_t d, Exponent p) {
    return BandOperator(d, p, {{k, ConstantLaw{Matrix::identity(d)}}});
}

std::vector<Index> BandOperator::offsets() const {
    std::vector<Index> r;
    r.reserve(diagonals_.size());
    for (const auto& s : diagonals_) r.push_back(s.offset);
    return r;
}

bool BandOperator::is_zero() const {
    return std::all_of(diagonals_.begin(), diagonals_.end(),
                       [](const DiagonalSymbol& s) { return is_zero_law(s.law); });
}

const DiagonalSymbol* BandOperator::diagonal(Index offset) const {
    auto it = std::lower_bound(diagonals_.begin(), diagonals_.end(), offset,
                               [](const DiagonalSymbol& s, Index o) { return s.offset < o; });
    if (it == diagonals_.end() || it->offset != offset) return nullptr;
    return &*it;
}

Matrix BandOperator::entry(Index i, Index j) const {
    const auto* s = diagonal(i - j);
    if (s == nullptr) return Matrix(block_dim_, block_dim_);
    return evaluate(s->law, i, block_dim_);
}

bool BandOperator::is_eventually_periodic() const {
    return std::all_of(diagonals_.begin(), diagonals_.end(),
                       [](const DiagonalSymbol& s) { return bandop::is_eventually_periodic(s.law); });
}

EpStructure BandOperator::structure() const {
    EpStructure st;
    for (const auto& s : diagonals_) {
        if (!bandop::is_eventually_periodic(s.law))
            throw UnsupportedError(
                fmt::format("diagonal {} is not eventually periodic (seeded-random or derived)",
                            s.offset));
        const auto e = to_eventually_periodic(s.law);
        st.core_radius = std::max(st.core_radius, e.radius);
        st.left_period = std::lcm(st.left_period, e.left_tail.period());
        st.right_period = std::lcm(st.right_period, e.right_tail.period());
    }
    return st;
}

cplx WindowVector::at(Index position, std::size_t component) const {
    if (position < start || position >= end()) return {};
    return data[static_cast<std::size_t>(position - start) * block_dim + component];
}

BandOperator derive(std::size_t d, Exponent p, std::vector<Index> offsets, const EntryFunction& f,
                    std::optional<EpStructure> structure) {
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    std::vector<DiagonalSymbol> diagonals;
    diagonals.reserve(offsets.size());
    for (Index alpha : offsets) {
        if (structure) {
            const Index r = structure->core_radius;
            const auto ql = static_cast<Index>(structure->left_period);
            const auto qr = static_cast<Index>(structure->right_period);
            EventuallyPeriodicLaw law;
            law.radius = r;
            for (Index k = -r; k <= r; ++k) law.core.push_back(f(k, k - alpha));
            law.right_tail.phase = r + 1;
            for (Index k = r + 1; k <= r + qr; ++k) law.right_tail.values.push_back(f(k, k - alpha));
            law.left_tail.phase = -r - ql;
            for (Index k = -r - ql; k <= -r - 1; ++k) law.left_tail.values.push_back(f(k, k - alpha));
            auto simple = simplify(std::move(law));
            if (is_zero_law(simple)) continue;
            diagonals.push_back({alpha, std::move(simple)});
        } else {
            auto fn = std::make_shared<const std::function<Matrix(Index)>>(
                [f, alpha](Index k) { return f(k, k - alpha); });
            diagonals.push_back({alpha, GeneratedLaw{std::move(fn)}});
        }
    }
    return BandOperator(d, p, std::move(diagonals));
}

namespace {

void require_compatible(const BandOperator& a, const BandOperator& b, const char* what) {
    if (a.block_dim() != b.block_dim())
        throw DimensionMismatch(fmt::format("{}: block sizes {} and {} differ", what,
                                            a.block_dim(), b.block_dim()));
    if (a.exponent() != b.exponent())
        throw DimensionMismatch(fmt::format("{}: exponents differ", what));
}

std::optional<EpStructure> joint_structure(const BandOperator& a, const BandOperator& b,
                                           Index radius_a_extra, Index radius_b_extra) {
    if (!a.is_eventually_periodic() || !b.is_eventually_periodic()) return std::nullopt;
    const auto sa = a.structure();
    const auto sb = b.structure();
    return EpStructure{std::max(sa.core_radius + radius_a_extra, sb.core_radius + radius_b_extra),
                       std::lcm(sa.left_period, sb.left_period),
                       std::lcm(sa.right_period, sb.right_period)};
}

std::optional<EpStructure> grown_structure(const BandOperator& a, Index extra) {
    if (!a.is_eventually_periodic()) return std::nullopt;
    auto s = a.structure();
    s.core_radius += extra;
    return s;
}

}  // namespace

WindowVector apply(const BandOperator& a, const WindowVector& x) {
    if (x.block_dim != a.block_dim()) throw DimensionMismatch("apply: block size mismatch");
    const Index w = a.bandwidth();
    const std::size_t d = a.block_dim();
    WindowVector y;
    y.block_dim = d;
    y.start = x.start - w;
    const std::size_t len = x.length() + 2 * static_cast<std::size_t>(w);
    y.data.assign(len * d, cplx{});
    for (std::size_t r = 0; r < len; ++r) {
        const Index i = y.start + static_cast<Index>(r);
        for (const auto& s : a.diagonals()) {
            const Index j = i - s.offset;
            if (j < x.start || j >= x.end()) continue;
            const Matrix blk = evaluate(s.law, i, d);
            const std::size_t xoff = static_cast<std::size_t>(j - x.start) * d;
            for (std::size_t u = 0; u < d; ++u)
                for (std::size_t v = 0; v < d; ++v) y.data[r * d + u] += blk(u, v) * x.data[xoff + v];
        }
    }
    return y;
}

BandOperator adjoint(const BandOperator& a) {
    std::vector<Index> offs;
    for (Index o : a.offsets()) offs.push_back(-o);
    return derive(
        a.block_dim(), a.exponent(), offs,
        [a](Index i, Index j) { return a.entry(j, i).adjoint(); },
        grown_structure(a, a.bandwidth()));
}

BandOperator add(const BandOperator& a, const BandOperator& b) {
    require_compatible(a, b, "add");
    auto offs = a.offsets();
    for (Index o : b.offsets()) offs.push_back(o);
    return derive(
        a.block_dim(), a.exponent(), offs,
        [a, b](Index i, Index j) { return a.entry(i, j) + b.entry(i, j); },
        joint_structure(a, b, 0, 0));
}

BandOperator compose(const BandOperator& a, const BandOperator& b) {
    require_compatible(a, b, "compose");
    std::vector<Index> offs;
    for (Index x : a.offsets())
        for (Index y : b.offsets()) offs.push_back(x + y);
    const std::size_t d = a.block_dim();
    return derive(
        d, a.exponent(), offs,
        [a, b, d](Index i, Index j) {
            Matrix s(d, d);
            for (const auto& da : a.diagonals()) {
                const Index k = i - da.offset;
                const auto* db = b.diagonal(k - j);
                if (db == nullptr) continue;
                s += evaluate(da.law, i, d) * evaluate(db->law, k, d);
            }
            return s;
        },
        joint_structure(a, b, 0, a.bandwidth()));
}

BandOperator scale(const BandOperator& a, cplx factor) {
    return derive(
        a.block_dim(), a.exponent(), a.offsets(),
        [a, factor](Index i, Index j) { return a.entry(i, j) * factor; }, grown_structure(a, 0));
}

BandOperator subtract_scalar(const BandOperator& a, cplx lambda) {
    return add(a, BandOperator::scalar(a.block_dim(), -lambda, a.exponent()));
}

BandOperator shift_conjugate(const BandOperator& a, Index k) {
    return derive(
        a.block_dim(), a.exponent(), a.offsets(),
        [a, k](Index i, Index j) { return a.entry(i + k, j + k); },
        grown_structure(a, std::abs(k)));
}

BandOperator direct_sum(const BandOperator& a, const BandOperator& b) {
    if (a.exponent() != b.exponent()) throw DimensionMismatch("direct_sum: exponents differ");
    auto offs = a.offsets();
    for (Index o : b.offsets()) offs.push_back(o);
    const std::size_t da = a.block_dim();
    const std::size_t db = b.block_dim();
    return derive(
        da + db, a.exponent(), offs,
        [a, b, da, db](Index i, Index j) {
            Matrix m(da + db, da + db);
            const Matrix x = a.entry(i, j);
            const Matrix y = b.entry(i, j);
            for (std::size_t u = 0; u < da; ++u)
                for (std::size_t v = 0; v < da; ++v) m(u, v) = x(u, v);
            for (std::size_t u = 0; u < db; ++u)
                for (std::size_t v = 0; v < db; ++v) m(da + u, da + v) = y(u, v);
            return m;
        },
        joint_structure(a, b, 0, 0));
}

Matrix window_matrix(const BandOperator& a, Interval rows, Interval cols) {
    const std::size_t d = a.block_dim();
    Matrix m(static_cast<std::size_t>(rows.size()) * d, static_cast<std::size_t>(cols.size()) * d);
    for (Index i = rows.lo; i <= rows.hi; ++i) {
        const auto r0 = static_cast<std::size_t>(i - rows.lo) * d;
        for (const auto& s : a.diagonals()) {
            const Index j = i - s.offset;
            if (!cols.contains(j)) continue;
            const auto c0 = static_cast<std::size_t>(j - cols.lo) * d;
            const Matrix blk = evaluate(s.law, i, d);
            for (std::size_t u = 0; u < d; ++u)
                for (std::size_t v = 0; v < d; ++v) m(r0 + u, c0 + v) = blk(u, v);
        }
    }
    return m;
}

Matrix truncate(const BandOperator& a, Index n) {
    if (n < 0) throw std::invalid_argument("truncate: n must be non-negative");
    return window_matrix(a, {-n, n}, {-n, n});
}

WindowCompression window_compression(const BandOperator& a, Interval cols) {
    const Index w = a.bandwidth();
    Interval rows{cols.lo - w, cols.hi + w};
    return {rows, cols, window_matrix(a, rows, cols)};
}

BandOperator column_truncate(const BandOperator& a, Index m) {
    return derive(
        a.block_dim(), a.exponent(), a.offsets(),
        [a, m](Index i, Index j) {
            if (std::abs(j) <= m) return Matrix(a.block_dim(), a.block_dim());
            return a.entry(i, j);
        },
        a.is_eventually_periodic()
            ? std::optional<EpStructure>(EpStructure{
                  std::max(a.structure().core_radius, m + a.bandwidth()), a.structure().left_period,
                  a.structure().right_period})
            : std::nullopt);
}

BandOperator column_restrict(const BandOperator& a, std::span<const Index> columns) {
    std::set<Index> f(columns.begin(), columns.end());
    Index reach = 0;
    for (Index j : f) reach = std::max(reach, std::abs(j));
    return derive(
        a.block_dim(), a.exponent(), a.offsets(),
        [a, f](Index i, Index j) {
            if (!f.contains(j)) return Matrix(a.block_dim(), a.block_dim());
            return a.entry(i, j);
        },
        EpStructure{reach + a.bandwidth(), 1, 1});
}

BandOperator tail_operator(const BandOperator& a, Side side) {
    std::vector<DiagonalSymbol> diags;
    for (const auto& s : a.diagonals()) {
        const auto e = to_eventually_periodic(s.law);
        const auto& seq = side == Side::right ? e.right_tail : e.left_tail;
        auto law = simplify({0, {seq.at(0)}, seq, seq});
        if (is_zero_law(law)) continue;
        diags.push_back({s.offset, std::move(law)});
    }
    return BandOperator(a.block_dim(), a.exponent(), std::move(diags));
}

bool entrywise_equal(const BandOperator& a, const BandOperator& b) {
    if (a.block_dim() != b.block_dim() || a.exponent() != b.exponent()) return false;
    const auto sa = a.structure();
    const auto sb = b.structure();
    const Index r = std::max(sa.core_radius, sb.core_radius);
    const auto ql = static_cast<Index>(std::lcm(sa.left_period, sb.left_period));
    const auto qr = static_cast<Index>(std::lcm(sa.right_period, sb.right_period));
    std::set<Index> offs;
    for (Index o : a.offsets()) offs.insert(o);
    for (Index o : b.offsets()) offs.insert(o);
    for (Index alpha : offs)
        for (Index i = -r - ql; i <= r + qr; ++i)
            if (!(a.entry(i, i - alpha) == b.entry(i, i - alpha))) return false;
    return true;
}

}  // namespace bandop
