#include "bandop/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "bandop/errors.hpp"

namespace bandop {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ParseError(fmt::format("{}: {}", path.empty() ? "<root>" : path, msg));
}

const json& field(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, fmt::format("missing field \"{}\"", key));
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "non-finite number");
    return x;
}

Index integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<Index>();
}

Matrix parse_block(const json& v, std::size_t d, const std::string& path) {
    if (!v.is_array()) fail(path, "expected a list of [re, im] entries");
    if (v.size() != d * d)
        fail(path, fmt::format("expected {} entries for a {}x{} block, got {}", d * d, d, d, v.size()));
    std::vector<cplx> entries;
    entries.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string p = fmt::format("{}[{}]", path, k);
        const json& e = v[k];
        if (e.is_number()) {
            entries.emplace_back(number(e, p), 0.0);
        } else if (e.is_array() && e.size() == 2) {
            entries.emplace_back(number(e[0], p + "[0]"), number(e[1], p + "[1]"));
        } else {
            fail(p, "expected [re, im] or a real number");
        }
    }
    return Matrix(d, d, std::move(entries));
}

std::vector<Matrix> parse_blocks(const json& v, std::size_t d, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty list of blocks");
    std::vector<Matrix> r;
    for (std::size_t k = 0; k < v.size(); ++k) r.push_back(parse_block(v[k], d, fmt::format("{}[{}]", path, k)));
    return r;
}

PeriodicSequence parse_sequence(const json& v, std::size_t d, const std::string& path) {
    PeriodicSequence s;
    s.values = parse_blocks(field(v, path, "values"), d, path + ".values");
    if (v.contains("phase")) s.phase = integer(v["phase"], path + ".phase");
    return s;
}

DiagonalLaw parse_law(const json& v, std::size_t d, const std::string& path) {
    const json& kind_v = field(v, path, "kind");
    if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
    const auto kind = kind_v.get<std::string>();
    if (kind == "constant") return ConstantLaw{parse_block(field(v, path, "value"), d, path + ".value")};
    if (kind == "periodic") return PeriodicLaw{parse_sequence(v, d, path)};
    if (kind == "eventually_periodic") {
        EventuallyPeriodicLaw e;
        e.radius = integer(field(v, path, "radius"), path + ".radius");
        if (e.radius < 0) fail(path + ".radius", "must be non-negative");
        e.core.assign(static_cast<std::size_t>(2 * e.radius + 1), Matrix(d, d));
        const json& core = field(v, path, "core");
        if (!core.is_array()) fail(path + ".core", "expected a list of {index, value}");
        std::vector<bool> seen(e.core.size(), false);
        for (std::size_t k = 0; k < core.size(); ++k) {
            const std::string p = fmt::format("{}.core[{}]", path, k);
            const Index idx = integer(field(core[k], p, "index"), p + ".index");
            if (idx < -e.radius || idx > e.radius)
                fail(p + ".index", fmt::format("index {} outside [-{}, {}]", idx, e.radius, e.radius));
            const auto slot = static_cast<std::size_t>(idx + e.radius);
            if (seen[slot]) fail(p + ".index", fmt::format("duplicate index {}", idx));
            seen[slot] = true;
            e.core[slot] = parse_block(field(core[k], p, "value"), d, p + ".value");
        }
        e.left_tail = parse_sequence(field(v, path, "left_tail"), d, path + ".left_tail");
        e.right_tail = parse_sequence(field(v, path, "right_tail"), d, path + ".right_tail");
        return e;
    }
    if (kind == "seeded_random") {
        SeededRandomLaw r;
        r.bound = number(field(v, path, "bound"), path + ".bound");
        if (r.bound < 0) fail(path + ".bound", "must be non-negative");
        const json& s = field(v, path, "seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<Index>() >= 0))
            fail(path + ".seed", "expected a non-negative integer");
        r.seed = s.get<std::uint64_t>();
        return r;
    }
    fail(path + ".kind", fmt::format("unknown law kind \"{}\"", kind));
}

json sequence_to_json(const PeriodicSequence& s) {
    json values = json::array();
    for (const auto& m : s.values) values.push_back(block_to_json(m));
    return {{"values", values}, {"phase", s.phase}};
}

json law_to_json(const DiagonalLaw& law) {
    if (const auto* c = std::get_if<ConstantLaw>(&law))
        return {{"kind", "constant"}, {"value", block_to_json(c->value)}};
    if (const auto* p = std::get_if<PeriodicLaw>(&law)) {
        json j = sequence_to_json(p->sequence);
        j["kind"] = "periodic";
        return j;
    }
    if (const auto* e = std::get_if<EventuallyPeriodicLaw>(&law)) {
        json core = json::array();
        for (Index k = -e->radius; k <= e->radius; ++k) {
            const auto& m = e->core[static_cast<std::size_t>(k + e->radius)];
            core.push_back({{"index", k}, {"value", block_to_json(m)}});
        }
        return {{"kind", "eventually_periodic"},
                {"radius", e->radius},
                {"core", core},
                {"left_tail", sequence_to_json(e->left_tail)},
                {"right_tail", sequence_to_json(e->right_tail)}};
    }
    if (const auto* r = std::get_if<SeededRandomLaw>(&law))
        return {{"kind", "seeded_random"}, {"bound", r->bound}, {"seed", r->seed}};
    throw UnsupportedError("derived diagonals have no file representation");
}

}  // namespace

BandOperator parse_operator(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    const auto d_raw = integer(field(doc, "", "block_dim"), "block_dim");
    if (d_raw < 1) fail("block_dim", "must be at least 1");
    const auto d = static_cast<std::size_t>(d_raw);

    Exponent p = Exponent::two;
    if (doc.contains("exponent")) {
        const json& e = doc["exponent"];
        if (e == 1) p = Exponent::one;
        else if (e == 2) p = Exponent::two;
        else if (e == "inf") p = Exponent::infinity;
        else fail("exponent", "expected 1, 2 or \"inf\"");
    }

    const json& diags = field(doc, "", "diagonals");
    if (!diags.is_array()) fail("diagonals", "expected a list");
    std::vector<DiagonalSymbol> symbols;
    std::set<Index> offsets;
    for (std::size_t k = 0; k < diags.size(); ++k) {
        const std::string path = fmt::format("diagonals[{}]", k);
        const Index off = integer(field(diags[k], path, "offset"), path + ".offset");
        if (!offsets.insert(off).second) fail(path + ".offset", fmt::format("duplicate offset {}", off));
        symbols.push_back({off, parse_law(field(diags[k], path, "law"), d, path + ".law")});
    }
    try {
        return BandOperator(d, p, std::move(symbols));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

BandOperator load_operator(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_operator(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json block_to_json(const Matrix& m) {
    json j = json::array();
    for (const auto& z : m.entries()) j.push_back({z.real(), z.imag()});
    return j;
}

json operator_to_json(const BandOperator& a) {
    json diags = json::array();
    for (const auto& s : a.diagonals()) {
        DiagonalLaw law = s.law;
        if (is_eventually_periodic(law)) {
            if (is_zero_law(law)) continue;
            law = simplify(to_eventually_periodic(law));
        }
        diags.push_back({{"offset", s.offset}, {"law", law_to_json(law)}});
    }
    json exp;
    switch (a.exponent()) {
        case Exponent::one: exp = 1; break;
        case Exponent::two: exp = 2; break;
        case Exponent::infinity: exp = "inf"; break;
    }
    return {{"block_dim", a.block_dim()}, {"exponent", exp}, {"diagonals", diags}};
}

namespace {

bool has_object(const nlohmann::json& j) {
    if (j.is_object()) return true;
    if (j.is_array())
        for (const auto& e : j)
            if (has_object(e)) return true;
    return false;
}

// Two-space indentation, but blocks and other object-free arrays stay on one line.
void write_json(const nlohmann::json& j, int indent, std::string& out) {
    if (!has_object(j)) {
        out += j.dump();
        return;
    }
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const bool obj = j.is_object();
    out += obj ? "{\n" : "[\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        if (obj) out += nlohmann::json(it.key()).dump() + ": ";
        write_json(it.value(), indent + 2, out);
    }
    out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + (obj ? "}" : "]");
}

}  // namespace

std::string pretty_json(const nlohmann::json& j) {
    std::string out;
    write_json(j, 0, out);
    return out + "\n";
}

std::string canonical_text(const BandOperator& a) { return pretty_json(operator_to_json(a)); }

}  // namespace bandop
