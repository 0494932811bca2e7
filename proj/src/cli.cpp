#include "bandop/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "bandop/corpus.hpp"
#include "bandop/errors.hpp"
#include "bandop/finsec.hpp"
#include "bandop/spec_io.hpp"

namespace bandop::cli {

namespace {

std::string num(double v) { return fmt::format("{:.15g}", v); }

// Writes to the file when a path is given, else to the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error(fmt::format("cannot open {} for writing", path));
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

int emit_value(const ConvergedValue& v, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Sink sink(cfg.output_path, out);
    *sink << "value,window_size,cauchy_gap\n" << num(v.value) << ',' << v.window_size << ',' << num(v.cauchy_gap) << '\n';
    if (!v.converged) {
        err << fmt::format("warning: error bound {:.3e} exceeds --tol {:.3e}; value is an estimate\n",
                           v.cauchy_gap, cfg.tolerance);
        return kExitNonconvergence;
    }
    return kExitOk;
}

std::string directions_text(const LimitOperator& l) {
    std::string s;
    for (Direction d : l.directions) s += (s.empty() ? "" : "|") + std::string(direction_name(d));
    return s;
}

int run_limitops(const BandOperator& a, const RunConfig& cfg, std::ostream& out) {
    const auto spectrum = operator_spectrum(a);
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& l : spectrum) {
        nlohmann::json doc;
        doc["directions"] = nlohmann::json::array();
        for (Direction d : l.directions) doc["directions"].push_back(direction_name(d));
        doc["residue"] = l.residue;
        doc["period"] = l.period;
        doc["operator"] = operator_to_json(l.op);
        docs.push_back(std::move(doc));
    }
    {
        Sink ops(cfg.operators_path, out);
        *ops << pretty_json(docs);
    }
    Sink sink(cfg.output_path, out);
    *sink << "direction,residue,norm,lower_norm\n";
    for (const auto& l : spectrum)
        *sink << directions_text(l) << ',' << l.residue << ',' << num(laurent_norm(l)) << ','
              << num(laurent_lower_norm(l)) << '\n';
    return kExitOk;
}

int run_pseudospec(const BandOperator& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const PseudospectrumGrid g =
        cfg.essential ? essential_pseudospectrum_grid(a, cfg.box, cfg.nx, cfg.ny, cfg.tolerance, cfg.method, cfg.jobs)
                      : pseudospectrum_grid(a, cfg.box, cfg.nx, cfg.ny, cfg.tolerance, cfg.jobs);
    const bool alt = !g.alt_values.empty();
    Sink sink(cfg.output_path, out);
    *sink << (alt ? "re,im,value,value_alt\n" : "re,im,value\n");
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const cplx z = g.node(ix, iy);
            *sink << num(z.real()) << ',' << num(z.imag()) << ',' << num(g.value(ix, iy));
            if (alt) *sink << ',' << num(g.alt_values[static_cast<std::size_t>(ix * g.ny + iy)]);
            *sink << '\n';
        }
    if (g.unconverged_nodes > 0)
        err << fmt::format("warning: {} nodes carry upper bounds only (lower norm did not settle)\n",
                           g.unconverged_nodes);
    if (alt && g.max_discrepancy > cfg.agree_tol) {
        err << fmt::format("methods disagree: max discrepancy {:.3e} > {:.3e}\n", g.max_discrepancy, cfg.agree_tol);
        return kExitVerifyFailed;
    }
    return kExitOk;
}

std::string invertible_text(bool b) { return b ? "yes" : "no"; }

void print_stability(const StabilitySpectrum& s, std::ostream& out) {
    out << "stability_spectrum:\n";
    out << "tag,cut,invertible,inverse_norm\n";
    for (const auto& m : s.members)
        out << m.tag << ',' << m.cut << ',' << invertible_text(m.invertible) << ',' << num(m.inverse_norm) << '\n';
}

int run_finsec(const BandOperator& a, const RunConfig& cfg, std::ostream& out) {
    const double c = cfg.c ? *cfg.c : 0.0;
    const FinSecReport r = finite_sections(a, cfg.nmax, c);
    {
        Sink sink(cfg.output_path, out);
        *sink << "n,sigma_min,inv_norm,cond\n";
        for (std::size_t k = 0; k < r.n_list.size(); ++k)
            *sink << r.n_list[k] << ',' << num(r.sigma_min_list[k]) << ',' << num(r.inv_norm_list[k]) << ','
                  << num(r.cond_list[k]) << '\n';
    }
    if (cfg.output_path.empty()) out << '\n';
    out << "summary:\n";
    out << "stable: " << invertible_text(r.stable) << '\n';
    out << "c: " << num(r.c) << '\n';
    out << "limsup_inv_norm: " << num(r.limsup_inv_norm) << '\n';
    out << "limsup_cond: " << num(r.limsup_cond) << '\n';
    if (a.exponent() != Exponent::two) return kExitOk;
    print_stability(stability_spectrum(a, r.c, cfg.tolerance), out);
    if (r.stable) {
        const Q1Result q1 = q1_check(a, r.c, cfg.nmax, cfg.tolerance);
        const Q3Result q3 = q3_check(a, r.c, cfg.nmax, cfg.tolerance);
        out << "q1_gap: " << num(q1.gap) << '\n';
        out << "q3_gap: " << num(q3.gap) << '\n';
    } else {
        out << "q1_gap: n/a (unstable)\nq3_gap: n/a (unstable)\n";
    }
    return kExitOk;
}

// ---- verify --------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

class Battery {
public:
    explicit Battery(std::ostream& out) : out_(out) {}

    void run(const std::string& name, const std::function<Check()>& body) {
        Check c;
        try {
            c = body();
            c.name = name;
        } catch (const UnsupportedError& e) {
            out_ << fmt::format("SKIP {} ({})\n", name, e.what());
            return;
        } catch (const std::exception& e) {
            c = {name, false, fmt::format("error: {}", e.what())};
        }
        out_ << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : " " + c.detail) << '\n';
        failed_ += c.pass ? 0 : 1;
    }

    int failed() const { return failed_; }

private:
    std::ostream& out_;
    int failed_ = 0;
};

Check within(double value, double bound, const std::string& what) {
    return {"", value <= bound, fmt::format("{} = {:.3e} (bound {:.1e})", what, value, bound)};
}

WindowVector random_vector(std::mt19937_64& rng, Index start, std::size_t len, std::size_t d) {
    std::normal_distribution<double> g;
    WindowVector x{start, d, Vector(len * d)};
    for (auto& z : x.data) z = cplx(g(rng), g(rng));
    return x;
}

cplx dot(const WindowVector& x, const WindowVector& y) {
    cplx s{};
    const Index lo = std::max(x.start, y.start);
    const Index hi = std::min(x.end(), y.end());
    for (Index k = lo; k < hi; ++k)
        for (std::size_t c = 0; c < x.block_dim; ++c) s += std::conj(x.at(k, c)) * y.at(k, c);
    return s;
}

double vector_gap(const WindowVector& x, const WindowVector& y) {
    double g = 0;
    const Index lo = std::min(x.start, y.start);
    const Index hi = std::max(x.end(), y.end());
    for (Index k = lo; k < hi; ++k)
        for (std::size_t c = 0; c < x.block_dim; ++c) g = std::max(g, std::abs(x.at(k, c) - y.at(k, c)));
    return g;
}

void operator_checks(const BandOperator& a, const RunConfig& cfg, Battery& b) {
    const std::size_t d = a.block_dim();
    const Index w = a.bandwidth();
    b.run("apply_linear", [&] {
        std::mt19937_64 rng(cfg.seed);
        const auto x = random_vector(rng, -5, 11, d);
        const auto y = random_vector(rng, -5, 11, d);
        const cplx s(0.3, -1.1);
        WindowVector comb = x;
        for (std::size_t k = 0; k < comb.data.size(); ++k) comb.data[k] = x.data[k] + s * y.data[k];
        const auto lhs = apply(a, comb);
        auto rhs = apply(a, x);
        const auto ay = apply(a, y);
        for (std::size_t k = 0; k < rhs.data.size(); ++k) rhs.data[k] += s * ay.data[k];
        return within(vector_gap(lhs, rhs), 1e-12, "max deviation");
    });
    b.run("adjoint_duality", [&] {
        std::mt19937_64 rng(cfg.seed + 1);
        const auto x = random_vector(rng, -6, 13, d);
        const auto y = random_vector(rng, -4, 9, d);
        return within(std::abs(dot(apply(a, x), y) - dot(x, apply(adjoint(a), y))), 1e-10, "|<Ax,y> - <x,A*y>|");
    });
    b.run("truncate_is_window", [&] {
        const Index n = 7;
        const Matrix t = truncate(a, n);
        const Matrix m = window_matrix(a, {-n, n}, {-n, n});
        double g = 0;
        for (std::size_t k = 0; k < t.entries().size(); ++k) g = std::max(g, std::abs(t.entries()[k] - m.entries()[k]));
        return within(g, 0.0, "max entry gap");
    });
    b.run("shift_round_trip", [&] {
        const bool ok = entrywise_equal(shift_conjugate(shift_conjugate(a, 3), -3), a);
        return Check{"", ok, ""};
    });
    b.run("band_property", [&] {
        std::mt19937_64 rng(cfg.seed + 2);
        std::uniform_int_distribution<Index> pos(-60, 60), off(w + 1, w + 20);
        double worst = 0;
        for (int k = 0; k < 1000; ++k) {
            const Index i = pos(rng);
            const Index j = i + (k % 2 ? 1 : -1) * off(rng);
            worst = std::max(worst, induced_p_norm(a.entry(i, j), Exponent::one));
        }
        return within(worst, 0.0, "largest entry outside the band");
    });
    if (a.exponent() != Exponent::two) return;
    b.run("essential_norm_two_ways", [&] {
        const double q = essential_norm_q(a, cfg.tolerance).value;
        return within(std::abs(q - essential_norm_via_limops(a)), 1e-6, "|ess_q - ess_limops|");
    });
    b.run("essential_below_norm", [&] {
        const double gap = essential_norm_q(a, cfg.tolerance).value - op_norm(a, cfg.tolerance).value;
        return within(gap, 1e-9, "ess - norm");
    });
    b.run("limit_operator_inequalities", [&] {
        const double norm = op_norm(a, cfg.tolerance).value;
        const double nu = lower_norm(a, cfg.tolerance).value;
        double worst = -INFINITY;
        for (const auto& l : operator_spectrum(a))
            worst = std::max({worst, laurent_norm(l) - norm, nu - laurent_lower_norm(l)});
        return within(worst, 1e-6, "max(||A_h|| - ||A||, nu(A) - nu(A_h))");
    });
    b.run("inverse_norm_adjoint", [&] {
        const double r = inverse_norm_recip_detail(a, cfg.tolerance).value;
        const double rs = inverse_norm_recip_detail(adjoint(a), cfg.tolerance).value;
        return within(std::abs(r - rs), 1e-8, "|recip(A) - recip(A*)|");
    });
    b.run("mu_gram_identity", [&] {
        const BandOperator as = adjoint(a);
        const double lhs = std::min(std::sqrt(mu_tilde(compose(a, as), cfg.tolerance).value),
                                    std::sqrt(mu_tilde(compose(as, a), cfg.tolerance).value));
        return within(std::abs(lhs - mu(a, cfg.tolerance).value), 1e-6, "|min sqrt mu~(AA*), sqrt mu~(A*A)| - mu|");
    });
    b.run("direct_sum_norm", [&] {
        const BandOperator s = direct_sum(a, adjoint(a));
        const double lhs = op_norm(s, cfg.tolerance).value;
        return within(std::abs(lhs - op_norm(a, cfg.tolerance).value), 1e-6, "| ||A + A*|| - ||A|| |");
    });
    b.run("finite_sections_q1", [&] {
        const FinSecReport r = finite_sections(a, cfg.nmax);
        if (!r.stable) return Check{"", true, "sections unstable; identity not applicable"};
        const Q1Result q1 = q1_check(a, r.c, cfg.nmax, cfg.tolerance);
        return within(q1.gap, 1e-6, "q1 gap");
    });
}

void example5_battery(Battery& b) {
    const double mus[] = {0.1, 0.25, 0.5, 0.75, 0.9};
    for (double m : mus) {
        const BandOperator a = corpus::example5(m);
        b.run(fmt::format("example5_inverse_norms mu={}", m), [&] {
            const FinSecReport r = finite_sections(a, 41, 2.0);
            double worst = 0;
            for (std::size_t k = 0; k < r.n_list.size(); ++k) {
                const Index n = r.n_list[k];
                if (n < 2) continue;  // n = 1 is not covered by the closed form
                const double expect = n % 2 == 0 ? 1 / (1 - m) : std::max(1 / (1 - m), 1 / m);
                worst = std::max(worst, std::abs(r.inv_norm_list[k] - expect));
            }
            return within(worst, 1e-8, "max |‖A_n^-1‖ - closed form|");
        });
        b.run(fmt::format("example5_q1 mu={}", m), [&] {
            const Q1Result q1 = q1_check(a, 2.0, 40);
            return within(q1.gap, 1e-6, "q1 gap");
        });
        b.run(fmt::format("example5_stability_spectrum mu={}", m), [&] {
            const auto s = stability_spectrum(a, 2.0);
            return Check{"", s.members.size() == 5, fmt::format("members = {}", s.members.size())};
        });
    }
    b.run("example5_mu0_unstable", [&] {
        const FinSecReport r = finite_sections(corpus::example5(0.0), 41, 2.0);
        return Check{"", !r.stable, fmt::format("stable = {}", r.stable)};
    });
}

int run_verify(const BandOperator& a, const RunConfig& cfg, std::ostream& out) {
    Battery b(out);
    operator_checks(a, cfg, b);
    if (a.exponent() == Exponent::two) {
        try {
            const FinSecReport r = finite_sections(a, cfg.nmax, cfg.c ? *cfg.c : 0.0);
            out << fmt::format("report: stable = {}, limsup_inv_norm = {}, limsup_cond = {}\n",
                               invertible_text(r.stable), num(r.limsup_inv_norm), num(r.limsup_cond));
        } catch (const UnsupportedError& e) {
            out << fmt::format("report: skipped ({})\n", e.what());
        }
    }
    example5_battery(b);
    out << fmt::format("verify: {} failed\n", b.failed());
    return b.failed() == 0 ? kExitOk : kExitVerifyFailed;
}

int run_corpus(const RunConfig& cfg, std::ostream& out) {
    const std::filesystem::path dir = cfg.output_path.empty() ? "." : cfg.output_path;
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const BandOperator& a) {
        const auto path = dir / (name + ".json");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
        f << canonical_text(a);
        out << path.string() << '\n';
    };
    for (const auto& n : corpus::eventually_periodic_corpus(cfg.seed)) write(n.name, n.op);
    for (double m : {0.0, 0.05, 0.1, 0.5, 0.9}) write(fmt::format("example5_mu{}", m), corpus::example5(m));
    write("seeded_random_w2", corpus::seeded_random_band(cfg.seed, 2, 1));
    write("seeded_random_w3_d2_inf", corpus::seeded_random_band(cfg.seed + 1, 3, 2, Exponent::infinity));
    return kExitOk;
}

}  // namespace

Box parse_box(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument(fmt::format("--box: bad number '{}'", item));
        v.push_back(x);
    }
    if (v.size() != 4) throw std::invalid_argument("--box expects re0,re1,im0,im1");
    return {v[0], v[1], v[2], v[3]};
}

void validate(const RunConfig& cfg) {
    if (!(cfg.tolerance > 0)) throw std::invalid_argument("--tol must be positive");
    if (cfg.command == Command::pseudospec) {
        if (cfg.nx < 2 || cfg.ny < 2) throw std::invalid_argument("--nx and --ny must be at least 2");
        if (!(cfg.box.re0 < cfg.box.re1) || !(cfg.box.im0 < cfg.box.im1))
            throw std::invalid_argument("--box must satisfy re0 < re1 and im0 < im1");
        if (!(cfg.agree_tol > 0)) throw std::invalid_argument("--agree-tol must be positive");
    }
    if (cfg.command == Command::finsec && cfg.nmax < 1) throw std::invalid_argument("--nmax must be at least 1");
    if (cfg.c && !(*cfg.c > 0)) throw std::invalid_argument("--c must be positive");
    if (cfg.command != Command::corpus && cfg.spec_path.empty()) throw std::invalid_argument("missing spec file");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        if (cfg.command == Command::corpus) return run_corpus(cfg, out);
        const BandOperator a = load_operator(cfg.spec_path);
        switch (cfg.command) {
            case Command::norm:
                return emit_value(op_norm(a, cfg.tolerance), cfg, out, err);
            case Command::essnorm:
                return emit_value(essential_norm_q(a, cfg.tolerance), cfg, out, err);
            case Command::lowernorm:
                return emit_value(lower_norm(a, cfg.tolerance), cfg, out, err);
            case Command::mu:
                return emit_value(mu(a, cfg.tolerance), cfg, out, err);
            case Command::limitops:
                return run_limitops(a, cfg, out);
            case Command::pseudospec:
                return run_pseudospec(a, cfg, out, err);
            case Command::finsec:
                return run_finsec(a, cfg, out);
            case Command::verify:
                return run_verify(a, cfg, out);
            case Command::canon: {
                Sink sink(cfg.output_path, out);
                *sink << canonical_text(a);
                return kExitOk;
            }
            case Command::corpus:
                break;
        }
        return kExitOk;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitParse;
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << '\n';
        return kExitUnsupported;
    } catch (const ConvergenceError& e) {
        err << "did not converge: " << e.what() << '\n';
        return kExitNonconvergence;
    } catch (const DimensionMismatch& e) {
        err << "unsupported: " << e.what() << '\n';
        return kExitUnsupported;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
}

}  // namespace bandop::cli
