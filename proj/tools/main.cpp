#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "bandop/cli.hpp"

using bandop::cli::Command;
using bandop::cli::RunConfig;

namespace {

CLI::App* add_spec_command(CLI::App& app, const char* name, const char* help, RunConfig& cfg) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("spec", cfg.spec_path, "operator specification file (JSON)")->required();
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band operators on l^p(Z, C^d): norms, limit operators, pseudospectra, finite sections"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string box;
    std::string method = "mu";
    std::map<CLI::App*, Command> commands;

    for (auto [name, cmd, help] : {std::tuple{"norm", Command::norm, "operator norm ||A||"},
                                   std::tuple{"essnorm", Command::essnorm, "essential norm lim ||A Q_m||"},
                                   std::tuple{"lowernorm", Command::lowernorm, "lower norm nu(A)"},
                                   std::tuple{"mu", Command::mu, "mu(A) = min(mu~(A), mu~(A*))"}}) {
        auto* sub = add_spec_command(app, name, help, cfg);
        sub->add_option("--tol", cfg.tolerance, "Cauchy tolerance")->capture_default_str();
        sub->add_option("-o,--output", cfg.output_path, "write the CSV here instead of stdout");
        commands[sub] = cmd;
    }

    auto* lim = add_spec_command(app, "limitops", "operator spectrum with norms and lower norms", cfg);
    lim->add_option("--operators", cfg.operators_path, "write the limit operators (JSON) here");
    lim->add_option("-o,--output", cfg.output_path, "write the CSV table here");
    commands[lim] = Command::limitops;

    auto* ps = add_spec_command(app, "pseudospec", "(essential) pseudospectrum on a grid", cfg);
    ps->add_option("--box", box, "re0,re1,im0,im1")->default_str("-2,2,-2,2");
    ps->add_option("--nx", cfg.nx)->capture_default_str();
    ps->add_option("--ny", cfg.ny)->capture_default_str();
    ps->add_flag("--essential", cfg.essential, "essential pseudospectrum");
    ps->add_option("--method", method, "mu | limitops | both")
        ->check(CLI::IsMember({"mu", "limitops", "both"}))
        ->capture_default_str();
    ps->add_option("--agree-tol", cfg.agree_tol, "allowed gap between methods with --method both")
        ->capture_default_str();
    ps->add_option("--tol", cfg.tolerance)->capture_default_str();
    ps->add_option("--jobs", cfg.jobs, "worker threads (0 = BANDOP_JOBS or all cores)");
    ps->add_option("-o,--output", cfg.output_path, "write the CSV here instead of stdout");
    commands[ps] = Command::pseudospec;

    auto* fs = add_spec_command(app, "finsec", "finite-section stability report", cfg);
    fs->add_option("--nmax", cfg.nmax)->capture_default_str();
    fs->add_option("--c", cfg.c, "padding constant (default ||A||)");
    fs->add_option("--tol", cfg.tolerance)->capture_default_str();
    fs->add_option("-o,--output", cfg.output_path, "write the per-n CSV here");
    commands[fs] = Command::finsec;

    auto* ver = add_spec_command(app, "verify", "invariant checks plus the example5 battery", cfg);
    ver->add_option("--tol", cfg.tolerance)->capture_default_str();
    ver->add_option("--nmax", cfg.nmax)->capture_default_str();
    ver->add_option("--seed", cfg.seed)->capture_default_str();
    commands[ver] = Command::verify;

    auto* canon = add_spec_command(app, "canon", "validate and print the canonical form", cfg);
    canon->add_option("-o,--output", cfg.output_path);
    commands[canon] = Command::canon;

    auto* corp = app.add_subcommand("corpus", "write the reference operators as spec files");
    corp->add_option("-o,--output", cfg.output_path, "target directory")->required();
    corp->add_option("--seed", cfg.seed)->capture_default_str();
    commands[corp] = Command::corpus;

    try {
        app.parse(argc, argv);
        if (!box.empty()) cfg.box = bandop::cli::parse_box(box);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bandop::cli::kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return bandop::cli::kExitParse;
    }
    cfg.method = method == "both"       ? bandop::EssentialMethod::both
                 : method == "limitops" ? bandop::EssentialMethod::limitops
                                        : bandop::EssentialMethod::mu;
    for (auto* sub : app.get_subcommands()) cfg.command = commands.at(sub);
    return bandop::cli::run(cfg, std::cout, std::cerr);
}
