#pragma once

// Command-line front end. tools/main.cpp only parses arguments into a
// RunConfig; everything observable (output, exit status) happens in run().

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "bandop/pseudospec.hpp"

namespace bandop::cli {

enum class Command { norm, essnorm, lowernorm, mu, limitops, pseudospec, finsec, verify, canon, corpus };

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUnsupported = 3;
inline constexpr int kExitNonconvergence = 4;

struct RunConfig {
    Command command = Command::norm;
    std::string spec_path;
    double tolerance = 1e-6;
    std::string output_path;  // empty: stdout (corpus: target directory)

    // limitops
    std::string operators_path;
    // pseudospec
    Box box;
    int nx = 41;
    int ny = 41;
    bool essential = false;
    EssentialMethod method = EssentialMethod::mu;
    double agree_tol = 5e-3;
    unsigned jobs = 0;
    // finsec
    Index nmax = 40;
    std::optional<double> c;
    // corpus
    std::uint64_t seed = 7;
};

/// Throws std::invalid_argument for an invalid configuration.
void validate(const RunConfig& config);

/// Executes the command and returns the process exit status. Library errors
/// are mapped to exit codes and reported on err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// "re0,re1,im0,im1" -> Box; throws std::invalid_argument.
Box parse_box(const std::string& text);

}  // namespace bandop::cli
