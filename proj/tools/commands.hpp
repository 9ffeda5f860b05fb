#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graftlab/io.hpp"

namespace graftlab::cli {

// Exit codes: 0 pass, 1 assertion failure, 2 usage or config error.
enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2 };

struct Outcome {
    int exit_code = kOk;
    std::string output;  // CSV or JSON, written once by the caller
    std::string error;
};

// One CSV row per (t, r) in ts x rs; x = from_fermi(axis(gamma), {t, r}).
Outcome cmd_kernel(const io::RunConfig& config, std::string_view gamma, const std::vector<double>& ts,
                   const std::vector<double>& rs);

// mode "graft" or "quake". With a profile, graft also reports the
// linearized derivative for that profile.
Outcome cmd_derivative(const io::RunConfig& config, std::string_view mode, std::string_view gamma,
                       std::string_view gamma_prime, const std::optional<io::ProfileDoc>& profile = std::nullopt);

Outcome cmd_verify(const io::RunConfig& config, std::string_view suite);

// Full command line; writes to out / err and returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace graftlab::cli
