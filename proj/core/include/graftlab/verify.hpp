#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graftlab/io.hpp"

namespace graftlab::verify {

// measured <relation> bound, with relation one of "<=", "<", ">=", ">".
struct Check {
    std::string name;
    double measured = 0.0;
    std::string relation = "<=";
    double bound = 0.0;
    bool passed = false;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;
    bool passed() const;
};

struct Context {
    surface::SurfaceModel surface = surface::hourglass(1.0);
    // radius <= 0 lets each suite pick the radius its tolerances need.
    greens::TruncationPolicy policy{};
    std::uint64_t seed = 0;
};

// GRAFTLAB_THREADS if set to a positive integer, else the hardware count.
std::size_t thread_count();

// greens-ode, greens-fubini, gauss-bonnet, graft-oracle, wolpert, delta-matrix, all.
const std::vector<std::string>& suite_names();
bool is_suite(std::string_view name);

// Throws std::invalid_argument for an unknown name. "all" runs every suite
// and concatenates the checks.
SuiteReport run_suite(std::string_view name, const Context& ctx);

io::json report_json(const SuiteReport& r);

}  // namespace graftlab::verify
