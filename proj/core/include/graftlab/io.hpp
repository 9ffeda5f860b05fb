#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "graftlab/deform.hpp"
#include "graftlab/greens.hpp"
#include "graftlab/variation.hpp"

namespace graftlab::io {

using json = nlohmann::json;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {"kind": "genus2", "lengths": [..3], "twists": [..3]} or
// {"kind": "hourglass", "core_length": l}.
struct SurfaceDoc {
    surface::Kind kind = surface::Kind::Hourglass;
    double core_length = 1.0;
    surface::FNParams fn;

    surface::SurfaceModel build() const;
};

SurfaceDoc surface_doc(const surface::SurfaceModel& S);

// {"template": "smooth-bump"|"poly-bump"|"plateau", "R": x,
//  "normalization": "graft-unit"|"cosh-unit"|"raw", "amplitude": a}
struct ProfileDoc {
    deform::Template shape = deform::Template::SmoothBump;
    double R = 0.5;
    deform::Normalization normalization = deform::Normalization::GraftUnit;
    double amplitude = 1.0;

    deform::BumpProfile build() const;
};

// Named presets; "default-bump" is the smooth bump of radius 0.5, graft-unit.
ProfileDoc profile_preset(std::string_view name);
// A preset name or a JSON document.
ProfileDoc parse_profile(std::string_view text);

struct RunConfig {
    SurfaceDoc surface;
    greens::TruncationPolicy truncation;
    std::map<std::string, ProfileDoc> profiles;
    std::string output_path;
    std::uint64_t seed = 0;
};

void to_json(json& j, const SurfaceDoc& d);
void from_json(const json& j, SurfaceDoc& d);
void to_json(json& j, const ProfileDoc& d);
void from_json(const json& j, ProfileDoc& d);
void to_json(json& j, const RunConfig& c);
void from_json(const json& j, RunConfig& c);

json policy_json(const greens::TruncationPolicy& p);
greens::TruncationPolicy parse_policy(const json& j);

// Throw config_error with the offending key on malformed input.
RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& c);
RunConfig load_config(const std::string& path);

json report_json(const variation::VariationReport& r);
json evaluation_json(const greens::KernelEvaluation& e);

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

void write_kernel_csv_header(std::ostream& os);
void write_kernel_csv_row(std::ostream& os, std::string_view surface_id, std::string_view gamma,
                          double t, double r, const greens::KernelEvaluation& e);
void write_variation_csv_header(std::ostream& os);
void write_variation_csv_row(std::ostream& os, std::string_view surface_id, std::string_view gamma,
                             std::string_view gamma_prime, const variation::VariationReport& r);

}  // namespace graftlab::io
