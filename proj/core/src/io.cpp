#include "graftlab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace graftlab::io {

namespace {

const std::array<std::pair<deform::Template, const char*>, 3> kTemplates{{
    {deform::Template::SmoothBump, "smooth-bump"},
    {deform::Template::PolyBump, "poly-bump"},
    {deform::Template::Plateau, "plateau"},
}};

const std::array<std::pair<deform::Normalization, const char*>, 3> kNormalizations{{
    {deform::Normalization::GraftUnit, "graft-unit"},
    {deform::Normalization::CoshUnit, "cosh-unit"},
    {deform::Normalization::Raw, "raw"},
}};

template <class E, std::size_t N>
const char* name_of(const std::array<std::pair<E, const char*>, N>& table, E e) {
    for (const auto& [k, v] : table)
        if (k == e) return v;
    throw std::logic_error("unnamed enumerator");
}

template <class E, std::size_t N>
E value_of(const std::array<std::pair<E, const char*>, N>& table, const std::string& s, const char* what) {
    for (const auto& [k, v] : table)
        if (s == v) return k;
    throw config_error(std::string("unknown ") + what + " '" + s + "'");
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw config_error(std::string("missing key '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw config_error(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

std::array<double, 3> triple(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_array() || v.size() != 3) throw config_error(std::string("key '") + key + "' must hold 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw config_error(std::string("key '") + key + "' must hold 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

}  // namespace

surface::SurfaceModel SurfaceDoc::build() const {
    if (kind == surface::Kind::Hourglass) return surface::hourglass(core_length);
    return surface::genus2_from_fn(fn);
}

SurfaceDoc surface_doc(const surface::SurfaceModel& S) {
    SurfaceDoc d;
    d.kind = S.kind();
    if (d.kind == surface::Kind::Hourglass)
        d.core_length = S.core_length();
    else
        d.fn = S.fn();
    return d;
}

deform::BumpProfile ProfileDoc::build() const { return deform::BumpProfile(R, normalization, shape, amplitude); }

ProfileDoc profile_preset(std::string_view name) {
    if (name == "default-bump") return {};
    if (name == "poly-bump") return {deform::Template::PolyBump, 0.5, deform::Normalization::GraftUnit, 1.0};
    if (name == "plateau") return {deform::Template::Plateau, 0.5, deform::Normalization::GraftUnit, 1.0};
    throw config_error("unknown profile preset '" + std::string(name) + "'");
}

ProfileDoc parse_profile(std::string_view text) {
    auto first = text.find_first_not_of(" \t\n");
    if (first == std::string_view::npos || text[first] != '{') return profile_preset(text);
    try {
        return json::parse(text).get<ProfileDoc>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad profile document: ") + e.what());
    }
}

void to_json(json& j, const SurfaceDoc& d) {
    if (d.kind == surface::Kind::Hourglass)
        j = json{{"kind", "hourglass"}, {"core_length", d.core_length}};
    else
        j = json{{"kind", "genus2"}, {"lengths", d.fn.lengths}, {"twists", d.fn.twists}};
}

void from_json(const json& j, SurfaceDoc& d) {
    const json& k = require(j, "kind");
    if (!k.is_string()) throw config_error("key 'kind' must be a string");
    auto kind = k.get<std::string>();
    if (kind == "hourglass") {
        d.kind = surface::Kind::Hourglass;
        d.core_length = number(j, "core_length");
        if (!(d.core_length > 0.0)) throw config_error("core_length must be positive");
    } else if (kind == "genus2") {
        d.kind = surface::Kind::Genus2FN;
        d.fn.lengths = triple(j, "lengths");
        d.fn.twists = j.contains("twists") ? triple(j, "twists") : std::array<double, 3>{0.0, 0.0, 0.0};
        for (double l : d.fn.lengths)
            if (!(l > 0.0)) throw config_error("lengths must be positive");
    } else {
        throw config_error("unknown surface kind '" + kind + "'");
    }
}

void to_json(json& j, const ProfileDoc& d) {
    j = json{{"template", name_of(kTemplates, d.shape)},
             {"R", d.R},
             {"normalization", name_of(kNormalizations, d.normalization)},
             {"amplitude", d.amplitude}};
}

void from_json(const json& j, ProfileDoc& d) {
    d = ProfileDoc{};
    if (j.contains("template")) d.shape = value_of(kTemplates, j.at("template").get<std::string>(), "template");
    d.R = number(j, "R");
    if (!(d.R > 0.0)) throw config_error("profile R must be positive");
    if (j.contains("normalization"))
        d.normalization = value_of(kNormalizations, j.at("normalization").get<std::string>(), "normalization");
    if (j.contains("amplitude")) d.amplitude = number(j, "amplitude");
}

json policy_json(const greens::TruncationPolicy& p) {
    return json{{"radius", p.radius}, {"target_tail", p.target_tail}, {"max_auto_radius", p.max_auto_radius}};
}

greens::TruncationPolicy parse_policy(const json& j) {
    greens::TruncationPolicy p;
    if (j.contains("radius")) p.radius = number(j, "radius");
    if (j.contains("target_tail")) p.target_tail = number(j, "target_tail");
    if (j.contains("max_auto_radius")) p.max_auto_radius = number(j, "max_auto_radius");
    if (!(p.target_tail > 0.0)) throw config_error("target_tail must be positive");
    return p;
}

void to_json(json& j, const RunConfig& c) {
    j = json{{"surface", c.surface},
             {"truncation", policy_json(c.truncation)},
             {"profiles", c.profiles},
             {"output_path", c.output_path},
             {"seed", c.seed}};
}

void from_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    c = RunConfig{};
    c.surface = require(j, "surface").get<SurfaceDoc>();
    if (j.contains("truncation")) c.truncation = parse_policy(j.at("truncation"));
    if (j.contains("profiles")) {
        for (const auto& [name, doc] : j.at("profiles").items()) c.profiles[name] = doc.get<ProfileDoc>();
    }
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
}

RunConfig parse_config(std::string_view text) {
    try {
        return json::parse(text).get<RunConfig>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad config: ") + e.what());
    }
}

std::string serialize_config(const RunConfig& c) { return json(c).dump(2) + "\n"; }

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json report_json(const variation::VariationReport& r) {
    json j{{"sin_term", r.sin_term},
           {"kernel_term", r.kernel_term},
           {"total", r.total},
           {"tail_bound", r.tail_bound},
           {"truncation_radius", r.truncation_radius},
           {"crossings", r.crossings}};
    if (r.distance) j["distance"] = *r.distance;
    if (r.decay_bound) j["decay_bound"] = *r.decay_bound;
    return j;
}

json evaluation_json(const greens::KernelEvaluation& e) {
    return json{{"value", e.value},
                {"tail_bound", e.tail_bound},
                {"quadrature_error", e.quadrature_error},
                {"truncation_radius", e.truncation_radius},
                {"terms", e.terms}};
}

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_kernel_csv_header(std::ostream& os) {
    os << "surface_id,gamma_word,x_t,x_r,value,tail_bound,truncation_radius\n";
}

void write_kernel_csv_row(std::ostream& os, std::string_view surface_id, std::string_view gamma, double t,
                          double r, const greens::KernelEvaluation& e) {
    os << '"' << surface_id << "\"," << gamma << ',' << format_double(t) << ',' << format_double(r) << ','
       << format_double(e.value) << ',' << format_double(e.tail_bound + e.quadrature_error) << ','
       << format_double(e.truncation_radius) << '\n';
}

void write_variation_csv_header(std::ostream& os) {
    os << "surface_id,gamma,gamma_prime,sin_term,kernel_term,total,tail_bound\n";
}

void write_variation_csv_row(std::ostream& os, std::string_view surface_id, std::string_view gamma,
                             std::string_view gamma_prime, const variation::VariationReport& r) {
    os << '"' << surface_id << "\"," << gamma << ',' << gamma_prime << ',' << format_double(r.sin_term) << ','
       << format_double(r.kernel_term) << ',' << format_double(r.total) << ',' << format_double(r.tail_bound)
       << '\n';
}

}  // namespace graftlab::io
