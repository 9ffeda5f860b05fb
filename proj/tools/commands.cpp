#include "commands.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "graftlab/verify.hpp"

namespace graftlab::cli {

namespace {

Outcome usage(std::string message) { return {kUsage, {}, std::move(message)}; }

std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

}  // namespace

Outcome cmd_kernel(const io::RunConfig& config, std::string_view gamma, const std::vector<double>& ts,
                   const std::vector<double>& rs) {
    try {
        auto S = config.surface.build();
        auto g = S.geodesic(gamma);
        std::ostringstream os;
        io::write_kernel_csv_header(os);
        if (!ts.empty() && !rs.empty()) {
            greens::GeodesicKernelField K(S, g, config.truncation);
            for (double t : ts)
                for (double r : rs) io::write_kernel_csv_row(os, S.id(), g.word, t, r, K(hyp2::from_fermi(g.axis, {t, r})));
        }
        return {kOk, os.str(), {}};
    } catch (const surface::invalid_word& e) {
        return usage(e.what());
    } catch (const io::config_error& e) {
        return usage(e.what());
    } catch (const std::invalid_argument& e) {
        return usage(e.what());
    }
}

Outcome cmd_derivative(const io::RunConfig& config, std::string_view mode, std::string_view gamma,
                       std::string_view gamma_prime, const std::optional<io::ProfileDoc>& profile) {
    if (mode != "graft" && mode != "quake") return usage("mode must be graft or quake, not '" + std::string(mode) + "'");
    try {
        auto S = config.surface.build();
        auto g = S.geodesic(gamma), gp = S.geodesic(gamma_prime);
        io::json j{{"surface", S.id()}, {"mode", mode}, {"gamma", g.word}, {"gamma_prime", gp.word}};
        if (mode == "quake") {
            j["derivative"] = variation::earthquake_length_derivative(S, g, gp);
            j["tail_bound"] = 0.0;
        } else {
            auto rep = variation::grafting_length_derivative(S, g, gp, config.truncation);
            j.update(io::report_json(rep));
            if (profile) {
                j["profile"] = *profile;
                j["linearized_total"] =
                    variation::length_derivative_via_linearization(S, g, profile->build(), gp, config.truncation);
            }
        }
        return {kOk, dump(j), {}};
    } catch (const surface::invalid_word& e) {
        return usage(e.what());
    } catch (const io::config_error& e) {
        return usage(e.what());
    } catch (const std::domain_error& e) {
        return usage(e.what());
    } catch (const std::invalid_argument& e) {
        return usage(e.what());
    }
}

Outcome cmd_verify(const io::RunConfig& config, std::string_view suite) {
    if (!verify::is_suite(suite)) return usage("unknown suite '" + std::string(suite) + "'");
    try {
        verify::Context ctx{config.surface.build(), config.truncation, config.seed};
        auto rep = verify::run_suite(suite, ctx);
        return {rep.passed() ? kOk : kFailed, dump(verify::report_json(rep)), {}};
    } catch (const io::config_error& e) {
        return usage(e.what());
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Green's kernels, grafting and earthquake length variations on hyperbolic surfaces"};
    app.require_subcommand(1);
    app.fallthrough();
    app.footer("Environment: GRAFTLAB_THREADS limits parallelism of the verification suites.");

    std::string config_path, surface_json, out_path, profile_text;
    std::optional<std::uint64_t> seed;
    std::optional<double> radius;
    app.add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
    app.add_option("--surface", surface_json, "surface document, overrides the config");
    app.add_option("--out", out_path, "output file (default: config output_path, else stdout)");
    app.add_option("--seed", seed, "seed for randomized suites");
    app.add_option("--truncation-radius", radius, "orbit-sum radius; 0 picks it from the tail target");
    app.add_option("--profile", profile_text, "profile preset name or JSON document");

    std::string gamma, gamma_prime, mode = "graft", suite;
    std::vector<double> ts{0.0}, rs;
    auto* kernel = app.add_subcommand("kernel", "sample K_gamma in Fermi coordinates about gamma (CSV)");
    kernel->add_option("--gamma", gamma, "class word")->required();
    kernel->add_option("--t", ts, "arclength samples along the axis")->delimiter(',');
    kernel->add_option("--r", rs, "signed distance samples; none gives a header-only CSV")->delimiter(',');

    auto* deriv = app.add_subcommand("derivative", "length derivative of gamma' under grafting or earthquake (JSON)");
    deriv->add_option("--gamma", gamma, "deformed class")->required();
    deriv->add_option("--gamma-prime", gamma_prime, "measured class")->required();
    deriv->add_option("--mode", mode, "graft or quake")->check(CLI::IsMember({"graft", "quake"}));

    auto* ver = app.add_subcommand("verify", "run an acceptance suite (JSON report)");
    ver->add_option("--suite", suite, "suite name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    io::RunConfig config;
    std::optional<io::ProfileDoc> profile;
    try {
        if (!config_path.empty()) config = io::load_config(config_path);
        if (!surface_json.empty()) {
            try {
                config.surface = io::json::parse(surface_json).get<io::SurfaceDoc>();
            } catch (const io::json::exception& e) {
                throw io::config_error(std::string("bad surface document: ") + e.what());
            }
        }
        if (seed) config.seed = *seed;
        if (radius) config.truncation.radius = *radius;
        if (!profile_text.empty()) profile = io::parse_profile(profile_text);
    } catch (const io::config_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (out_path.empty()) out_path = config.output_path;

    Outcome res;
    if (*kernel)
        res = cmd_kernel(config, gamma, ts, rs);
    else if (*deriv)
        res = cmd_derivative(config, mode, gamma, gamma_prime, profile);
    else
        res = cmd_verify(config, suite);

    if (!res.error.empty()) err << "error: " << res.error << "\n";
    if (res.exit_code == kUsage) return kUsage;
    if (out_path.empty()) {
        out << res.output;
    } else {
        std::ofstream f(out_path);
        if (!(f << res.output)) {
            err << "error: cannot write '" << out_path << "'\n";
            return kUsage;
        }
    }
    return res.exit_code;
}

}  // namespace graftlab::cli
