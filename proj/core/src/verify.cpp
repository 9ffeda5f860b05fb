#include "graftlab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace graftlab::verify {

namespace {

using hyp2::HPoint;
using surface::SurfaceModel;

constexpr double kPi = std::numbers::pi;

Check make_check(std::string name, double measured, std::string relation, double bound, std::string note = {}) {
    bool ok = false;
    if (relation == "<=") ok = measured <= bound;
    else if (relation == "<") ok = measured < bound;
    else if (relation == ">=") ok = measured >= bound;
    else if (relation == ">") ok = measured > bound;
    else throw std::logic_error("unknown relation " + relation);
    return {std::move(name), measured, std::move(relation), bound, ok && std::isfinite(measured), std::move(note)};
}

// Runs f(0..n-1) on up to thread_count() workers; results land by index.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(n);
    std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                if (failed) return;
                try {
                    out[i] = f(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

greens::TruncationPolicy with_radius(const Context& ctx, double fallback) {
    greens::TruncationPolicy p = ctx.policy;
    if (!(p.radius > 0.0)) p.radius = fallback;
    return p;
}

template <class F>
std::pair<double, double> derivatives(F f, double r, double h) {
    auto d1 = [&](double k) { return (f(r + k) - f(r - k)) / (2 * k); };
    auto d2 = [&](double k) { return (f(r + k) - 2 * f(r) + f(r - k)) / (k * k); };
    return {(4 * d1(h / 2) - d1(h)) / 3, (4 * d2(h / 2) - d2(h)) / 3};
}

// Brioschi curvature of E du^2 + 2F du dv + G dv^2 from central differences.
double fd_curvature(const std::function<deform::MetricCoefficients(double, double)>& g, double u, double v) {
    const double h = 2e-3;
    auto comp = [&](int k, double a, double b) {
        auto m = g(a, b);
        return k == 0 ? m.E : (k == 1 ? m.F : m.G);
    };
    auto rich = [&](auto f) { return (4 * f(0.5 * h) - f(h)) / 3; };
    auto d1 = [&](int k, bool du) {
        return rich([&](double s) {
            double a = du ? s : 0.0, b = du ? 0.0 : s;
            return (comp(k, u + a, v + b) - comp(k, u - a, v - b)) / (2 * s);
        });
    };
    auto d2 = [&](int k, bool du) {
        return rich([&](double s) {
            double a = du ? s : 0.0, b = du ? 0.0 : s;
            return (comp(k, u + a, v + b) - 2 * comp(k, u, v) + comp(k, u - a, v - b)) / (s * s);
        });
    };
    auto dm = [&](int k) {
        return rich([&](double s) {
            return (comp(k, u + s, v + s) - comp(k, u + s, v - s) - comp(k, u - s, v + s) + comp(k, u - s, v - s)) /
                   (4 * s * s);
        });
    };
    auto det3 = [](double a, double b, double c, double d, double e, double f, double g3, double h3, double i3) {
        return a * (e * i3 - f * h3) - b * (d * i3 - f * g3) + c * (d * h3 - e * g3);
    };
    auto m = g(u, v);
    double E = m.E, F = m.F, G = m.G;
    double Eu = d1(0, true), Ev = d1(0, false), Fu = d1(1, true), Fv = d1(1, false);
    double Gu = d1(2, true), Gv = d1(2, false);
    double Evv = d2(0, false), Guu = d2(2, true), Fuv = dm(1);
    double a = det3(-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E, F, 0.5 * Gv, F, G);
    double b = det3(0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E, F, 0.5 * Gu, F, G);
    double W = E * G - F * F;
    return (a - b) / (W * W);
}

void append(SuiteReport& r, const SuiteReport& s) {
    r.checks.insert(r.checks.end(), s.checks.begin(), s.checks.end());
}

SuiteReport greens_ode(const Context&) {
    SuiteReport rep;
    double point = 0.0, geo = 0.0;
    for (int i = 0; i <= 199; ++i) {
        double r = 0.05 * (i + 1);
        auto [p1, p2] = derivatives(greens::point_kernel_h2, r, 1e-3);
        point = std::max(point, std::abs(p2 + p1 / std::tanh(r) - 2 * greens::point_kernel_h2(r)));
        auto [g1, g2] = derivatives(greens::hourglass_kernel, r, 1e-3);
        geo = std::max(geo, std::abs(g2 + std::tanh(r) * g1 - 2 * greens::hourglass_kernel(r)));
    }
    rep.checks.push_back(make_check("point kernel ODE residual on [0.05, 10]", point, "<", 1e-6));
    rep.checks.push_back(make_check("geodesic kernel ODE residual on [0.05, 10]", geo, "<", 1e-6));
    rep.checks.push_back(make_check("|K_gamma(0) + 1/pi|", std::abs(greens::hourglass_kernel(0.0) + 1.0 / kPi), "<=",
                                    1e-15));
    double r = 1e-4;
    rep.checks.push_back(make_check("|r K'(r) - 1/(2 pi)| at r = 1e-4",
                                    std::abs(r * greens::point_kernel_h2_derivative(r) - 0.5 / kPi), "<", 1e-3));
    double R = 12.0;
    double cp = std::exp(2 * R) * greens::point_kernel_h2(R), cg = std::exp(2 * R) * greens::hourglass_kernel(R);
    rep.checks.push_back(make_check("point kernel e^{2r} K(r) at r = 12 vs -2/(3 pi), relative",
                                    std::abs(cp / (-2.0 / (3 * kPi)) - 1), "<", 1e-3));
    rep.checks.push_back(make_check("geodesic kernel e^{2r} K(r) at r = 12 vs -4/(3 pi), relative",
                                    std::abs(cg / (-4.0 / (3 * kPi)) - 1), "<", 1e-3,
                                    "the geodesic constant is twice the point-kernel constant -2/(3 pi)"));
    return rep;
}

SuiteReport greens_fubini(const Context& ctx) {
    SuiteReport rep;
    auto policy = with_radius(ctx, 13.0);
    std::vector<SurfaceModel> surfaces{ctx.surface.kind() == surface::Kind::Hourglass ? ctx.surface
                                                                                       : surface::hourglass(1.0),
                                       ctx.surface.kind() == surface::Kind::Genus2FN
                                           ? ctx.surface
                                           : surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0})};
    std::mt19937_64 rng(ctx.seed);
    for (const auto& S : surfaces) {
        auto gamma = S.gluing_curve(0);
        std::uniform_real_distribution<double> t(0.0, gamma.length), r(-2.5, 2.5);
        std::vector<HPoint> pts;
        for (int i = 0; i < 20; ++i) {
            double rr = r(rng);
            if (std::abs(rr) < 0.05) rr = std::copysign(0.05, rr);
            pts.push_back(hyp2::from_fermi(gamma.axis, {t(rng), rr}));
        }
        struct Row {
            double diff = 0, tol = 0, value = 0, cert = 0;
        };
        auto rows = parallel_map<Row>(pts.size(), [&](std::size_t i) {
            auto a = greens::geodesic_kernel(S, gamma, pts[i], policy);
            auto b = greens::geodesic_kernel_by_quadrature(S, gamma, pts[i], policy);
            return Row{std::abs(a.value - b.value), a.tail_bound + a.quadrature_error + b.tail_bound + b.quadrature_error,
                       a.value, greens::decay_certificate(S, gamma, pts[i])};
        });
        double excess = -1e300, tol = 0.0, top = -1e300, ratio = 0.0;
        for (const auto& row : rows) {
            excess = std::max(excess, row.diff - row.tol);
            tol = std::max(tol, row.tol);
            top = std::max(top, row.value);
            ratio = std::max(ratio, std::abs(row.value) / row.cert);
        }
        std::string id = S.id();
        rep.checks.push_back(make_check(id + ": max |orbit sum - quadrature| - certified tolerance", excess, "<=", 0.0));
        rep.checks.push_back(make_check(id + ": max certified tolerance", tol, "<=", 1e-5));
        rep.checks.push_back(make_check(id + ": max K_gamma at sampled points", top, "<", 0.0));
        rep.checks.push_back(make_check(id + ": max |K_gamma| / decay certificate", ratio, "<=", 1.0));
    }

    // Orbital counting bounds on random instances.
    const std::vector<surface::FNParams> fixtures{
        {{2.0, 2.0, 2.0}, {0.0, 0.0, 0.0}}, {{1.6, 2.2, 2.8}, {0.3, -0.4, 0.6}}, {{1.2, 1.5, 3.0}, {0.1, 0.2, -0.3}}};
    std::vector<SurfaceModel> models;
    for (const auto& p : fixtures) models.push_back(surface::genus2_from_fn(p));
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> px(-0.6, 0.6), py(0.5, 1.8), pr(0.5, 4.0);
    struct Instance {
        int model, curve;
        HPoint x;
        double R;
    };
    std::vector<Instance> inst;
    for (int i = 0; i < 100; ++i) {
        int m = pick(rng), c = pick(rng);
        HPoint x{px(rng), py(rng)};
        inst.push_back({m, c, x, pr(rng)});
    }
    auto viol = parallel_map<int>(inst.size(), [&](std::size_t i) {
        const auto& in = inst[i];
        const auto& S = models[in.model];
        auto gamma = S.gluing_curve(in.curve);
        double n = static_cast<double>(surface::enumerate_axis_translates(S, gamma, in.x, in.R).size());
        int v = 0;
        if (n > surface::translate_count_bound(in.R, 0.5 * S.systole_lower_bound())) ++v;
        if (n > surface::lift_count_bound(in.R, gamma.length, surface::injectivity_radius(S, in.x))) ++v;
        return v;
    });
    int total = 0;
    for (int v : viol) total += v;
    rep.checks.push_back(make_check("orbital counting violations over 100 instances", total, "<=", 0.0));
    return rep;
}

SuiteReport gauss_bonnet(const Context& ctx) {
    SuiteReport rep;
    std::vector<double> radii;
    for (int m = 1; m <= 8; ++m) radii.push_back(std::ldexp(1.0, -m));
    const double l = 2.0;
    auto one = deform::delta_gamma_limit([](double, double) { return 1.0; }, 0.0, l, radii);
    double worst = 0.0;
    for (const auto& s : one) worst = std::max(worst, s.error);
    rep.checks.push_back(make_check("f = 1: max error", worst, "<=", 1e-13, "zero up to rounding"));

    const double w = 2 * kPi / std::log(2.0);
    auto lp = [w](double r, double phase) {
        double a = std::abs(r);
        return a == 0.0 ? 0.0 : a * std::sin(w * std::log(a) + phase);
    };
    struct Fn {
        const char* name;
        std::function<double(double, double)> f;
        double lipschitz;
    };
    const double base = std::sqrt(1 + w * w);
    std::vector<Fn> fns{
        {"|r| sin(w ln|r|)", [lp](double, double r) { return lp(r, 0.0); }, base},
        {"|r| cos(w ln|r|) (1 + cos(2 pi t / l) / 2) + r",
         [lp, l](double t, double r) { return lp(r, kPi / 2) * (1 + 0.5 * std::cos(2 * kPi * t / l)) + r; },
         1.5 * base + 1 + 0.25 * kPi},
        {"max(r, 0) sin(w ln|r| + 1) + sin(2 pi t / l)",
         [lp, l](double t, double r) { return (r > 0 ? lp(r, 1.0) : 0.0) + std::sin(2 * kPi * t / l); },
         base + kPi}};
    for (const auto& fn : fns) {
        auto steps = deform::delta_gamma_limit(fn.f, fn.lipschitz, l, radii);
        double dev = 0.0, over = 0.0;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            over = std::max(over, steps[i].error / steps[i].bound);
            if (i) dev = std::max(dev, std::abs(steps[i].error / steps[i - 1].error / 0.5 - 1));
        }
        rep.checks.push_back(make_check(std::string(fn.name) + ": max |ratio / (1/2) - 1|", dev, "<=", 0.2));
        rep.checks.push_back(make_check(std::string(fn.name) + ": max error / bound", over, "<=", 1.0));
    }

    // Curvature of g_{0, s psi} and of the earthquake metric g_{phi, 0}.
    std::mt19937_64 rng(ctx.seed + 1);
    std::uniform_real_distribution<double> rad(0.3, 1.0), amp(-0.6, 0.6), unit(-1.0, 1.0);
    auto hg = surface::hourglass(2.0);
    auto chart = deform::make_chart(hg, hg.gluing_curve(0), 2.0);
    double graft_err = 0.0, quake_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        deform::BumpProfile psi(rad(rng));
        double s = amp(rng), r = 1.2 * psi.support_radius() * unit(rng), t = 0.5;
        deform::PerturbedMetricSpec g{chart, std::nullopt, psi, {}};
        double fd = fd_curvature([&](double a, double b) { return deform::perturbed_metric(g, s, a, b); }, t, r);
        graft_err = std::max(graft_err, std::abs(fd - deform::perturbed_curvature(psi, s, r)));
        deform::PerturbedMetricSpec q{chart, psi, std::nullopt, {}};
        double fq = fd_curvature([&](double a, double b) { return deform::perturbed_metric(q, s, a, b); }, t, r);
        quake_err = std::max(quake_err, std::abs(fq + 1.0));
    }
    rep.checks.push_back(make_check("grafting metric: max |closed-form - FD curvature|", graft_err, "<=", 1e-6));
    rep.checks.push_back(make_check("earthquake metric: max |FD curvature + 1|", quake_err, "<=", 1e-6));
    return rep;
}

SuiteReport graft_oracle(const Context& ctx) {
    SuiteReport rep;
    std::vector<double> ls{0.5, 1.0, 2.0, 5.0};
    if (ctx.surface.kind() == surface::Kind::Hourglass &&
        std::find(ls.begin(), ls.end(), ctx.surface.core_length()) == ls.end())
        ls.push_back(ctx.surface.core_length());
    for (double l : ls) {
        auto H = surface::hourglass(l);
        auto core = H.gluing_curve(0);
        auto r = variation::grafting_length_derivative(H, core, core);
        const double h = 1e-4;
        double oracle = (deform::grafted_hourglass_core_length(l, h) - l) / h;
        double oracle2 = (deform::grafted_hourglass_core_length(l, 2 * h) - l) / (2 * h);
        oracle = 2 * oracle - oracle2;  // one-sided Richardson: t >= 0 only
        rep.checks.push_back(make_check("hourglass l = " + io::format_double(l) + ": |total - d/dt[pi l/(pi+t)]|",
                                        std::abs(r.total - oracle), "<", 1e-6));
        rep.checks.push_back(
            make_check("hourglass l = " + io::format_double(l) + ": |total + l/pi|", std::abs(r.total + l / kPi), "<", 1e-6));
    }

    auto policy = with_radius(ctx, 12.0);
    std::vector<SurfaceModel> models{surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0}),
                                     surface::genus2_from_fn({1.6, 2.2, 2.8}, {0.3, -0.4, 0.6}),
                                     surface::genus2_from_fn({1.2, 1.5, 3.0}, {0.1, 0.2, -0.3})};
    if (ctx.surface.kind() == surface::Kind::Genus2FN) models.push_back(ctx.surface);
    struct Job {
        std::size_t model;
        int i, j;
    };
    std::vector<Job> jobs;
    for (std::size_t m = 0; m < models.size(); ++m) {
        jobs.push_back({m, 0, 0});
        jobs.push_back({m, 0, 1});
    }
    auto reports = parallel_map<variation::VariationReport>(jobs.size(), [&](std::size_t k) {
        const auto& S = models[jobs[k].model];
        return variation::grafting_length_derivative(S, S.gluing_curve(jobs[k].i), S.gluing_curve(jobs[k].j), policy);
    });
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto& S = models[jobs[k].model];
        const auto& r = reports[k];
        auto g = S.gluing_curve(jobs[k].i);
        if (jobs[k].i == jobs[k].j) {
            double slack = -1.0 / kPi - r.total / g.length - r.tail_bound / g.length;
            rep.checks.push_back(make_check(S.id() + " " + g.word + ": certified slack -1/pi - dlog l/dt", slack, ">", 1e-3));
        } else {
            double ratio = r.decay_bound ? std::abs(r.total) / *r.decay_bound : INFINITY;
            rep.checks.push_back(make_check(S.id() + " " + g.word + " vs " + S.gluing_curve(jobs[k].j).word +
                                                ": |total| / (C l' e^{-d})",
                                            ratio, "<=", 1.0));
        }
    }
    return rep;
}

SuiteReport wolpert(const Context& ctx) {
    SuiteReport rep;
    std::vector<surface::FNParams> params{{{1.6, 2.2, 2.8}, {0.3, -0.4, 0.6}}};
    if (ctx.surface.kind() == surface::Kind::Genus2FN) params.push_back(ctx.surface.fn());
    const std::vector<std::string> words{"b1", "b2", "a1b1", "a2b2", "a1b2", "b1b2", "b1A2", "a1b1b2", "b1b1a2"};
    for (const auto& p : params) {
        auto S = surface::genus2_from_fn(p);
        for (int i = 0; i < 3; ++i) {
            auto g = S.gluing_curve(i);
            int crossing = 0;
            double worst = 0.0, zero = 0.0;
            for (const auto& w : words) {
                auto gp = S.geodesic(w);
                double q = variation::earthquake_length_derivative(S, g, gp);
                double fd = variation::fn_twist_fd_oracle(p, i, w, 1e-4);
                if (surface::crossings(S, g, gp).empty()) {
                    zero = std::max({zero, std::abs(q), std::abs(fd)});
                } else {
                    ++crossing;
                    worst = std::max(worst, std::abs(q - fd));
                }
            }
            for (int j = 0; j < 3; ++j) {
                auto other = S.gluing_curve(j);
                zero = std::max(zero, std::abs(variation::earthquake_length_derivative(S, g, other)));
                zero = std::max(zero, std::abs(variation::fn_twist_fd_oracle(p, i, other.word, 1e-4)));
            }
            std::string id = S.id() + " " + g.word;
            rep.checks.push_back(make_check(id + ": crossing classes", crossing, ">=", 5.0));
            rep.checks.push_back(make_check(id + ": max |formula - FD| over crossing classes", worst, "<=", 1e-3));
            rep.checks.push_back(make_check(id + ": max |derivative| on the curve and disjoint classes", zero, "<=", 1e-9));
        }
    }
    return rep;
}

SuiteReport delta_matrix(const Context& ctx) {
    SuiteReport rep;
    auto policy = with_radius(ctx, 12.0);
    SurfaceModel S = ctx.surface.kind() == surface::Kind::Genus2FN
                         ? ctx.surface
                         : surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
    std::vector<surface::GeodesicClass> gs{S.gluing_curve(0), S.gluing_curve(1)};
    auto fields = parallel_map<variation::PerturbationField>(gs.size(), [&](std::size_t i) {
        double a = std::min(0.3, 0.45 * surface::collar_width(S, gs[i]));
        return variation::make_hyperbolic_perturbation(S, gs[i], deform::BumpProfile(a), policy, 12);
    });
    for (std::size_t i = 0; i < gs.size(); ++i)
        rep.checks.push_back(make_check(gs[i].word + ": perturbation residual", fields[i].residual_norm, "<", 1e-3));
    auto D = variation::delta_matrix(S, gs, fields);
    for (std::size_t i = 0; i < gs.size(); ++i)
        rep.checks.push_back(make_check(gs[i].word + ": diagonal entry", D.M[i][i], "<", -1.0 / (2 * kPi)));
    rep.checks.push_back(make_check("diagonal dominance margin", D.dominance_margin, ">", 0.0));
    rep.checks.push_back(make_check("|determinant|", std::abs(D.determinant), ">", 0.0));
    std::mt19937_64 rng(ctx.seed + 2);
    std::uniform_real_distribution<double> target(-1.0, 1.0);
    std::vector<double> a{target(rng), target(rng)};
    auto alpha = variation::prescribe(D, a);
    auto A = variation::combine(fields, alpha);
    double err = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i)
        err = std::max(err, std::abs(variation::delta_functional(S, gs[i], A).value - a[i]));
    rep.checks.push_back(make_check("prescribed targets: max |Delta - a|", err, "<=", 1e-6));
    return rep;
}

using SuiteFn = SuiteReport (*)(const Context&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"greens-ode", greens_ode}, {"greens-fubini", greens_fubini}, {"gauss-bonnet", gauss_bonnet},
        {"graft-oracle", graft_oracle}, {"wolpert", wolpert},         {"delta-matrix", delta_matrix}};
    return r;
}

}  // namespace

std::size_t thread_count() {
    if (const char* env = std::getenv("GRAFTLAB_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

bool SuiteReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, f] : registry()) n.push_back(k);
        n.push_back("all");
        return n;
    }();
    return names;
}

bool is_suite(std::string_view name) {
    const auto& n = suite_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

SuiteReport run_suite(std::string_view name, const Context& ctx) {
    if (!is_suite(name)) throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
    auto start = std::chrono::steady_clock::now();
    SuiteReport rep;
    rep.suite = std::string(name);
    for (const auto& [k, f] : registry())
        if (name == "all" || name == k) append(rep, f(ctx));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

io::json report_json(const SuiteReport& r) {
    io::json checks = io::json::array();
    for (const auto& c : r.checks) {
        io::json j{{"name", c.name},
                   {"measured", c.measured},
                   {"relation", c.relation},
                   {"bound", c.bound},
                   {"passed", c.passed}};
        if (!c.note.empty()) j["note"] = c.note;
        checks.push_back(std::move(j));
    }
    return io::json{{"suite", r.suite}, {"passed", r.passed()}, {"checks", std::move(checks)}};
}

}  // namespace graftlab::verify
