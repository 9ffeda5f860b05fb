#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "graftlab/variation.hpp"
#include "oracles.hpp"

using namespace graftlab;
using namespace graftlab::variation;

namespace {

constexpr double kPi = std::numbers::pi;
const TruncationPolicy kPolicy{12.0, 1e-8, 14};

const SurfaceModel& symmetric() {
    static const SurfaceModel S = surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
    return S;
}

const surface::FNParams kTwisted{{1.6, 2.2, 2.8}, {0.3, -0.4, 0.6}};

const SurfaceModel& twisted() {
    static const SurfaceModel S = surface::genus2_from_fn(kTwisted);
    return S;
}

// Length of the core after grafting by t, read off from the module pi l / (pi + t).
double grafted_core(double l, double t) { return kPi * l / (kPi + t); }

}  // namespace

TEST(Keystone, HourglassSelfGrafting) {
    for (double l : {0.5, 1.0, 2.0, 5.0}) {
        SurfaceModel H = surface::hourglass(l);
        auto core = H.gluing_curve(0);
        auto rep = grafting_length_derivative(H, core, core);
        const double h = 1e-4;
        double oracle = (grafted_core(l, h) - grafted_core(l, -h)) / (2 * h);
        EXPECT_NEAR(rep.total, oracle, 1e-6) << "l = " << l;
        EXPECT_NEAR(rep.total, -l / kPi, 1e-9);
        EXPECT_EQ(rep.sin_term, 0.0);
    }
}

TEST(SelfGrafting, StrictlyBelowHourglassRate) {
    const std::vector<surface::FNParams> sets{
        {{2.0, 2.0, 2.0}, {0.0, 0.0, 0.0}}, kTwisted, {{1.2, 1.5, 3.0}, {0.1, 0.2, -0.3}}};
    for (const auto& p : sets) {
        SurfaceModel S = surface::genus2_from_fn(p);
        auto g = S.gluing_curve(0);
        auto rep = grafting_length_derivative(S, g, g, kPolicy);
        double rate = rep.total / g.length;
        EXPECT_GT(-1.0 / kPi - rate - rep.tail_bound / g.length, 1e-3) << "l = " << g.length;
    }
}

TEST(Grafting, KernelTermIsSymmetric) {
    const auto& S = symmetric();
    auto a1 = S.gluing_curve(0), a2 = S.gluing_curve(1), b1 = S.geodesic("b1");
    auto x = kernel_along(S, a1, a2, kPolicy), y = kernel_along(S, a2, a1, kPolicy);
    EXPECT_NEAR(x.value, y.value, x.tail_bound + y.tail_bound + 1e-8);
    auto p = grafting_length_derivative(S, a1, b1, kPolicy), q = grafting_length_derivative(S, b1, a1, kPolicy);
    EXPECT_NEAR(p.sin_term, q.sin_term, 1e-12);
    EXPECT_NEAR(p.total, q.total, p.tail_bound + q.tail_bound + 1e-8);
}

TEST(Grafting, DisjointPairsDecay) {
    const auto& S = twisted();
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
        auto g = S.gluing_curve(i), gp = S.gluing_curve(j);
        auto rep = grafting_length_derivative(S, g, gp, kPolicy);
        ASSERT_TRUE(rep.decay_bound.has_value());
        EXPECT_EQ(rep.crossings, 0u);
        EXPECT_LT(rep.total, 0.0);
        EXPECT_LE(std::abs(rep.total), *rep.decay_bound);
    }
}

TEST(Wolpert, MatchesTwistDifferences) {
    const auto& S = twisted();
    auto a1 = S.gluing_curve(0);
    int crossing = 0;
    for (const char* w : {"b1", "b2", "a1b1", "a2b2", "a1b2", "b1b2", "b1A2"}) {
        auto gp = S.geodesic(w);
        ASSERT_FALSE(surface::crossings(S, a1, gp).empty()) << w;
        double q = earthquake_length_derivative(S, a1, gp);
        double f1 = fn_twist_fd_oracle(kTwisted, 0, w, 1e-3), f2 = fn_twist_fd_oracle(kTwisted, 0, w, 5e-4);
        double rich = (4 * f2 - f1) / 3;
        EXPECT_NEAR(f1, f2, 1e-7) << w;
        EXPECT_NEAR(q, rich, 1e-7) << w;
        ++crossing;
    }
    EXPECT_GE(crossing, 5);
}

TEST(Wolpert, VanishesOffTheCurve) {
    const auto& S = twisted();
    auto a1 = S.gluing_curve(0);
    for (const char* w : {"a1", "a2", "a1a2", "a1A2"}) {
        EXPECT_NEAR(earthquake_length_derivative(S, a1, S.geodesic(w)), 0.0, 1e-9) << w;
        EXPECT_NEAR(fn_twist_fd_oracle(kTwisted, 0, w, 1e-3), 0.0, 1e-9) << w;
    }
}

TEST(Perturbation, DivergenceTermHasNoCoshMass) {
    for (auto shape : {deform::Template::SmoothBump, deform::Template::Plateau})
        for (double a : {0.2, 0.8}) {
            deform::BumpProfile psi(a, deform::Normalization::GraftUnit, shape);
            const int n = 40000;
            double h = 2 * a / n, sum = 0.0;
            for (int i = 0; i <= n; ++i) {
                double r = -a + i * h, w = (i == 0 || i == n) ? 0.5 : 1.0;
                sum += w * divergence_term(psi, r) * std::cosh(r);
            }
            EXPECT_NEAR(sum * h, 0.0, 1e-10);
        }
}

TEST(Perturbation, ResidualSmallInCollar) {
    const auto& S = symmetric();
    deform::BumpProfile psi(0.4);
    auto A = make_hyperbolic_perturbation(S, S.gluing_curve(0), psi, kPolicy, 12);
    EXPECT_LT(A.residual_norm, 1e-3);
}

// The metric g + tau g(A., .) in Fermi coordinates about the curve keeps
// curvature -1 to first order in tau.
TEST(Perturbation, CurvatureIsStationary) {
    const auto& S = symmetric();
    auto a1 = S.gluing_curve(0);
    deform::BumpProfile psi(0.4);
    auto A = make_hyperbolic_perturbation(S, a1, psi, kPolicy, 0);
    const auto& u = *A.conformal.front().u;
    for (double r : {-0.3, 0.0, 0.15, 0.6}) {
        const double t = 0.5;
        HPoint centre = hyp2::from_fermi(a1.axis, {t, r});
        auto lines = u.translates_near(centre, 0.05);
        auto u_at = [&](double tt, double rr) {
            HPoint x = hyp2::from_fermi(a1.axis, {tt, rr});
            double v = 0.0;
            for (const auto& l : lines) v += u.profile(hyp2::fermi(l, x).r);
            return v;
        };
        auto kappa = [&](double tau) {
            auto metric = [&](double tt, double rr) {
                double uu = u_at(tt, rr), ch = std::cosh(rr);
                return oracle::Metric2{(1 + tau * uu) * ch * ch, 0.0, 1 + tau * (uu + psi(rr))};
            };
            return oracle::brioschi_curvature(metric, t, r);
        };
        const double tau = 1e-2;
        EXPECT_NEAR(kappa(0.0), -1.0, 1e-7);
        EXPECT_LT(std::abs(kappa(tau) - kappa(-tau)) / (2 * tau), 1e-3) << "r = " << r;
    }
}

TEST(DeltaFunctional, IdentityGivesOne) {
    const auto& S = symmetric();
    PerturbationField A;
    A.constant = 1.0;
    for (const char* w : {"a1", "b1", "a1b1"}) EXPECT_NEAR(delta_functional(S, S.geodesic(w), A).value, 1.0, 1e-10);
}

TEST(DeltaFunctional, HourglassCoreIsMinusOneOverPi) {
    for (double l : {0.7, 2.0})
        for (auto shape : {deform::Template::SmoothBump, deform::Template::PolyBump}) {
            SurfaceModel H = surface::hourglass(l);
            auto core = H.gluing_curve(0);
            deform::BumpProfile psi(0.5, deform::Normalization::GraftUnit, shape);
            auto A = make_hyperbolic_perturbation(H, core, psi, {}, 8);
            EXPECT_NEAR(delta_functional(H, core, A).value, -1.0 / kPi, 1e-6);
            EXPECT_LT(A.residual_norm, 1e-3);
        }
}

TEST(DeltaFunctional, Linear) {
    const auto& S = symmetric();
    auto a1 = S.gluing_curve(0), a2 = S.gluing_curve(1), b1 = S.geodesic("b1");
    auto A = make_hyperbolic_perturbation(S, a1, deform::BumpProfile(0.3), kPolicy, 0);
    auto B = make_hyperbolic_perturbation(S, a2, deform::BumpProfile(0.5), kPolicy, 0);
    const double x = 0.7, y = -1.9;
    auto C = combine({A, B}, {x, y});
    for (const auto& g : {a1, b1}) {
        double lhs = delta_functional(S, g, C).value;
        double rhs = x * delta_functional(S, g, A).value + y * delta_functional(S, g, B).value;
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(DeltaMatrix, SeparatedCurvesAreDominant) {
    const auto& S = symmetric();
    std::vector<GeodesicClass> gs{S.gluing_curve(0), S.gluing_curve(1)};
    std::vector<PerturbationField> fs;
    for (const auto& g : gs) fs.push_back(make_hyperbolic_perturbation(S, g, deform::BumpProfile(0.3), kPolicy, 0));
    auto D = delta_matrix(S, gs, fs);
    for (double d : D.diagonal) EXPECT_LT(d, -1.0 / (2 * kPi));
    EXPECT_TRUE(D.diagonal_target);
    EXPECT_TRUE(D.invertible);
    EXPECT_GT(D.dominance_margin, 0.0);
    EXPECT_NE(D.determinant, 0.0);

    const std::vector<double> target{0.25, -0.4};
    auto alpha = prescribe(D, target);
    auto A = combine(fs, alpha);
    for (std::size_t i = 0; i < gs.size(); ++i) EXPECT_NEAR(delta_functional(S, gs[i], A).value, target[i], 1e-6);
}

TEST(Linearization, AgreesWithGrafting) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> length(0.3, 4.0), radius(0.1, 1.5);
    std::uniform_int_distribution<int> shape(0, 2);
    const deform::Template shapes[] = {deform::Template::SmoothBump, deform::Template::PolyBump,
                                       deform::Template::Plateau};
    for (int k = 0; k < 10; ++k) {
        SurfaceModel H = surface::hourglass(length(rng));
        auto core = H.gluing_curve(0);
        deform::BumpProfile psi(radius(rng), deform::Normalization::GraftUnit, shapes[shape(rng)]);
        double lin = length_derivative_via_linearization(H, core, psi, core);
        EXPECT_NEAR(lin, grafting_length_derivative(H, core, core).total, 1e-6);
    }
    // Off the hourglass the crossing term comes from the collar part.
    const auto& S = symmetric();
    auto a1 = S.gluing_curve(0), b1 = S.geodesic("b1");
    double lin = length_derivative_via_linearization(S, a1, deform::BumpProfile(0.25), b1, kPolicy);
    auto rep = grafting_length_derivative(S, a1, b1, kPolicy);
    EXPECT_NEAR(lin, rep.total, 2 * rep.tail_bound + 1e-6);
}
