#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "graftlab/greens.hpp"
#include "graftlab/quadrature.hpp"

using namespace graftlab;
using namespace graftlab::greens;
using hyp2::HPoint;

namespace {

constexpr double kPi = std::numbers::pi;

// Long-double evaluations of the closed forms through different identities.
double point_oracle(double r) {
    long double c = std::cosh(static_cast<long double>(r));
    return static_cast<double>((1.0L - c * std::atanh(1.0L / c)) / (2.0L * std::numbers::pi_v<long double>));
}

double hourglass_oracle(double r) {
    long double s = std::sinh(std::abs(static_cast<long double>(r)));
    long double acot = std::asin(1.0L / std::sqrt(1.0L + s * s));
    return static_cast<double>((-1.0L + s * acot) / std::numbers::pi_v<long double>);
}

// Richardson-extrapolated central differences.
template <class F>
std::pair<double, double> derivatives(F f, double r, double h) {
    auto d1 = [&](double k) { return (f(r + k) - f(r - k)) / (2 * k); };
    auto d2 = [&](double k) { return (f(r + k) - 2 * f(r) + f(r - k)) / (k * k); };
    return {(4 * d1(h / 2) - d1(h)) / 3, (4 * d2(h / 2) - d2(h)) / 3};
}

const surface::SurfaceModel& genus2() {
    static const auto S = surface::genus2_from_fn({2.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
    return S;
}

HPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> x(-0.6, 0.6), y(0.5, 1.8);
    return {x(rng), y(rng)};
}

}  // namespace

TEST(PointKernel, Examples) {
    EXPECT_NEAR(point_kernel_h2(1.0), -0.030424, 1e-6);
    for (double r : {0.01, 0.3, 1.0, 4.0, 12.0, 30.0})
        EXPECT_NEAR(point_kernel_h2(r), point_oracle(r), 1e-13 + 1e-11 * std::abs(point_oracle(r)));
    EXPECT_NEAR(std::exp(20.0) * point_kernel_h2(10.0), -2.0 / (3.0 * kPi), 1e-3);
    EXPECT_NEAR(1e-4 * point_kernel_h2_derivative(1e-4), 1.0 / (2.0 * kPi), 1e-3);
    EXPECT_THROW(point_kernel_h2(0.0), singular_point);
    EXPECT_THROW(point_kernel_h2(-1.0), singular_point);
}

TEST(PointKernel, DerivativeMatchesDifferences) {
    for (double r : {0.1, 0.7, 2.0, 5.0, 9.0}) {
        auto [d1, d2] = derivatives(point_kernel_h2, r, 1e-3);
        EXPECT_NEAR(point_kernel_h2_derivative(r), d1, 1e-9);
    }
}

TEST(HourglassKernel, Examples) {
    EXPECT_EQ(hourglass_kernel(0.0), -1.0 / kPi);
    for (double r : {-2.0, 0.2, 1.0, 3.0, 8.0, 25.0})
        EXPECT_NEAR(hourglass_kernel(r), hourglass_oracle(r), 1e-14 + 1e-11 * std::abs(hourglass_oracle(r)));
    EXPECT_EQ(hourglass_kernel(-0.7), hourglass_kernel(0.7));
    // One-sided slope at the core gives a unit jump across it.
    double h = 1e-6;
    double slope = (hourglass_oracle(2 * h) - hourglass_oracle(h)) / h;
    EXPECT_NEAR(hourglass_kernel_derivative(0.0), 0.5, 1e-12);
    EXPECT_NEAR(slope, 0.5, 1e-5);
}

TEST(HourglassKernel, AsymptoticConstant) {
    // The series of the closed form gives -4/(3 pi), twice the point case.
    EXPECT_NEAR(std::exp(20.0) * hourglass_kernel(10.0), -4.0 / (3.0 * kPi), 1e-3);
}

TEST(Kernels, RadialOdeResiduals) {
    for (double r = 0.05; r <= 10.0 + 1e-12; r += 0.05) {
        auto [p1, p2] = derivatives(point_kernel_h2, r, 1e-3);
        EXPECT_LT(std::abs(p2 + p1 / std::tanh(r) - 2 * point_kernel_h2(r)), 1e-6) << r;
        auto [g1, g2] = derivatives(hourglass_kernel, r, 1e-3);
        EXPECT_LT(std::abs(g2 + std::tanh(r) * g1 - 2 * hourglass_kernel(r)), 1e-6) << r;
    }
}

TEST(Kernels, NegativeOnLogGrid) {
    for (double r = 1e-6; r < 300.0; r *= 1.3) {
        EXPECT_LT(point_kernel_h2(r), 0.0) << r;
        EXPECT_LT(hourglass_kernel(r), 0.0) << r;
    }
}

TEST(Kernels, Integrable) {
    auto f = [](double r) { return 2 * kPi * std::abs(point_kernel_h2(r)) * std::sinh(r); };
    quad::Options opt;
    opt.abs_tol = 1e-12;
    double prev = 0.0, last = 0.0;
    for (double R = 14.0; R <= 20.0; R += 2.0) {
        last = quad::integrate(f, 0.01, R, opt).value;
        // the integrand tails like (2/3) e^{-r}
        if (R > 14.0) EXPECT_LT(std::abs(last - prev), 0.7 * std::exp(-(R - 2.0)));
        prev = last;
    }
    // L K = delta forces the integral of K over the plane to be -1/2; the
    // disc of radius 0.01 carries about 1e-4.
    EXPECT_NEAR(-last, -0.5, 1e-3);
    double g = quad::integrate([](double r) { return hourglass_kernel(r) * std::cosh(r); }, 0.0, 30.0, opt).value;
    EXPECT_NEAR(2 * g, -0.5, 1e-9);
}

TEST(SurfacePointKernel, HourglassManualSum) {
    const double l = 1.0;
    auto S = surface::hourglass(l);
    auto axis = S.gluing_curve(0).axis;
    double rx = 2.5, ry = 2.2, tx = 0.1, ty = 0.45;
    HPoint x = hyp2::from_fermi(axis, {tx, rx});
    HPoint y = hyp2::from_fermi(axis, {ty, ry});
    auto ev = surface_point_kernel(S, x, y);
    auto term = [&](int n) {
        double c = std::cosh(rx) * std::cosh(ry) * std::cosh(ty + n * l - tx) - std::sinh(rx) * std::sinh(ry);
        return point_kernel_h2(std::acosh(c));
    };
    double manual = 0.0;
    for (int n = -60; n <= 60; ++n) manual += term(n);
    EXPECT_LE(std::abs(ev.value - manual), ev.tail_bound + 1e-14);
    // Far out on one end the identity and the nearest wrap dominate.
    double two = term(0) + term(-1);
    EXPECT_LT(std::abs(ev.value - two), 0.05 * std::abs(two));
    EXPECT_LT(ev.value, 0.0);
}

TEST(SurfacePointKernel, NegativeAndSymmetric) {
    std::mt19937_64 rng(3);
    TruncationPolicy pol;
    pol.radius = 9.0;
    for (int i = 0; i < 5; ++i) {
        HPoint x = random_point(rng), y = random_point(rng);
        auto a = surface_point_kernel(genus2(), x, y, pol);
        auto b = surface_point_kernel(genus2(), y, x, pol);
        EXPECT_LT(a.value, 0.0);
        EXPECT_LE(std::abs(a.value - b.value), a.tail_bound + b.tail_bound);
    }
    EXPECT_THROW(surface_point_kernel(genus2(), {0.1, 0.8}, {0.1, 0.8}), singular_point);
}

TEST(SurfacePointKernel, TailBracketsRefinement) {
    HPoint x{0.2, 0.7}, y{-0.3, 1.4};
    TruncationPolicy small, large;
    small.radius = 7.0;
    large.radius = 11.0;
    auto a = surface_point_kernel(genus2(), x, y, small);
    auto b = surface_point_kernel(genus2(), x, y, large);
    EXPECT_LE(std::abs(a.value - b.value), a.tail_bound);
    EXPECT_LT(b.tail_bound, a.tail_bound);
}

TEST(GeodesicKernel, HourglassSingleTerm) {
    auto S = surface::hourglass(1.3);
    auto core = S.gluing_curve(0);
    for (double r : {-1.5, 0.0, 0.4, 3.0}) {
        HPoint x = hyp2::from_fermi(core.axis, {0.3, r});
        auto ev = geodesic_kernel(S, core, x);
        EXPECT_NEAR(ev.value, hourglass_kernel(r), 1e-13);
        EXPECT_EQ(ev.terms, 1u);
        EXPECT_EQ(ev.tail_bound, 0.0);
    }
}

TEST(GeodesicKernel, NegativeAndBelowOnCurve) {
    TruncationPolicy pol;
    pol.radius = 9.0;
    auto gamma = genus2().gluing_curve(1);
    GeodesicKernelField K(genus2(), gamma, pol);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5; ++i) {
        auto ev = K(random_point(rng));
        EXPECT_LT(ev.value + ev.tail_bound, 0.0);
    }
    for (double t : {0.0, 0.7, 1.9}) {
        auto ev = K(gamma.axis.point_at(t));
        EXPECT_LE(ev.value - ev.tail_bound, -1.0 / kPi);
    }
}

TEST(GeodesicKernel, TailBracketsRefinement) {
    auto gamma = genus2().gluing_curve(0);
    HPoint x{0.25, 1.1};
    TruncationPolicy small, large;
    small.radius = 8.0;
    large.radius = 11.0;
    auto a = geodesic_kernel(genus2(), gamma, x, small);
    auto b = geodesic_kernel(genus2(), gamma, x, large);
    EXPECT_LE(std::abs(a.value - b.value), a.tail_bound);
}

TEST(GeodesicKernelQuadrature, HourglassClosedForm) {
    auto S = surface::hourglass(2.0);
    auto core = S.gluing_curve(0);
    HPoint x = hyp2::from_fermi(core.axis, {0.5, 1.0});
    auto ev = geodesic_kernel_by_quadrature(S, core, x);
    EXPECT_NEAR(ev.value, hourglass_kernel(1.0), 1e-7);

    double s0 = surface::segment_start(core), s1 = s0 + core.length, sm = s0 + 0.37 * core.length;
    auto a = geodesic_kernel_by_quadrature(S, core, x, s0, sm);
    auto b = geodesic_kernel_by_quadrature(S, core, x, sm, s1);
    EXPECT_NEAR(a.value + b.value, ev.value, 1e-9);
    EXPECT_THROW(geodesic_kernel_by_quadrature(S, core, core.axis.point_at(0.2)), singular_point);
}

TEST(GeodesicKernelQuadrature, AgreesWithOrbitSumOnGenus2) {
    TruncationPolicy pol;
    pol.radius = 10.0;
    auto gamma = genus2().gluing_curve(2);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 2; ++i) {
        HPoint x = random_point(rng);
        auto a = geodesic_kernel(genus2(), gamma, x, pol);
        auto b = geodesic_kernel_by_quadrature(genus2(), gamma, x, pol);
        EXPECT_LE(std::abs(a.value - b.value),
                  a.tail_bound + b.tail_bound + b.quadrature_error + 1e-9);
    }
}

TEST(Decay, CertificateDominatesKernel) {
    TruncationPolicy pol;
    pol.radius = 10.0;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> t(0.0, 2.0), r(-6.0, 6.0);
    for (int c = 0; c < 2; ++c) {
        auto gamma = genus2().gluing_curve(c);
        GeodesicKernelField K(genus2(), gamma, pol);
        for (int i = 0; i < 25; ++i) {
            HPoint x = hyp2::from_fermi(gamma.axis, {t(rng), r(rng)});
            auto ev = K(x);
            EXPECT_GE(decay_certificate(genus2(), gamma, x), std::abs(ev.value) + ev.tail_bound);
        }
    }
}

TEST(Decay, HourglassSharperRate) {
    double C = hourglass_decay_constant();
    EXPECT_GE(C, 4.0 / (3.0 * kPi));
    for (double r = 0.0; r < 30.0; r += 0.37) EXPECT_LE(std::abs(hourglass_kernel(r)), C * std::exp(-2 * r));
}

TEST(Decay, MonotoneAlongFermiRay) {
    auto gamma = genus2().gluing_curve(0);
    double w = surface::collar_width(genus2(), gamma);
    double prev = 1e300;
    for (double r = 0.0; r < w; r += 0.1) {
        double c = decay_certificate(genus2(), gamma, hyp2::from_fermi(gamma.axis, {0.4, r}));
        EXPECT_LE(c, prev);
        prev = c;
    }
}

namespace {

double bump(double r, double a) {
    if (std::abs(r) >= a) return 0.0;
    double u = r / a;
    return std::exp(-1.0 / (1.0 - u * u));
}

// Fermi-coordinate residual of L u - f at (t, r), Richardson-extrapolated.
double residual(const LSolution& u, const hyp2::GeodesicLine& axis, double t, double r,
                const std::function<double(double)>& f) {
    auto at = [&](double tt, double rr) { return u(hyp2::from_fermi(axis, {tt, rr})); };
    auto lap = [&](double h) {
        double c = at(t, r);
        double urr = (at(t, r + h) - 2 * c + at(t, r - h)) / (h * h);
        double ur = (at(t, r + h) - at(t, r - h)) / (2 * h);
        double utt = (at(t + h, r) - 2 * c + at(t - h, r)) / (h * h);
        return urr + std::tanh(r) * ur + utt / (std::cosh(r) * std::cosh(r));
    };
    double h = 1e-3;
    double L = (4 * lap(h / 2) - lap(h)) / 3;
    return L - 2 * u(hyp2::from_fermi(axis, {t, r})) - f(r);
}

}  // namespace

TEST(SolveL, ZeroSourceGivesZero) {
    auto S = surface::hourglass(1.0);
    CollarSource src{S.gluing_curve(0), [](double) { return 0.0; }, 0.5, {}};
    auto u = solve_L(S, src);
    for (double r : {-1.0, 0.0, 0.3, 2.0}) EXPECT_EQ(u(hyp2::from_fermi(src.gamma.axis, {0.2, r})), 0.0);
}

TEST(SolveL, HourglassDependsOnROnly) {
    auto S = surface::hourglass(1.0);
    CollarSource src{S.gluing_curve(0), [](double r) { return bump(r - 0.1, 0.6); }, 0.7, {}};
    auto u = solve_L(S, src);
    for (int i = 0; i < 10; ++i) {
        double r = -1.0 + 0.25 * i;
        double ref = u(hyp2::from_fermi(src.gamma.axis, {0.0, r}));
        EXPECT_NEAR(u(hyp2::from_fermi(src.gamma.axis, {0.13 * i + 0.05, r})), ref, 1e-8);
    }
}

TEST(SolveL, FiniteDifferenceResidualHourglass) {
    auto S = surface::hourglass(1.5);
    auto f = [](double r) { return bump(r, 0.8) * (1.0 + r); };
    CollarSource src{S.gluing_curve(0), f, 0.8, {}};
    auto u = solve_L(S, src);
    for (double r : {-1.5, -0.6, -0.2, 0.0, 0.35, 0.7, 1.2, 3.0})
        EXPECT_LT(std::abs(residual(u, src.gamma.axis, 0.3, r, f)), 1e-4) << r;
}

TEST(SolveL, FiniteDifferenceResidualGenus2) {
    auto gamma = genus2().gluing_curve(0);
    auto f = [](double r) { return bump(r, 0.6); };
    CollarSource src{gamma, f, 0.6, {}};
    TruncationPolicy pol;
    pol.radius = 7.0;
    auto u = solve_L(genus2(), src, pol);
    for (double r : {-1.2, -0.3, 0.0, 0.45, 1.0})
        EXPECT_LT(std::abs(residual(u, gamma.axis, 0.7, r, f)), 1e-4) << r;
    // Away from the collar, L u = 0.
    auto zero = [](double) { return 0.0; };
    HPoint far{0.3, 1.6};
    auto chart = hyp2::fermi(gamma.axis, far);
    if (std::abs(chart.r) > 0.7) EXPECT_LT(std::abs(residual(u, gamma.axis, chart.t, chart.r, zero)), 1e-4);
}

TEST(SolveL, SupportMustStayInCollar) {
    auto gamma = genus2().gluing_curve(0);
    double w = surface::collar_width(genus2(), gamma);
    CollarSource src{gamma, [](double) { return 1.0; }, w + 0.1, {}};
    EXPECT_THROW(solve_L(genus2(), src), std::domain_error);
}
