#include "graftlab/deform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "graftlab/quadrature.hpp"

namespace graftlab::deform {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth descent from 1 at u = 0 to 0 at u = 1, and its derivative.
double descent(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    double q = -1.0 / u + 1.0 / (1.0 - u);
    return 1.0 / (1.0 + std::exp(q));
}

double descent_derivative(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double q = -1.0 / u + 1.0 / (1.0 - u);
    double S = 1.0 / (1.0 + std::exp(q));
    return -S * (1.0 - S) * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)));
}

std::vector<double> template_breaks(Template shape, double R) {
    if (shape == Template::Plateau) return {-R, -0.5 * R, 0.0, 0.5 * R, R};
    return {-R, 0.0, R};
}

}  // namespace

double template_value(Template shape, double x) {
    double ax = std::abs(x);
    if (ax >= 1.0) return 0.0;
    switch (shape) {
    case Template::SmoothBump:
        return std::exp(-1.0 / (1.0 - x * x));
    case Template::PolyBump: {
        double w = 1.0 - x * x;
        return w * w * w;
    }
    case Template::Plateau:
        return descent(2.0 * ax - 1.0);
    }
    return 0.0;
}

double template_derivative(Template shape, double x) {
    double ax = std::abs(x);
    if (ax >= 1.0) return 0.0;
    switch (shape) {
    case Template::SmoothBump: {
        double w = 1.0 - x * x;
        return std::exp(-1.0 / w) * (-2.0 * x / (w * w));
    }
    case Template::PolyBump: {
        double w = 1.0 - x * x;
        return -6.0 * x * w * w;
    }
    case Template::Plateau:
        return 2.0 * std::copysign(1.0, x) * descent_derivative(2.0 * ax - 1.0);
    }
    return 0.0;
}

BumpProfile::BumpProfile(double support_radius, Normalization n, Template shape, double amplitude)
    : R_(support_radius), norm_(n), shape_(shape) {
    if (!(R_ > 0.0)) throw std::invalid_argument("profile support radius must be positive");
    if (n == Normalization::Raw) {
        c_ = amplitude;
        return;
    }
    quad::Options opt;
    opt.abs_tol = 1e-15 * R_;
    auto f = [&](double r) {
        double w = n == Normalization::GraftUnit ? 1.0 / std::cosh(r) : std::cosh(r);
        return template_value(shape_, r / R_) * w;
    };
    c_ = 1.0 / quad::integrate_pieces(f, template_breaks(shape_, R_), opt).value;
}

double BumpProfile::operator()(double r) const { return c_ * template_value(shape_, r / R_); }

double BumpProfile::derivative(double r) const {
    return c_ * template_derivative(shape_, r / R_) / R_;
}

double BumpProfile::l1_norm() const {
    quad::Options opt;
    opt.abs_tol = 1e-15;
    auto f = [&](double x) { return template_value(shape_, x); };
    return std::abs(c_) * R_ * quad::integrate_pieces(f, template_breaks(shape_, 1.0), opt).value;
}

CollarChart make_chart(const SurfaceModel& S, const GeodesicClass& gamma, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("chart half-width must be positive");
    if (R >= collar_width(S, gamma)) throw std::domain_error("chart is wider than the collar of " + gamma.word);
    return {S, gamma, R};
}

MetricCoefficients perturbed_metric(const PerturbedMetricSpec& spec, double s, double t, double r) {
    double ch = std::cosh(r);
    double phi = spec.phi ? s * (*spec.phi)(r) : 0.0;
    double psi = spec.psi ? s * (*spec.psi)(r) : 0.0;
    double conf = spec.conformal_factor ? std::exp(2.0 * spec.conformal_factor(t, r)) : 1.0;
    return {conf * ch * ch, -conf * ch * phi, conf * (phi * phi + std::exp(2.0 * psi))};
}

double grafting_amount(const BumpProfile& psi, double s) {
    if (s == 0.0) return 0.0;
    const double R = psi.support_radius();
    quad::Options opt;
    opt.abs_tol = 1e-14;
    auto f = [&](double r) { return std::expm1(s * psi(r)) / std::cosh(r); };
    return quad::integrate_pieces(f, template_breaks(psi.shape(), R), opt).value;
}

double earthquake_amount(const BumpProfile& phi, double s) {
    if (s == 0.0) return 0.0;
    quad::Options opt;
    opt.abs_tol = 1e-15;
    auto f = [&](double r) { return phi(r) / std::cosh(r); };
    return s * quad::integrate_pieces(f, template_breaks(phi.shape(), phi.support_radius()), opt).value;
}

double conformal_module(const CollarChart& chart, const BumpProfile* psi, double s) {
    const double R = chart.R;
    std::vector<double> breaks{-R, 0.0, R};
    if (psi) {
        double a = std::min(psi->support_radius(), R);
        breaks = {-R, -a, 0.0, a, R};
        if (a == R) breaks = {-R, 0.0, R};
    }
    quad::Options opt;
    opt.abs_tol = 1e-14;
    auto f = [&](double r) { return std::exp(psi ? s * (*psi)(r) : 0.0) / std::cosh(r); };
    double integral = quad::integrate_pieces(f, breaks, opt).value;
    return 2.0 * kPi / chart.gamma.length * integral;
}

double conformal_module(const SurfaceModel& hourglass, const BumpProfile* psi, double s) {
    if (hourglass.kind() != surface::Kind::Hourglass)
        throw std::invalid_argument("conformal module of the whole surface needs an hourglass");
    double t = psi ? grafting_amount(*psi, s) : 0.0;
    return 2.0 * kPi / hourglass.core_length() * (kPi + t);
}

double perturbed_curvature(const BumpProfile& psi, double s, double r) {
    double e = std::exp(-2.0 * s * psi(r));
    return e * (s * psi.derivative(r) * std::tanh(r) - 1.0);
}

double kappa_dot(const BumpProfile& psi, double r) {
    return 2.0 * psi(r) + psi.derivative(r) * std::tanh(r);
}

std::vector<DeltaLimitStep> delta_gamma_limit(const std::function<double(double, double)>& f,
                                              double lipschitz, double l,
                                              const std::vector<double>& radii, Template shape,
                                              const std::vector<double>& r_breaks) {
    std::vector<DeltaLimitStep> out;
    for (double R : radii) {
        BumpProfile psi(R, Normalization::CoshUnit, shape);
        std::vector<double> breaks{-R};
        for (double b : template_breaks(shape, R))
            if (b > -R && b < R) breaks.push_back(b);
        for (double b : r_breaks)
            if (b > -R && b < R) breaks.push_back(b);
        breaks.push_back(R);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

        quad::Options inner;
        inner.abs_tol = 1e-14;
        auto slice = [&](double t) {
            auto g = [&](double r) { return f(t, r) * kappa_dot(psi, r) * std::cosh(r); };
            return quad::integrate_pieces(g, breaks, inner).value - f(t, 0.0);
        };
        quad::Options outer;
        outer.abs_tol = 1e-13;
        DeltaLimitStep step;
        step.R = R;
        step.error = std::abs(quad::integrate(slice, 0.0, l, outer).value);
        step.psi_l1 = psi.l1_norm();
        step.bound = (2.0 * R * std::cosh(R) + std::sinh(R)) * step.psi_l1 * lipschitz * l;
        out.push_back(step);
    }
    return out;
}

double grafted_hourglass_core_length(double l, double t) {
    if (!(l > 0.0) || t < 0.0) throw std::invalid_argument("grafting needs l > 0 and t >= 0");
    return kPi * l / (kPi + t);
}

}  // namespace graftlab::deform
