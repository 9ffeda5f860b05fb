#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "graftlab/surface.hpp"

namespace graftlab::deform {

using surface::GeodesicClass;
using surface::SurfaceModel;
using surface::collar_width;

enum class Template {
    SmoothBump,  // exp(-1/(1 - x^2))
    PolyBump,    // (1 - x^2)^3, C^2 and cheaper
    Plateau,     // 1 on |x| <= 1/2, smooth descent to 0 at |x| = 1
};

enum class Normalization {
    GraftUnit,  // integral of psi / cosh = 1
    CoshUnit,   // integral of psi * cosh = 1
    Raw,        // psi = amplitude * template
};

// Even, non-negative profile psi(r) = c * template(r / R) supported in
// (-R, R), with c fixed by the normalization.
class BumpProfile {
public:
    explicit BumpProfile(double support_radius, Normalization n = Normalization::GraftUnit,
                         Template shape = Template::SmoothBump, double amplitude = 1.0);

    double operator()(double r) const;
    double derivative(double r) const;

    double support_radius() const { return R_; }
    Normalization normalization() const { return norm_; }
    Template shape() const { return shape_; }
    // The factor c multiplying the template.
    double scale() const { return c_; }
    double l1_norm() const;

private:
    double R_;
    Normalization norm_;
    Template shape_;
    double c_ = 1.0;
};

double template_value(Template shape, double x);
double template_derivative(Template shape, double x);

// Half-width R of a collar gamma x (-R, R) with the Fermi metric.
struct CollarChart {
    SurfaceModel surface;
    GeodesicClass gamma;
    double R = 0.0;
};
// Throws std::domain_error unless R < collar_width(S, gamma).
CollarChart make_chart(const SurfaceModel& S, const GeodesicClass& gamma, double R);

// g = e^{2f} ((cosh r dt - s phi(r) dr)^2 + e^{2 s psi(r)} dr^2) on the chart.
struct PerturbedMetricSpec {
    CollarChart chart;
    std::optional<BumpProfile> phi;
    std::optional<BumpProfile> psi;
    std::function<double(double t, double r)> conformal_factor;
};

struct MetricCoefficients {
    double E = 0.0;  // g(d_t, d_t)
    double F = 0.0;  // g(d_t, d_r)
    double G = 0.0;  // g(d_r, d_r)
};

MetricCoefficients perturbed_metric(const PerturbedMetricSpec& spec, double s, double t, double r);

double grafting_amount(const BumpProfile& psi, double s);
double earthquake_amount(const BumpProfile& phi, double s);

// Conformal module of the collar (or of the whole hourglass) under
// g_{0, s psi}; psi may be null.
double conformal_module(const CollarChart& chart, const BumpProfile* psi, double s);
double conformal_module(const SurfaceModel& hourglass, const BumpProfile* psi, double s);

// Curvature of g_{phi, s psi, 0} at signed distance r; independent of phi.
double perturbed_curvature(const BumpProfile& psi, double s, double r);
// d/ds of perturbed_curvature at s = 0.
double kappa_dot(const BumpProfile& psi, double r);

struct DeltaLimitStep {
    double R = 0.0;
    double error = 0.0;  // |int f kappa_dot dA - int_gamma f dl|
    double bound = 0.0;  // (2R cosh R + sinh R) |psi|_1 [f]_1 l
    double psi_l1 = 0.0;
};

// Pairs kappa_dot of CoshUnit profiles of shrinking support with a test
// function f(t, r) on the collar of a geodesic of length l.
std::vector<DeltaLimitStep> delta_gamma_limit(const std::function<double(double, double)>& f,
                                              double lipschitz, double l,
                                              const std::vector<double>& radii,
                                              Template shape = Template::SmoothBump,
                                              const std::vector<double>& r_breaks = {0.0});

// Core length of the hourglass obtained by grafting a cylinder of height t
// into the hourglass with core length l.
double grafted_hourglass_core_length(double l, double t);

}  // namespace graftlab::deform
