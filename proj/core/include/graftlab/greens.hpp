#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "graftlab/surface.hpp"

namespace graftlab::greens {

using hyp2::HPoint;
using surface::GeodesicClass;
using surface::SurfaceModel;

struct singular_point : std::domain_error {
    using std::domain_error::domain_error;
};

struct KernelEvaluation {
    double value = 0.0;
    double truncation_radius = 0.0;
    double tail_bound = 0.0;        // certified bound on the discarded orbit terms
    double quadrature_error = 0.0;  // estimate, zero for closed sums
    std::size_t terms = 0;
};

// radius <= 0 selects the smallest radius whose certified tail is below
// target_tail, capped at max_auto_radius.
struct TruncationPolicy {
    double radius = 0.0;
    double target_tail = 1e-8;
    double max_auto_radius = 14.0;
};

// Green's kernel of L = Delta - 2 on the hyperbolic plane, as a function of
// distance.
double point_kernel_h2(double r);
double point_kernel_h2_derivative(double r);

// Green's kernel of L on the hourglass with singularity along the core, as a
// function of the signed distance to the core.
double hourglass_kernel(double r);
// Derivative in r, one-sided (from r > 0) at the core.
double hourglass_kernel_derivative(double r);

// Homogeneous solution of F'' + tanh(r) F' - 2F = 0 decaying as r -> +inf,
// normalised by h(0) = -1. hourglass_kernel(r) = h(|r|) / pi.
double decaying_solution(double r);
double decaying_solution_derivative(double r);
// decaying_solution as a function of s = sinh(r).
double decaying_solution_sinh(double s);

// Pointwise bounds |K(r)| <= f(r) used for the tails; both are decreasing.
double point_kernel_bound(double r);
double hourglass_kernel_bound(double r);

// Bounds on the orbit terms of the surface kernels beyond radius R.
double point_tail_bound(const SurfaceModel& S, double R);
double geodesic_tail_bound(const SurfaceModel& S, const GeodesicClass& gamma, double R);
double resolve_radius(const TruncationPolicy& policy, const std::function<double(double)>& tail);

KernelEvaluation surface_point_kernel(const SurfaceModel& S, const HPoint& x, const HPoint& y,
                                      const TruncationPolicy& policy = {});

// Repeated evaluation of y -> K(x, y) for a fixed x and y within `region` of
// `centre`: the lifts of x are found once.
class PointKernelField {
public:
    PointKernelField(const SurfaceModel& S, const HPoint& x, const HPoint& centre, double region,
                     const TruncationPolicy& policy = {});
    ~PointKernelField();
    PointKernelField(PointKernelField&&) noexcept;
    double operator()(const HPoint& y) const;
    // The same sum split by a smooth cutoff in distance: near() carries the
    // terms within split_radius() and is singular at lifts of x; far() is
    // smooth in y.
    double near(const HPoint& y) const;
    double far(const HPoint& y) const;
    double split_radius() const;
    double radius() const;
    double tail_bound() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Lifts of x in a fundamental strip about one period of the axis of gamma.
// Each corresponds to exactly one translate of the axis, so summing over
// them visits every translate within R of x once.
class AxisOrbit {
public:
    AxisOrbit(const SurfaceModel& S, const GeodesicClass& gamma, double R);
    ~AxisOrbit();
    AxisOrbit(AxisOrbit&&) noexcept;
    struct Lift {
        hyp2::Isometry g;  // g x lies in the strip
        double r = 0.0;    // its signed Fermi offset
    };
    std::vector<Lift> strip_lifts(const HPoint& x, double reach) const;
    // Signed Fermi offsets of x from the translates within R.
    std::vector<double> offsets(const HPoint& x) const;
    // Oriented translates within R + region of centre; they include every
    // translate within R of any point of that region.
    std::vector<hyp2::GeodesicLine> translates_near(const HPoint& centre, double region) const;
    double radius() const;
    // Length of the primitive class whose axis coincides with gamma's.
    double root_length() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

KernelEvaluation geodesic_kernel(const SurfaceModel& S, const GeodesicClass& gamma, const HPoint& x,
                                 const TruncationPolicy& policy = {});

// Repeated evaluation of x -> K_gamma(x).
class GeodesicKernelField {
public:
    GeodesicKernelField(const SurfaceModel& S, const GeodesicClass& gamma,
                        const TruncationPolicy& policy = {});
    KernelEvaluation operator()(const HPoint& x) const;

private:
    AxisOrbit orbit_;
    double tail_ = 0.0;
    bool hourglass_ = false;
    hyp2::GeodesicLine axis_;
};

// Integral of y -> K(x, y) over one period of gamma; throws singular_point
// when x lies on gamma. Arclength parameters [s0, s0 + length).
KernelEvaluation geodesic_kernel_by_quadrature(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const HPoint& x, const TruncationPolicy& policy = {},
                                               double abs_tol = 1e-9);
KernelEvaluation geodesic_kernel_by_quadrature(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const HPoint& x, double s0, double s1,
                                               const TruncationPolicy& policy = {},
                                               double abs_tol = 1e-9);

// sup_r e^{2r} |hourglass_kernel(r)|
double hourglass_decay_constant();
// C(eps) with |K_gamma(x)| <= C(eps) e^{-d(gamma, x)}.
double decay_constant(double eps);
double decay_certificate(const SurfaceModel& S, const GeodesicClass& gamma, const HPoint& x);

// A source on the surface depending only on the signed Fermi distance r to
// gamma, supported in |r| <= support < collar width.
struct CollarSource {
    GeodesicClass gamma;
    std::function<double(double)> profile;
    double support = 0.0;
    std::vector<double> breakpoints;  // interior points where profile is not smooth
};

// Solution u of L u = source on the surface.
class LSolution {
public:
    LSolution(const SurfaceModel& S, CollarSource source, const TruncationPolicy& policy);
    // Value of the lifted one-dimensional solution at signed distance r.
    double profile(double r) const;
    double profile_derivative(double r) const;
    // profile(asinh(s)), cheap outside the support.
    double profile_sinh(double s) const;
    double operator()(const HPoint& x) const;
    KernelEvaluation evaluate(const HPoint& x) const;
    // Oriented translates of the axis within radius() + region of centre.
    // Summing profile over all of them, with no cutoff, approximates u near
    // centre to within tail_bound().
    std::vector<hyp2::GeodesicLine> translates_near(const HPoint& centre, double region) const;
    const CollarSource& source() const { return src_; }
    double radius() const { return radius_; }
    double tail_bound() const { return tail_; }

private:
    SurfaceModel S_;
    CollarSource src_;
    TruncationPolicy policy_;
    std::shared_ptr<const AxisOrbit> orbit_;
    double radius_ = 0.0;
    double tail_ = 0.0;
    double in_minus_ = 0.0;  // integral of y_- f cosh over the support
    double in_plus_ = 0.0;   // integral of y_+ f cosh over the support
    double partial(double a, double b, bool plus) const;
};

LSolution solve_L(const SurfaceModel& S, CollarSource source, const TruncationPolicy& policy = {});

}  // namespace graftlab::greens
