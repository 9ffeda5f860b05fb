#include "graftlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graftlab/dirichlet.hpp"
#include "graftlab/quadrature.hpp"

namespace graftlab::greens {

namespace {

constexpr double kPi = std::numbers::pi;
// Beyond this argument the tails of the power series below are used.
constexpr double kSeriesFrom = 10.0;

// c arccoth(c) - 1 for c = cosh r, given cm1 = c - 1 exactly.
double coth_term(double c, double cm1) {
    if (c > kSeriesFrom) {
        double q = 1.0 / (c * c), p = q, sum = 0.0;
        for (int k = 1; k < 40; ++k, p *= q) {
            double term = p / (2 * k + 1);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }
    return 0.5 * c * std::log((c + 1.0) / cm1) - 1.0;
}

double point_kernel_from_cosh(double c, double cm1) {
    if (!(cm1 > 0.0)) throw singular_point("point kernel evaluated at coincident points");
    return -coth_term(c, cm1) / (2.0 * kPi);
}

// Exact cosh d - 1 between two points of the upper half-plane.
double cosh_dist_m1(const HPoint& p, const HPoint& q) {
    double dx = p.x - q.x, dy = p.y - q.y;
    return (dx * dx + dy * dy) / (2.0 * p.y * q.y);
}

double cosh_m1(double r) {
    double s = std::sinh(0.5 * r);
    return 2.0 * s * s;
}

// Integral over [R, inf) of nb(r) * g(r), g >= 0 decaying like e^{-2r} and
// nb growing at most like e^{r}.
double tail_integral(const std::function<double(double)>& nb, const std::function<double(double)>& g,
                     double R) {
    const double span = 60.0;
    quad::Options opt;
    opt.abs_tol = 1e-18;
    opt.max_panels = 2000;
    auto res = quad::integrate([&](double r) { return nb(r) * g(r); }, R, R + span, opt);
    // The integrand beyond R + span is below e^{-span} times its value at R.
    double rest = nb(R) * g(R) * std::exp(-span + 1.0);
    return (res.value + res.error + rest) * (1.0 + 1e-9);
}

// Derivative magnitude of A / sinh^2(r).
double inv_sinh2_slope(double A, double r) {
    double s = std::sinh(r);
    return 2.0 * A * std::cosh(r) / (s * s * s);
}

std::function<double(double)> orbit_count_bound(const SurfaceModel& S) {
    if (S.kind() == surface::Kind::Hourglass) {
        double l = S.core_length();
        return [l](double r) { return 2.0 * r / l + 1.0; };
    }
    double eps = 0.5 * S.systole_lower_bound();
    return [eps](double r) { return surface::translate_count_bound(r, eps); };
}

}  // namespace

double point_kernel_h2(double r) {
    if (!(r > 0.0)) throw singular_point("point kernel needs r > 0");
    if (r > 700.0) return 0.0;
    return point_kernel_from_cosh(std::cosh(r), cosh_m1(r));
}

double point_kernel_h2_derivative(double r) {
    if (!(r > 0.0)) throw singular_point("point kernel needs r > 0");
    if (r > 700.0) return 0.0;
    double c = std::cosh(r), s = std::sinh(r);
    if (c > kSeriesFrom) {
        // arccoth(c) - c / (c^2 - 1) = -sum_{k >= 1} 2k / (2k + 1) c^{-(2k+1)}
        double q = 1.0 / (c * c), p = q / c, sum = 0.0;
        for (int k = 1; k < 40; ++k, p *= q) {
            double term = 2.0 * k / (2 * k + 1) * p;
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return s * sum / (2.0 * kPi);
    }
    double acoth = 0.5 * std::log((c + 1.0) / cosh_m1(r));
    return -(s * acoth - c / s) / (2.0 * kPi);
}

double decaying_solution(double r) { return decaying_solution_sinh(std::sinh(r)); }

double decaying_solution_sinh(double s) {
    if (s > kSeriesFrom) {
        // s arctan(1/s) - 1 = sum_{k >= 1} (-1)^k s^{-2k} / (2k + 1)
        double q = 1.0 / (s * s), p = q, sum = 0.0;
        for (int k = 1; k < 40; ++k, p *= q) {
            double term = p / (2 * k + 1);
            sum += (k % 2 ? -term : term);
            if (term < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return -1.0 + s * (0.5 * kPi - std::atan(s));
}

double decaying_solution_derivative(double r) {
    double s = std::sinh(r), c = std::cosh(r);
    if (s > kSeriesFrom) {
        // arccot(s) - s / (1 + s^2) = sum_{k >= 1} (-1)^{k+1} 2k / (2k + 1) s^{-(2k+1)}
        double q = 1.0 / (s * s), p = q / s, sum = 0.0;
        for (int k = 1; k < 40; ++k, p *= q) {
            double term = 2.0 * k / (2 * k + 1) * p;
            sum += (k % 2 ? term : -term);
            if (term < 1e-18 * std::abs(sum)) break;
        }
        return c * sum;
    }
    return c * ((0.5 * kPi - std::atan(s)) - s / (1.0 + s * s));
}

double hourglass_kernel(double r) { return decaying_solution(std::abs(r)) / kPi; }

double hourglass_kernel_derivative(double r) {
    double d = decaying_solution_derivative(std::abs(r)) / kPi;
    return r < 0.0 ? -d : d;
}

double point_kernel_bound(double r) {
    double s = std::sinh(r);
    return 1.0 / (6.0 * kPi * s * s);
}

double hourglass_kernel_bound(double r) {
    double s = std::sinh(std::abs(r));
    return std::min(1.0, 1.0 / (3.0 * s * s)) / kPi;
}

double point_tail_bound(const SurfaceModel& S, double R) {
    R = std::max(R, 1e-3);
    auto nb = orbit_count_bound(S);
    return tail_integral(nb, [](double r) { return inv_sinh2_slope(1.0 / (6.0 * kPi), r); }, R);
}

double geodesic_tail_bound(const SurfaceModel& S, const GeodesicClass&, double R) {
    // Every translate is present in the hourglass.
    if (S.kind() == surface::Kind::Hourglass) return 0.0;
    R = std::max(R, 1.0);
    auto nb = orbit_count_bound(S);
    return tail_integral(nb, [](double r) { return inv_sinh2_slope(1.0 / (3.0 * kPi), r); }, R);
}

double resolve_radius(const TruncationPolicy& policy, const std::function<double(double)>& tail) {
    if (policy.radius > 0.0) return policy.radius;
    double hi = policy.max_auto_radius;
    if (tail(hi) > policy.target_tail) return hi;
    double lo = 1.0;
    if (tail(lo) <= policy.target_tail) return lo;
    while (hi - lo > 1e-3) {
        double mid = 0.5 * (lo + hi);
        (tail(mid) <= policy.target_tail ? hi : lo) = mid;
    }
    return hi;
}

KernelEvaluation surface_point_kernel(const SurfaceModel& S, const HPoint& x, const HPoint& y,
                                      const TruncationPolicy& policy) {
    KernelEvaluation out;
    out.truncation_radius = resolve_radius(policy, [&](double R) { return point_tail_bound(S, R); });
    out.tail_bound = point_tail_bound(S, out.truncation_radius);
    auto orbit = surface::enumerate_orbit(S, x, y, out.truncation_radius);
    // Smallest terms first.
    for (auto it = orbit.rbegin(); it != orbit.rend(); ++it) {
        HPoint gy = it->g.apply(y);
        out.value += point_kernel_from_cosh(1.0 + cosh_dist_m1(x, gy), cosh_dist_m1(x, gy));
    }
    out.terms = orbit.size();
    return out;
}

namespace {

constexpr double kNearRadius = 3.0;
constexpr double kNearWidth = 2.0;

// Smooth weight equal to 1 for d <= kNearRadius and 0 beyond
// kNearRadius + kNearWidth.
double smooth_step_down(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return b / (a + b);
}

double near_weight(double d) { return smooth_step_down((d - kNearRadius) / kNearWidth); }

}  // namespace

struct PointKernelField::Impl {
    SurfaceModel S;
    HPoint x;
    HPoint centre;
    double region = 0.0;
    double R = 0.0;
    double tail = 0.0;
    double split = 0.0;
    std::vector<HPoint> lifts;
    std::vector<HPoint> near_lifts;

    void check(const HPoint& y) const {
        if (hyp2::dist(y, centre) > region + 1e-9)
            throw std::out_of_range("point kernel field evaluated outside its region");
    }
    template <class F>
    static void each(const std::vector<HPoint>& list, const HPoint& y, double radius, F&& f) {
        const double limit = cosh_m1(radius);
        for (const auto& p : list) {
            double cm1 = cosh_dist_m1(y, p);
            if (cm1 <= limit) f(cm1);
        }
    }
};

PointKernelField::PointKernelField(const SurfaceModel& S, const HPoint& x, const HPoint& centre,
                                   double region, const TruncationPolicy& policy)
    : impl_(std::make_unique<Impl>(Impl{S, x, centre, region, 0.0, 0.0, 0.0, {}, {}})) {
    Impl& m = *impl_;
    m.R = resolve_radius(policy, [&](double R) { return point_tail_bound(S, R); });
    m.tail = point_tail_bound(S, m.R);
    m.split = std::min(m.R, kNearRadius + kNearWidth);
    for (const auto& e : surface::enumerate_orbit(S, centre, x, m.R + region)) {
        HPoint p = e.g.apply(x);
        m.lifts.push_back(p);
        if (e.distance <= m.split + region) m.near_lifts.push_back(p);
    }
}

PointKernelField::~PointKernelField() = default;
PointKernelField::PointKernelField(PointKernelField&&) noexcept = default;

double PointKernelField::operator()(const HPoint& y) const {
    impl_->check(y);
    double sum = 0.0;
    Impl::each(impl_->lifts, y, impl_->R,
               [&](double cm1) { sum += point_kernel_from_cosh(1.0 + cm1, cm1); });
    return sum;
}

double PointKernelField::near(const HPoint& y) const {
    impl_->check(y);
    double sum = 0.0;
    Impl::each(impl_->near_lifts, y, impl_->split, [&](double cm1) {
        double d = 2.0 * std::asinh(std::sqrt(0.5 * cm1));
        sum += near_weight(d) * point_kernel_from_cosh(1.0 + cm1, cm1);
    });
    return sum;
}

double PointKernelField::far(const HPoint& y) const {
    impl_->check(y);
    double sum = 0.0;
    const double inner = cosh_m1(kNearRadius);
    const double outer = cosh_m1(kNearRadius + kNearWidth);
    Impl::each(impl_->lifts, y, impl_->R, [&](double cm1) {
        if (cm1 <= inner) return;
        if (cm1 >= outer) {
            sum += point_kernel_from_cosh(1.0 + cm1, cm1);
            return;
        }
        double d = 2.0 * std::asinh(std::sqrt(0.5 * cm1));
        sum += (1.0 - near_weight(d)) * point_kernel_from_cosh(1.0 + cm1, cm1);
    });
    return sum;
}

double PointKernelField::split_radius() const { return impl_->split; }
double PointKernelField::radius() const { return impl_->R; }
double PointKernelField::tail_bound() const { return impl_->tail; }

struct AxisOrbit::Impl {
    SurfaceModel S;
    GeodesicClass gamma;
    double R = 0.0;
    double root = 0.0;
    double s0 = 0.0;
    HPoint mid;
};

AxisOrbit::AxisOrbit(const SurfaceModel& S, const GeodesicClass& gamma, double R)
    : impl_(std::make_unique<Impl>(Impl{S, gamma, R, 0.0, 0.0, {}})) {
    Impl& m = *impl_;
    m.s0 = surface::segment_start(gamma);
    // Shortest element translating along the axis.
    m.root = gamma.length;
    HPoint p = gamma.axis.point_at(m.s0), q = gamma.axis.point_at(m.s0 + 1.0);
    for (const auto& e : surface::enumerate_orbit(S, p, p, gamma.length + 1e-9)) {
        if (e.distance < 1e-9) continue;
        if (hyp2::dist_to_line(gamma.axis, e.g.apply(p)) < 1e-9 &&
            hyp2::dist_to_line(gamma.axis, e.g.apply(q)) < 1e-9)
            m.root = std::min(m.root, hyp2::translation_length(e.g));
    }
    m.mid = gamma.axis.point_at(m.s0 + 0.5 * m.root);
}

AxisOrbit::~AxisOrbit() = default;
AxisOrbit::AxisOrbit(AxisOrbit&&) noexcept = default;

std::vector<AxisOrbit::Lift> AxisOrbit::strip_lifts(const HPoint& x, double reach) const {
    const Impl& m = *impl_;
    std::vector<Lift> out;
    if (m.S.kind() == surface::Kind::Hourglass) {
        auto c = hyp2::fermi(m.gamma.axis, x);
        if (std::abs(c.r) <= reach) out.push_back({hyp2::Isometry::identity(), c.r});
        return out;
    }
    for (const auto& e : surface::enumerate_orbit(m.S, m.mid, x, reach + 0.5 * m.root + 1e-9)) {
        auto c = hyp2::fermi(m.gamma.axis, e.g.apply(x));
        if (c.t >= m.s0 && c.t < m.s0 + m.root && std::abs(c.r) <= reach) out.push_back({e.g, c.r});
    }
    std::sort(out.begin(), out.end(),
              [](const Lift& a, const Lift& b) { return std::abs(a.r) > std::abs(b.r); });
    return out;
}

std::vector<double> AxisOrbit::offsets(const HPoint& x) const {
    std::vector<double> out;
    for (const auto& l : strip_lifts(x, impl_->R)) out.push_back(l.r);
    return out;
}

std::vector<hyp2::GeodesicLine> AxisOrbit::translates_near(const HPoint& centre, double region) const {
    std::vector<hyp2::GeodesicLine> out;
    for (const auto& l : strip_lifts(centre, impl_->R + region))
        out.push_back(hyp2::apply(l.g.inverse(), impl_->gamma.axis));
    return out;
}

double AxisOrbit::radius() const { return impl_->R; }
double AxisOrbit::root_length() const { return impl_->root; }

GeodesicKernelField::GeodesicKernelField(const SurfaceModel& S, const GeodesicClass& gamma,
                                         const TruncationPolicy& policy)
    : orbit_(S, gamma,
             resolve_radius(policy, [&](double R) { return geodesic_tail_bound(S, gamma, R); })) {
    tail_ = geodesic_tail_bound(S, gamma, orbit_.radius());
    hourglass_ = S.kind() == surface::Kind::Hourglass;
    axis_ = gamma.axis;
}

KernelEvaluation GeodesicKernelField::operator()(const HPoint& x) const {
    KernelEvaluation out;
    out.truncation_radius = orbit_.radius();
    out.tail_bound = tail_;
    if (hourglass_) {
        // The single term is kept whatever the radius.
        out.value = hourglass_kernel(hyp2::dist_to_line(axis_, x));
        out.terms = 1;
        return out;
    }
    auto offs = orbit_.offsets(x);
    for (double r : offs) out.value += hourglass_kernel(r);
    out.terms = offs.size();
    return out;
}

KernelEvaluation geodesic_kernel(const SurfaceModel& S, const GeodesicClass& gamma, const HPoint& x,
                                 const TruncationPolicy& policy) {
    return GeodesicKernelField(S, gamma, policy)(x);
}

KernelEvaluation geodesic_kernel_by_quadrature(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const HPoint& x, const TruncationPolicy& policy,
                                               double abs_tol) {
    double s0 = surface::segment_start(gamma);
    return geodesic_kernel_by_quadrature(S, gamma, x, s0, s0 + gamma.length, policy, abs_tol);
}

KernelEvaluation geodesic_kernel_by_quadrature(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const HPoint& x, double s0, double s1,
                                               const TruncationPolicy& policy, double abs_tol) {
    if (!surface::enumerate_axis_translates(S, gamma, x, 1e-10).empty())
        throw singular_point("x lies on the geodesic; use geodesic_kernel");
    PointKernelField field(S, x, gamma.axis.point_at(0.5 * (s0 + s1)), 0.5 * std::abs(s1 - s0),
                           policy);

    // Split at the feet of lifts of x close to the segment, where the near
    // part has a narrow peak.
    std::vector<double> breaks{s0};
    HPoint mid = gamma.axis.point_at(0.5 * (s0 + s1));
    for (const auto& e : surface::enumerate_orbit(S, mid, x, 0.5 * std::abs(s1 - s0) + 0.5)) {
        auto c = hyp2::fermi(gamma.axis, e.g.apply(x));
        if (std::abs(c.r) < 0.5 && c.t > std::min(s0, s1) && c.t < std::max(s0, s1))
            breaks.push_back(c.t);
    }
    breaks.push_back(s1);
    if (s1 > s0)
        std::sort(breaks.begin(), breaks.end());
    else
        std::sort(breaks.begin(), breaks.end(), std::greater<>());

    quad::Options opt;
    opt.abs_tol = 0.5 * abs_tol;
    auto near = quad::integrate_pieces([&](double s) { return field.near(gamma.axis.point_at(s)); },
                                       breaks, opt);
    auto far = quad::integrate([&](double s) { return field.far(gamma.axis.point_at(s)); }, s0, s1, opt);
    KernelEvaluation out;
    out.value = near.value + far.value;
    out.quadrature_error = near.error + far.error;
    out.truncation_radius = field.radius();
    out.tail_bound = std::abs(s1 - s0) * field.tail_bound();
    out.terms = static_cast<std::size_t>(near.evaluations + far.evaluations);
    return out;
}

double hourglass_decay_constant() {
    static const double C = [] {
        double best = 4.0 / (3.0 * kPi);
        for (int i = 0; i <= 40000; ++i) {
            double r = 1e-3 * i;
            best = std::max(best, std::exp(2.0 * r) * std::abs(hourglass_kernel(r)));
        }
        // Grid maximum plus a margin for the spacing.
        return best * (1.0 + 1e-5);
    }();
    return C;
}

double decay_constant(double eps) {
    double s = std::sinh(0.5 * eps);
    return hourglass_decay_constant() * std::exp(eps) / (2.0 * s * s);
}

double decay_certificate(const SurfaceModel& S, const GeodesicClass& gamma, const HPoint& x) {
    double d = 0.0;
    if (S.kind() == surface::Kind::Hourglass) {
        d = hyp2::dist_to_line(gamma.axis, x);
    } else {
        for (double R = 1.0;; R *= 2.0) {
            auto tr = surface::enumerate_axis_translates(S, gamma, x, R);
            if (!tr.empty()) {
                d = tr.front().distance;
                break;
            }
        }
    }
    return decay_constant(0.5 * S.systole_lower_bound()) * std::exp(-d);
}

LSolution::LSolution(const SurfaceModel& S, CollarSource source, const TruncationPolicy& policy)
    : S_(S), src_(std::move(source)), policy_(policy) {
    if (!(src_.support > 0.0)) throw std::invalid_argument("collar source needs positive support");
    if (src_.support >= surface::collar_width(S_, src_.gamma))
        throw std::domain_error("source support escapes the collar chart");
    in_minus_ = partial(-src_.support, src_.support, false);
    in_plus_ = partial(-src_.support, src_.support, true);
    double scale = std::max(std::abs(in_minus_), std::abs(in_plus_));
    // Terms are cut off smoothly over [R - 1, R] so that u stays smooth in x;
    // everything beyond R - 1 counts as tail.
    auto tail = [&](double R) { return scale * geodesic_tail_bound(S_, src_.gamma, std::max(R - 1.0, 0.0)); };
    radius_ = std::max(resolve_radius(policy_, tail), src_.support + 1.0 + 1e-9);
    tail_ = tail(radius_);
    orbit_ = std::make_shared<const AxisOrbit>(S_, src_.gamma, radius_);
}

double LSolution::partial(double a, double b, bool plus) const {
    if (b <= a) return 0.0;
    std::vector<double> breaks{a};
    for (double p : src_.breakpoints)
        if (p > a && p < b) breaks.push_back(p);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    quad::Options opt;
    opt.abs_tol = 1e-14;
    auto f = [&](double r) {
        double y = plus ? decaying_solution(r) : decaying_solution(-r);
        return y * src_.profile(r) * std::cosh(r);
    };
    return quad::integrate_pieces(f, breaks, opt).value;
}

double LSolution::profile(double r) const {
    const double a = src_.support;
    if (r >= a) return -decaying_solution(r) * in_minus_ / kPi;
    if (r <= -a) return -decaying_solution(-r) * in_plus_ / kPi;
    double lower = partial(-a, r, false), upper = partial(r, a, true);
    return -(decaying_solution(r) * lower + decaying_solution(-r) * upper) / kPi;
}

double LSolution::profile_derivative(double r) const {
    const double a = src_.support;
    double lower = r >= a ? in_minus_ : (r <= -a ? 0.0 : partial(-a, r, false));
    double upper = r <= -a ? in_plus_ : (r >= a ? 0.0 : partial(r, a, true));
    return -(decaying_solution_derivative(r) * lower - decaying_solution_derivative(-r) * upper) / kPi;
}

double LSolution::profile_sinh(double s) const {
    const double sa = std::sinh(src_.support);
    if (s >= sa) return -decaying_solution_sinh(s) * in_minus_ / kPi;
    if (s <= -sa) return -decaying_solution_sinh(-s) * in_plus_ / kPi;
    return profile(std::asinh(s));
}

std::vector<hyp2::GeodesicLine> LSolution::translates_near(const HPoint& centre, double region) const {
    if (S_.kind() == surface::Kind::Hourglass) return {src_.gamma.axis};
    return orbit_->translates_near(centre, region);
}

KernelEvaluation LSolution::evaluate(const HPoint& x) const {
    KernelEvaluation out;
    out.truncation_radius = radius_;
    out.tail_bound = tail_;
    if (S_.kind() == surface::Kind::Hourglass) {
        out.value = profile(hyp2::fermi(src_.gamma.axis, x).r);
        out.terms = 1;
        return out;
    }
    auto offs = orbit_->offsets(x);
    for (double r : offs) out.value += smooth_step_down(std::abs(r) - (radius_ - 1.0)) * profile(r);
    out.terms = offs.size();
    return out;
}

double LSolution::operator()(const HPoint& x) const { return evaluate(x).value; }

LSolution solve_L(const SurfaceModel& S, CollarSource source, const TruncationPolicy& policy) {
    return LSolution(S, std::move(source), policy);
}

}  // namespace graftlab::greens
