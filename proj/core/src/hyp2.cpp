#include "graftlab/hyp2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace graftlab::hyp2 {

namespace {

constexpr double kSignTol = 1e-12;

void canonicalize(std::array<double, 4>& m) {
    for (double v : m) {
        if (std::abs(v) > kSignTol) {
            if (v < 0)
                for (double& w : m) w = -w;
            return;
        }
    }
}

}  // namespace

Isometry::Isometry(double a, double b, double c, double d) : m_{a, b, c, d} {
    double det = a * d - b * c;
    if (!(det > 0.0)) throw std::invalid_argument("isometry needs positive determinant");
    double s = 1.0 / std::sqrt(det);
    for (double& v : m_) v *= s;
    canonicalize(m_);
}

Isometry Isometry::diagonal(double length) {
    return Isometry(std::exp(0.5 * length), 0.0, 0.0, std::exp(-0.5 * length));
}

Isometry Isometry::inverse() const {
    std::array<double, 4> m{m_[3], -m_[1], -m_[2], m_[0]};
    canonicalize(m);
    return Isometry(Raw{}, m[0], m[1], m[2], m[3]);
}

HPoint Isometry::apply(const HPoint& p) const {
    const auto [a, b, c, d] = m_;
    double u = c * p.x + d;
    double v = c * p.y;
    double den = u * u + v * v;
    double num_re = (a * p.x + b) * u + a * c * p.y * p.y;
    return {num_re / den, p.y / den};
}

double Isometry::apply_boundary(double x, bool& infinite) const {
    const auto [a, b, c, d] = m_;
    if (infinite) {
        if (std::abs(c) < 1e-300) return 0.0;
        infinite = false;
        return a / c;
    }
    double den = c * x + d;
    if (den == 0.0) {
        infinite = true;
        return 0.0;
    }
    return (a * x + b) / den;
}

Isometry Isometry::product_raw(const Isometry& g, const Isometry& h) {
    const auto& p = g.m_;
    const auto& q = h.m_;
    return Isometry(Raw{}, p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3],
                    p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]);
}

Isometry compose(const Isometry& g, const Isometry& h) {
    Isometry r = Isometry::product_raw(g, h);
    return Isometry(r.a(), r.b(), r.c(), r.d());
}

Isometry inverse(const Isometry& g) { return g.inverse(); }

HPoint apply(const Isometry& g, const HPoint& p) { return g.apply(p); }

bool approx_equal(const Isometry& g, const Isometry& h, double tol) {
    bool same = true, opposite = true;
    for (int i = 0; i < 4; ++i) {
        same = same && std::abs(g.entries()[i] - h.entries()[i]) <= tol;
        opposite = opposite && std::abs(g.entries()[i] + h.entries()[i]) <= tol;
    }
    return same || opposite;
}

double cosh_dist(const HPoint& p, const HPoint& q) {
    double dx = p.x - q.x, dy = p.y - q.y;
    return 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
}

double dist(const HPoint& p, const HPoint& q) {
    // acosh(1 + u) = 2 asinh(sqrt(u/2)) keeps accuracy near 0.
    double dx = p.x - q.x, dy = p.y - q.y;
    double u = (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    return 2.0 * std::asinh(std::sqrt(0.5 * u));
}

double translation_length(const Isometry& g) {
    double t = std::abs(g.trace());
    if (t <= 2.0) return 0.0;
    return 2.0 * std::acosh(0.5 * t);
}

Vec3 to_hyperboloid(const HPoint& p) {
    double n = p.x * p.x + p.y * p.y;
    return {(n + 1.0) / (2.0 * p.y), (n - 1.0) / (2.0 * p.y), p.x / p.y};
}

HPoint from_hyperboloid(const Vec3& v) {
    double y = 1.0 / (v[0] - v[1]);
    return {v[2] * y, y};
}

double minkowski(const Vec3& u, const Vec3& v) {
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2];
}

GeodesicLine::GeodesicLine(Ideal f, Ideal t) : from(f), to(t) {
    if (f.infinite == t.infinite && (f.infinite || f.x == t.x))
        throw std::invalid_argument("geodesic endpoints must be distinct");
}

Isometry GeodesicLine::frame() const {
    if (to.infinite) return Isometry(1.0, from.x, 0.0, 1.0);
    if (from.infinite) return Isometry(to.x, -1.0, 1.0, 0.0);
    double beta = to.x > from.x ? 1.0 : -1.0;
    return Isometry(to.x, beta * from.x, 1.0, beta);
}

namespace {

// Height on (0, inf) of the foot of i in the line's frame.
double origin_height(const Isometry& m) {
    HPoint w = m.inverse().apply(HPoint{0.0, 1.0});
    return std::hypot(w.x, w.y);
}

}  // namespace

HPoint GeodesicLine::origin() const { return point_at(0.0); }

HPoint GeodesicLine::point_at(double t) const {
    Isometry m = frame();
    return m.apply(HPoint{0.0, origin_height(m) * std::exp(t)});
}

GeodesicLine axis(const Isometry& g) {
    double tr = g.trace();
    if (std::abs(tr) <= 2.0) throw no_axis("isometry is not hyperbolic");
    // Work with the representative of positive trace.
    double s = tr > 0 ? 1.0 : -1.0;
    double a = s * g.a(), b = s * g.b(), c = s * g.c(), d = s * g.d();
    double disc = std::sqrt((a + d) * (a + d) - 4.0);
    double lambda = 0.5 * ((a + d) + disc);  // expanding eigenvalue
    double mu = 1.0 / lambda;
    if (std::abs(c) < 1e-14 * (std::abs(a) + std::abs(d))) {
        // Fixed points: infinity and b/(d - a); infinity attracts when a > d.
        Ideal fin{b / (d - a), false};
        Ideal inf{0.0, true};
        return a > d ? GeodesicLine(fin, inf) : GeodesicLine(inf, fin);
    }
    // Fixed point z with c z + d = lambda is attracting (derivative 1/lambda^2).
    auto fixed = [&](double e) {
        double u = e - d, v = e - a;
        return std::abs(c) >= std::abs(v) ? u / c : b / v;
    };
    return GeodesicLine(Ideal{fixed(mu), false}, Ideal{fixed(lambda), false});
}

GeodesicLine apply(const Isometry& g, const GeodesicLine& line) {
    Ideal f = line.from, t = line.to;
    f.x = g.apply_boundary(f.x, f.infinite);
    t.x = g.apply_boundary(t.x, t.infinite);
    return GeodesicLine(f, t);
}

FermiCoord fermi(const GeodesicLine& line, const HPoint& p) {
    Isometry m = line.frame();
    HPoint q = m.inverse().apply(p);
    double h0 = origin_height(m);
    return {std::log(std::hypot(q.x, q.y) / h0), std::asinh(-q.x / q.y)};
}

HPoint from_fermi(const GeodesicLine& line, const FermiCoord& c) {
    Isometry m = line.frame();
    double rho = origin_height(m) * std::exp(c.t);
    return m.apply(HPoint{-rho * std::tanh(c.r), rho / std::cosh(c.r)});
}

double dist_to_line(const GeodesicLine& line, const HPoint& p) {
    return std::abs(fermi(line, p).r);
}

namespace {

struct Pulled {
    Ideal a, b;  // endpoints of l2 in the frame of l1
};

Pulled pull_back(const GeodesicLine& l1, const GeodesicLine& l2) {
    GeodesicLine q = apply(l1.frame().inverse(), l2);
    return {q.from, q.to};
}

bool crosses(const Pulled& q) {
    if (q.a.infinite || q.b.infinite) return false;
    return q.a.x * q.b.x < 0.0;
}

}  // namespace

bool lines_cross(const GeodesicLine& l1, const GeodesicLine& l2) {
    return crosses(pull_back(l1, l2));
}

CrossingPoint crossing(const GeodesicLine& l1, const GeodesicLine& l2) {
    Pulled q = pull_back(l1, l2);
    if (!crosses(q)) throw no_crossing("no transverse crossing");
    double a = q.a.x, b = q.b.x;
    double y = std::sqrt(-a * b);
    double c = 0.5 * (a + b);
    // Tangent of the pulled-back l2 at iy, direction from a to b.
    double tx = b > a ? y : -y;
    double ty = b > a ? c : -c;
    double ang = std::atan2(-tx, ty);
    double theta = std::fmod(ang + 2.0 * std::numbers::pi, std::numbers::pi);
    return {l1.frame().apply(HPoint{0.0, y}), theta};
}

double angle_at_crossing(const GeodesicLine& l1, const GeodesicLine& l2) {
    return crossing(l1, l2).theta;
}

double angle_at_crossing_cosine_rule(const GeodesicLine& l1, const GeodesicLine& l2) {
    HPoint p = crossing(l1, l2).point;
    FermiCoord c1 = fermi(l1, p);
    FermiCoord c2 = fermi(l2, p);
    HPoint a = l1.point_at(c1.t + 1.0);
    HPoint b = l2.point_at(c2.t + 1.0);
    double ch = std::cosh(1.0), sh = std::sinh(1.0);
    double cos_c = (ch * ch - cosh_dist(a, b)) / (sh * sh);
    double ang = std::acos(std::clamp(cos_c, -1.0, 1.0));
    if (fermi(l1, b).r < 0) ang = -ang;
    return std::fmod(ang + 2.0 * std::numbers::pi, std::numbers::pi);
}

double line_distance(const GeodesicLine& l1, const GeodesicLine& l2) {
    Pulled q = pull_back(l1, l2);
    if (q.a.infinite || q.b.infinite) return 0.0;
    if (q.a.x * q.b.x <= 0.0) return 0.0;
    return std::acosh(std::abs(q.a.x + q.b.x) / std::abs(q.b.x - q.a.x));
}

std::optional<Approach> common_perpendicular(const GeodesicLine& l1, const GeodesicLine& l2) {
    Pulled q = pull_back(l1, l2);
    if (q.a.infinite || q.b.infinite || q.a.x * q.b.x <= 0.0) return std::nullopt;
    Isometry m = l1.frame();
    double d = std::acosh(std::abs(q.a.x + q.b.x) / std::abs(q.b.x - q.a.x));
    double t = 0.5 * std::log(q.a.x * q.b.x) - std::log(origin_height(m));
    return Approach{d, t};
}

Frame Frame::forward(double d) const {
    return {compose(m, Isometry::diagonal(d))};
}

Frame Frame::rotate(double theta) const {
    double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    return {compose(m, Isometry(c, s, -s, c))};
}

GeodesicLine Frame::line() const {
    return apply(m, GeodesicLine(Ideal{0.0, false}, Ideal{0.0, true}));
}

}  // namespace graftlab::hyp2
