#pragma once

#include <array>
#include <optional>
#include <stdexcept>

namespace graftlab::hyp2 {

struct HPoint {
    double x = 0.0;
    double y = 1.0;
};

// Orientation-preserving isometry z -> (az+b)/(cz+d), kept with ad - bc = 1
// and the first entry of magnitude > 1e-12 positive.
class Isometry {
public:
    Isometry() = default;
    Isometry(double a, double b, double c, double d);

    static Isometry identity() { return {}; }
    // Translation by `length` along (0, inf), upward for length > 0.
    static Isometry diagonal(double length);

    double a() const { return m_[0]; }
    double b() const { return m_[1]; }
    double c() const { return m_[2]; }
    double d() const { return m_[3]; }
    double trace() const { return m_[0] + m_[3]; }
    const std::array<double, 4>& entries() const { return m_; }

    Isometry inverse() const;
    HPoint apply(const HPoint& p) const;
    // Action on the boundary; `infinite` flags the point at infinity.
    double apply_boundary(double x, bool& infinite) const;

    // Raw matrix product without renormalization, for hot loops.
    static Isometry product_raw(const Isometry& g, const Isometry& h);

private:
    struct Raw {};
    Isometry(Raw, double a, double b, double c, double d) : m_{a, b, c, d} {}
    std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

Isometry compose(const Isometry& g, const Isometry& h);
Isometry inverse(const Isometry& g);
HPoint apply(const Isometry& g, const HPoint& p);
bool approx_equal(const Isometry& g, const Isometry& h, double tol = 1e-9);

double cosh_dist(const HPoint& p, const HPoint& q);
double dist(const HPoint& p, const HPoint& q);
double translation_length(const Isometry& g);

// Hyperboloid model with bilinear form x0 y0 - x1 y1 - x2 y2.
using Vec3 = std::array<double, 3>;
Vec3 to_hyperboloid(const HPoint& p);
HPoint from_hyperboloid(const Vec3& v);
double minkowski(const Vec3& u, const Vec3& v);

struct Ideal {
    double x = 0.0;
    bool infinite = false;
};

struct GeodesicLine {
    Ideal from;
    Ideal to;

    GeodesicLine() = default;
    GeodesicLine(Ideal from, Ideal to);
    GeodesicLine reversed() const { return GeodesicLine(to, from); }

    // Isometry taking (0, inf), oriented upward, onto this line.
    Isometry frame() const;
    // Marked origin: the point of the line closest to i.
    HPoint origin() const;
    // Point at signed arclength t from the origin.
    HPoint point_at(double t) const;
};

struct no_axis : std::domain_error {
    using std::domain_error::domain_error;
};
struct no_crossing : std::domain_error {
    using std::domain_error::domain_error;
};

GeodesicLine axis(const Isometry& g);
GeodesicLine apply(const Isometry& g, const GeodesicLine& line);

struct FermiCoord {
    double t = 0.0;
    double r = 0.0;
};

FermiCoord fermi(const GeodesicLine& line, const HPoint& p);
HPoint from_fermi(const GeodesicLine& line, const FermiCoord& c);
double dist_to_line(const GeodesicLine& line, const HPoint& p);

struct CrossingPoint {
    HPoint point;
    double theta = 0.0;
};

// Counterclockwise angle from l1 to l2 at their crossing, reduced to (0, pi).
double angle_at_crossing(const GeodesicLine& l1, const GeodesicLine& l2);
// Same angle from the hyperbolic law of cosines.
double angle_at_crossing_cosine_rule(const GeodesicLine& l1, const GeodesicLine& l2);
CrossingPoint crossing(const GeodesicLine& l1, const GeodesicLine& l2);
bool lines_cross(const GeodesicLine& l1, const GeodesicLine& l2);
// Distance between two disjoint lines; 0 if they cross or share an endpoint.
double line_distance(const GeodesicLine& l1, const GeodesicLine& l2);

struct Approach {
    double distance = 0.0;
    double t = 0.0;  // arclength on l1 of the foot of the common perpendicular
};
// Common perpendicular of two ultraparallel lines; nullopt otherwise.
std::optional<Approach> common_perpendicular(const GeodesicLine& l1, const GeodesicLine& l2);

// Unit tangent frames: the identity frame sits at i pointing up.
struct Frame {
    Isometry m;
    HPoint base() const { return m.apply(HPoint{0.0, 1.0}); }
    Frame forward(double d) const;
    Frame rotate(double theta) const;
    GeodesicLine line() const;
};

}  // namespace graftlab::hyp2
