#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graftlab/hyp2.hpp"

namespace graftlab::surface {

using hyp2::GeodesicLine;
using hyp2::HPoint;
using hyp2::Isometry;

enum class Kind { Hourglass, Genus2FN };

struct FNParams {
    std::array<double, 3> lengths{2.0, 2.0, 2.0};
    std::array<double, 3> twists{0.0, 0.0, 0.0};
};

struct invalid_word : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct not_discrete : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A word is a sequence of generator letters; an uppercase letter is the
// inverse of the corresponding lowercase one ("a1" / "A1", "g" / "G").
struct Letter {
    int gen = 0;
    bool inverse = false;
    bool operator==(const Letter&) const = default;
};
using Word = std::vector<Letter>;

class DirichletDomain;

struct GeodesicClass {
    std::string word;       // canonical form
    Isometry rep;
    double length = 0.0;
    GeodesicLine axis;
};

struct Crossing {
    HPoint point;
    double theta = 0.0;
};

struct OrbitElement {
    Isometry g;
    double distance = 0.0;
};

struct AxisTranslate {
    GeodesicLine line;
    double distance = 0.0;
    double r = 0.0;  // signed Fermi offset of x from the oriented line
};

class SurfaceModel {
public:
    Kind kind() const;
    const std::vector<Isometry>& generators() const;
    const std::vector<std::string>& generator_names() const;
    double core_length() const;
    const FNParams& fn() const;
    double systole_lower_bound() const;
    const DirichletDomain& domain() const;
    std::string id() const;

    Word parse(std::string_view word) const;
    std::string format(const Word& w) const;
    std::string canonical(std::string_view word) const;
    Isometry evaluate(const Word& w) const;
    Isometry evaluate(std::string_view word) const { return evaluate(parse(word)); }
    GeodesicClass geodesic(std::string_view word) const;
    // Gluing curve i (0-based) of a genus-2 model, or the core of an hourglass.
    GeodesicClass gluing_curve(int i) const;

    struct Impl;
    explicit SurfaceModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<const Impl> impl_;
};

SurfaceModel hourglass(double l);
SurfaceModel genus2_from_fn(const std::array<double, 3>& lengths,
                            const std::array<double, 3>& twists, int word_depth = 8);
inline SurfaceModel genus2_from_fn(const FNParams& p) {
    return genus2_from_fn(p.lengths, p.twists);
}

// Throws not_discrete if some reduced word of length <= depth is elliptic or
// parabolic.
void check_discrete(const std::vector<Isometry>& gens, int depth);

// Generators a1, a2, b1, b2 of the Fenchel-Nielsen group, without any checks.
std::array<Isometry, 4> fn_generators(const FNParams& p);

// Free and cyclic reduction, then the lexicographic minimum over rotations
// and inversion.
Word reduce(Word w);
Word cyclic_reduce(Word w);
Word invert(const Word& w);

std::vector<Isometry> enumerate_orbit(const SurfaceModel& S, const HPoint& x, double R);
// Elements g with dist(x, g y) <= R, sorted by distance.
std::vector<OrbitElement> enumerate_orbit(const SurfaceModel& S, const HPoint& x,
                                          const HPoint& y, double R);
std::vector<AxisTranslate> enumerate_axis_translates(const SurfaceModel& S,
                                                     const GeodesicClass& gamma,
                                                     const HPoint& x, double R);
std::vector<Crossing> crossings(const SurfaceModel& S, const GeodesicClass& gamma,
                                const GeodesicClass& gamma_prime);
double distance_between_geodesics(const SurfaceModel& S, const GeodesicClass& gamma,
                                  const GeodesicClass& gamma_prime);
bool same_class(const SurfaceModel& S, const GeodesicClass& a, const GeodesicClass& b);
double injectivity_radius(const SurfaceModel& S, const HPoint& x);
// Half the distance from the axis to its nearest other translate (capped at
// 20); throws std::domain_error for classes that are not simple.
double collar_width(const SurfaceModel& S, const GeodesicClass& gamma);

// Fundamental segment of the axis used by crossings and kernel integrals:
// arclength parameters [start, start + length) along gamma.axis.
double segment_start(const GeodesicClass& gamma);

// Orbital counting bounds.
double translate_count_bound(double R, double eps);
double lift_count_bound(double R, double l, double r_inj);

}  // namespace graftlab::surface
