#include "graftlab/surface.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "graftlab/dirichlet.hpp"
#include "keyed_set.hpp"

namespace graftlab::surface {

struct SurfaceModel::Impl {
    Kind kind = Kind::Hourglass;
    std::vector<Isometry> gens;
    std::vector<std::string> names;
    double core = 0.0;
    FNParams fn;
    double systole = 0.0;
    DirichletDomain domain;
};

namespace {

constexpr double kCollarCap = 20.0;

// 2x2 matrices including orientation-reversing ones (reflections).
struct Mat2 {
    double a, b, c, d;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inv() const {
        double det = a * d - b * c;
        return {d / det, -b / det, -c / det, a / det};
    }
    static Mat2 of(const Isometry& g) { return {g.a(), g.b(), g.c(), g.d()}; }
    Isometry iso() const { return Isometry(a, b, c, d); }
};

Mat2 reflection(const Isometry& frame) {
    Mat2 F = Mat2::of(frame);
    return F * Mat2{-1.0, 0.0, 0.0, 1.0} * F.inv();
}

Mat2 translation(const Isometry& frame, double tau) {
    Mat2 F = Mat2::of(frame);
    return F * Mat2::of(Isometry::diagonal(tau)) * F.inv();
}

// Length of the side opposite a in a right-angled hexagon with alternate
// sides a, b, c.
double opposite_side(double a, double b, double c) {
    return std::acosh((std::cosh(b) * std::cosh(c) + std::cosh(a)) / (std::sinh(b) * std::sinh(c)));
}

// Frames at the start of each side of the hexagon, walked with left turns:
// s1, m12, s2, m23, s3, m31.
std::array<hyp2::Frame, 6> hexagon_frames(const std::array<double, 3>& lengths) {
    double s1 = 0.5 * lengths[0], s2 = 0.5 * lengths[1], s3 = 0.5 * lengths[2];
    std::array<double, 6> sides{s1, opposite_side(s3, s1, s2), s2,
                                opposite_side(s1, s2, s3), s3, opposite_side(s2, s3, s1)};
    std::array<hyp2::Frame, 6> frames;
    hyp2::Frame f{Isometry::identity()};
    for (int i = 0; i < 6; ++i) {
        frames[i] = f;
        f = f.forward(sides[i]).rotate(0.5 * std::numbers::pi);
    }
    if (!hyp2::approx_equal(f.m, Isometry::identity(), 1e-8))
        throw std::runtime_error("right-angled hexagon failed to close");
    return frames;
}

HPoint hexagon_centre(const std::array<hyp2::Frame, 6>& frames) {
    hyp2::Vec3 s{0.0, 0.0, 0.0};
    for (const auto& f : frames) {
        hyp2::Vec3 v = hyp2::to_hyperboloid(f.base());
        for (int i = 0; i < 3; ++i) s[i] += v[i];
    }
    double n = std::sqrt(hyp2::minkowski(s, s));
    for (double& x : s) x /= n;
    return hyp2::from_hyperboloid(s);
}


std::array<double, 4> line_key(const GeodesicLine& line, const Isometry& centre) {
    auto angle = [&](hyp2::Ideal e) {
        e.x = centre.apply_boundary(e.x, e.infinite);
        if (e.infinite) return 0.0;
        return std::atan2(-2.0 * e.x, e.x * e.x - 1.0);
    };
    double a = angle(line.from), b = angle(line.to);
    return {std::cos(a), std::sin(a), std::cos(b), std::sin(b)};
}

Isometry centering(const HPoint& p) {
    double s = std::sqrt(p.y);
    return Isometry(1.0 / s, -p.x / s, 0.0, s);
}

}  // namespace

void check_discrete(const std::vector<Isometry>& gens, int depth) {
    const int m = static_cast<int>(gens.size());
    std::vector<Isometry> letters(gens);
    for (const auto& g : gens) letters.push_back(g.inverse());
    struct Node {
        Isometry g;
        int last;
        int len;
    };
    std::vector<Node> stack{{Isometry::identity(), -1, 0}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        if (nd.len > 0) {
            double t = std::abs(nd.g.trace());
            const auto& e = nd.g.entries();
            bool identity = std::abs(e[1]) < 1e-9 && std::abs(e[2]) < 1e-9 &&
                            std::abs(e[0] - e[3]) < 1e-9;
            if (!identity) {
                if (t < 2.0 - 1e-9) throw not_discrete("elliptic word: group is not discrete and torsion-free");
                if (t <= 2.0 + 1e-9) throw not_discrete("parabolic word: surface would have a cusp");
            }
        }
        if (nd.len == depth) continue;
        for (int l = 0; l < 2 * m; ++l) {
            if (nd.last >= 0 && (l % m) == (nd.last % m) && l != nd.last) continue;
            stack.push_back({Isometry::product_raw(nd.g, letters[l]), l, nd.len + 1});
        }
    }
}

Kind SurfaceModel::kind() const { return impl_->kind; }
const std::vector<Isometry>& SurfaceModel::generators() const { return impl_->gens; }
const std::vector<std::string>& SurfaceModel::generator_names() const { return impl_->names; }
double SurfaceModel::core_length() const { return impl_->core; }
const FNParams& SurfaceModel::fn() const { return impl_->fn; }
double SurfaceModel::systole_lower_bound() const { return impl_->systole; }
const DirichletDomain& SurfaceModel::domain() const {
    if (impl_->kind != Kind::Genus2FN) throw std::logic_error("hourglass has no compact domain");
    return impl_->domain;
}

std::string SurfaceModel::id() const {
    auto num = [](double x) {
        char buf[32];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
    };
    if (impl_->kind == Kind::Hourglass) return "hourglass(l=" + num(impl_->core) + ")";
    const auto& p = impl_->fn;
    return "genus2(" + num(p.lengths[0]) + "," + num(p.lengths[1]) + "," + num(p.lengths[2]) + ";" +
           num(p.twists[0]) + "," + num(p.twists[1]) + "," + num(p.twists[2]) + ")";
}

Word SurfaceModel::parse(std::string_view word) const {
    Word w;
    std::size_t i = 0;
    while (i < word.size()) {
        bool matched = false;
        for (std::size_t g = 0; g < impl_->names.size() && !matched; ++g) {
            const std::string& nm = impl_->names[g];
            if (word.size() - i < nm.size()) continue;
            std::string_view piece = word.substr(i, nm.size());
            bool lower = true, upper = true;
            for (std::size_t k = 0; k < nm.size(); ++k) {
                lower = lower && piece[k] == nm[k];
                upper = upper && piece[k] == static_cast<char>(std::toupper(nm[k]));
            }
            if (lower || upper) {
                w.push_back({static_cast<int>(g), upper && !lower});
                i += nm.size();
                matched = true;
            }
        }
        if (!matched)
            throw invalid_word("unknown generator in word '" + std::string(word) + "'");
    }
    return w;
}

std::string SurfaceModel::format(const Word& w) const {
    std::string s;
    for (const auto& l : w) {
        std::string nm = impl_->names[l.gen];
        if (l.inverse)
            for (char& c : nm) c = static_cast<char>(std::toupper(c));
        s += nm;
    }
    return s;
}

Word reduce(Word w) {
    Word out;
    for (const auto& l : w) {
        if (!out.empty() && out.back().gen == l.gen && out.back().inverse != l.inverse)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

Word cyclic_reduce(Word w) {
    w = reduce(std::move(w));
    std::size_t lo = 0, hi = w.size();
    while (hi - lo >= 2 && w[lo].gen == w[hi - 1].gen && w[lo].inverse != w[hi - 1].inverse) {
        ++lo;
        --hi;
    }
    return Word(w.begin() + lo, w.begin() + hi);
}

Word invert(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (auto& l : out) l.inverse = !l.inverse;
    return out;
}

std::string SurfaceModel::canonical(std::string_view word) const {
    Word w = cyclic_reduce(parse(word));
    if (w.empty()) return "";
    // Order letters by generator, lowercase first.
    auto less = [](const Word& x, const Word& y) {
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                            [](const Letter& p, const Letter& q) {
                                                return std::pair(p.gen, p.inverse) <
                                                       std::pair(q.gen, q.inverse);
                                            });
    };
    Word best;
    for (const Word& base : {w, invert(w)}) {
        for (std::size_t r = 0; r < base.size(); ++r) {
            Word rot(base.begin() + r, base.end());
            rot.insert(rot.end(), base.begin(), base.begin() + r);
            if (best.empty() || less(rot, best)) best = rot;
        }
    }
    return format(best);
}

Isometry SurfaceModel::evaluate(const Word& w) const {
    Isometry g = Isometry::identity();
    for (const auto& l : w) g = hyp2::compose(g, l.inverse ? impl_->gens[l.gen].inverse() : impl_->gens[l.gen]);
    return g;
}

GeodesicClass SurfaceModel::geodesic(std::string_view word) const {
    std::string canon = canonical(word);
    if (canon.empty()) throw invalid_word("word '" + std::string(word) + "' is trivial");
    GeodesicClass c;
    c.word = canon;
    c.rep = evaluate(cyclic_reduce(parse(word)));
    c.length = hyp2::translation_length(c.rep);
    if (!(c.length > 0.0)) throw invalid_word("word '" + std::string(word) + "' is not hyperbolic");
    c.axis = hyp2::axis(c.rep);
    return c;
}

GeodesicClass SurfaceModel::gluing_curve(int i) const {
    if (impl_->kind == Kind::Hourglass) return geodesic("g");
    static const char* words[3] = {"a1", "a2", "A1A2"};
    if (i < 0 || i > 2) throw std::out_of_range("gluing curve index");
    return geodesic(words[i]);
}

SurfaceModel hourglass(double l) {
    if (!(l > 0.0)) throw std::invalid_argument("hourglass core length must be positive");
    auto impl = std::make_shared<SurfaceModel::Impl>();
    impl->kind = Kind::Hourglass;
    impl->gens = {Isometry::diagonal(l)};
    impl->names = {"g"};
    impl->core = l;
    impl->systole = l;
    return SurfaceModel(impl);
}

std::array<Isometry, 4> fn_generators(const FNParams& p) {
    for (double l : p.lengths)
        if (!(l > 0.0)) throw std::invalid_argument("Fenchel-Nielsen lengths must be positive");
    auto fr = hexagon_frames(p.lengths);
    Mat2 ms1 = reflection(fr[0].m), m12 = reflection(fr[1].m), ms2 = reflection(fr[2].m);
    Mat2 m23 = reflection(fr[3].m), ms3 = reflection(fr[4].m), m31 = reflection(fr[5].m);
    Mat2 A1 = m12 * m31;
    Mat2 A2 = m23 * m12;
    Mat2 t = ms1 * ms2;
    Mat2 u = ms1 * ms3;
    // Twist signs make all three twists right-handed with respect to the
    // crossing-angle convention of hyp2::angle_at_crossing.
    Mat2 T1 = translation(fr[0].m, -p.twists[0]);
    Mat2 T2 = translation(fr[2].m, p.twists[1]);
    Mat2 T3 = translation(fr[4].m, p.twists[2]);
    return {A1.iso(), A2.iso(), (T1 * t * T2).iso(), (T1 * u * T3).iso()};
}

SurfaceModel genus2_from_fn(const std::array<double, 3>& lengths,
                            const std::array<double, 3>& twists, int word_depth) {
    FNParams p{lengths, twists};
    auto gens = fn_generators(p);
    auto impl = std::make_shared<SurfaceModel::Impl>();
    impl->kind = Kind::Genus2FN;
    impl->gens.assign(gens.begin(), gens.end());
    impl->names = {"a1", "a2", "b1", "b2"};
    impl->fn = p;
    check_discrete(impl->gens, word_depth);

    auto frames = hexagon_frames(lengths);
    // A generic basepoint keeps the Dirichlet polygon free of degenerate
    // vertices.
    HPoint c = hexagon_centre(frames);
    HPoint base = hyp2::apply(centering(c).inverse(), HPoint{0.0137, 1.0213});
    impl->domain = DirichletDomain(impl->gens, base, 4.0 * std::numbers::pi);

    // Systole: every class has a representative moving the basepoint by at
    // most its length plus twice the covering radius.
    double lmin = std::min({lengths[0], lengths[1], lengths[2]});
    double R = lmin + 2.0 * impl->domain.covering_radius() + 1e-9;
    auto tiles = impl->domain.tiles(base, R);
    double sys = lmin;
    for (const auto& g : tiles) {
        double tl = hyp2::translation_length(g);
        if (tl > 1e-9) sys = std::min(sys, tl);
    }
    impl->systole = sys;
    return SurfaceModel(impl);
}

namespace {
constexpr double kOwnDomainRadius = 9.0;
}

std::vector<OrbitElement> enumerate_orbit(const SurfaceModel& S, const HPoint& x,
                                          const HPoint& y, double R) {
    std::vector<OrbitElement> out;
    if (R < 0) return out;
    if (S.kind() == Kind::Hourglass) {
        double l = S.core_length();
        double nstar = std::log(std::hypot(x.x, x.y) / std::hypot(y.x, y.y)) / l;
        long n0 = std::lround(nstar);
        auto term = [&](long n) {
            Isometry g = Isometry::diagonal(static_cast<double>(n) * l);
            return OrbitElement{g, hyp2::dist(x, g.apply(y))};
        };
        for (long n = n0;; ++n) {
            OrbitElement e = term(n);
            if (e.distance > R && n > nstar) break;
            if (e.distance <= R) out.push_back(e);
        }
        for (long n = n0 - 1;; --n) {
            OrbitElement e = term(n);
            if (e.distance > R && n < nstar) break;
            if (e.distance <= R) out.push_back(e);
        }
    } else {
        const DirichletDomain& D = S.domain();
        HPoint y0;
        Isometry h = D.reduce(y, y0);
        Isometry hinv = h.inverse();
        // Tiles of a domain centred at y0 are the orbit points themselves,
        // which pays for building that domain once the ball is large.
        std::optional<DirichletDomain> Dy;
        if (R + hyp2::dist(y0, D.base()) > kOwnDomainRadius) {
            try {
                Dy.emplace(S.generators(), y0, D.area());
            } catch (const std::exception&) {
                Dy.reset();
            }
        }
        if (Dy) {
            for (const auto& k : Dy->tiles(x, R)) {
                double d = hyp2::dist(x, k.apply(y0));
                if (d <= R) out.push_back({hyp2::compose(k, hinv), d});
            }
        } else {
            for (const auto& k : D.tiles(x, R + hyp2::dist(y0, D.base()) + 1e-9)) {
                double d = hyp2::dist(x, k.apply(y0));
                if (d <= R) out.push_back({hyp2::compose(k, hinv), d});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const OrbitElement& a, const OrbitElement& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.g.entries() < b.g.entries();
    });
    return out;
}

std::vector<Isometry> enumerate_orbit(const SurfaceModel& S, const HPoint& x, double R) {
    std::vector<Isometry> out;
    for (const auto& e : enumerate_orbit(S, x, x, R)) out.push_back(e.g);
    return out;
}

double segment_start(const GeodesicClass& gamma) { return 0.1234 * gamma.length; }

namespace {

// Elements g such that the lines g axis(gamma) include, once each, every
// translate meeting the Dirichlet domain.
std::vector<Isometry> lines_through_domain(const SurfaceModel& S, const GeodesicClass& gamma) {
    const DirichletDomain& D = S.domain();
    const HPoint& p = D.base();
    double reach = D.covering_radius() + 1e-9;
    HPoint p0 = gamma.axis.point_at(segment_start(gamma) + 0.5 * gamma.length);
    Isometry centre = centering(p);
    detail::KeyedSet seen(1e-9);
    std::vector<Isometry> out;
    for (const auto& e : enumerate_orbit(S, p, p0, reach + 0.5 * gamma.length)) {
        GeodesicLine line = hyp2::apply(e.g, gamma.axis);
        if (hyp2::dist_to_line(line, p) > reach) continue;
        if (!seen.insert(line_key(line, centre))) continue;
        out.push_back(e.g);
    }
    return out;
}

}  // namespace

std::vector<AxisTranslate> enumerate_axis_translates(const SurfaceModel& S,
                                                     const GeodesicClass& gamma,
                                                     const HPoint& x, double R) {
    std::vector<AxisTranslate> out;
    if (R < 0) return out;
    if (S.kind() == Kind::Hourglass) {
        double d = hyp2::dist_to_line(gamma.axis, x);
        if (d <= R) out.push_back({gamma.axis, d, hyp2::fermi(gamma.axis, x).r});
        return out;
    }
    const DirichletDomain& D = S.domain();
    struct Local {
        GeodesicLine line;
        Isometry frame_inv;
        Isometry frame;
    };
    std::vector<Local> local;
    for (const auto& g : lines_through_domain(S, gamma)) {
        GeodesicLine line = hyp2::apply(g, gamma.axis);
        Isometry f = line.frame();
        local.push_back({line, f.inverse(), f});
    }
    struct Found {
        GeodesicLine line;
        double distance;
        double r;
        HPoint foot;
    };
    std::vector<Found> found;
    const double sinh_r = std::sinh(R);
    for (const auto& k : D.tiles_meeting_ball(x, R)) {
        HPoint z = k.inverse().apply(x);
        for (const auto& L : local) {
            HPoint q = L.frame_inv.apply(z);
            if (std::abs(q.x) / q.y > sinh_r) continue;
            // Each translate is claimed by the tile holding the foot of the
            // perpendicular from x.
            HPoint foot = L.frame.apply(HPoint{0.0, std::hypot(q.x, q.y)});
            if (!D.contains(foot, 1e-10)) continue;
            double r = std::asinh(-q.x / q.y);
            found.push_back({hyp2::apply(k, L.line), std::abs(r), r, k.apply(foot)});
        }
    }
    std::sort(found.begin(), found.end(),
              [](const Found& a, const Found& b) { return a.distance < b.distance; });
    for (std::size_t i = 0; i < found.size(); ++i) {
        bool dup = false;
        for (std::size_t j = i; j-- > 0 && found[i].distance - found[j].distance < 1e-9;)
            dup = dup || hyp2::cosh_dist(found[i].foot, found[j].foot) < 1.0 + 1e-12;
        // Lines through x share the foot x; tell them apart by endpoints.
        if (dup && found[i].distance < 1e-9) {
            dup = false;
            Isometry centre = centering(x);
            auto ki = line_key(found[i].line, centre);
            for (std::size_t j = i; j-- > 0 && found[i].distance - found[j].distance < 1e-9;) {
                auto kj = line_key(found[j].line, centre);
                bool same = true;
                for (int c = 0; c < 4; ++c) same = same && std::abs(ki[c] - kj[c]) < 1e-9;
                dup = dup || same;
            }
        }
        if (!dup) out.push_back({found[i].line, found[i].distance, found[i].r});
    }
    return out;
}

bool same_class(const SurfaceModel&, const GeodesicClass& a, const GeodesicClass& b) {
    return a.word == b.word;
}

std::vector<Crossing> crossings(const SurfaceModel& S, const GeodesicClass& gamma,
                                const GeodesicClass& gamma_prime) {
    std::vector<Crossing> out;
    if (same_class(S, gamma, gamma_prime)) return out;
    double s0 = segment_start(gamma);
    double l = gamma.length;
    HPoint mid = gamma.axis.point_at(s0 + 0.5 * l);
    for (const auto& tr : enumerate_axis_translates(S, gamma_prime, mid, 0.5 * l + 1e-7)) {
        if (!hyp2::lines_cross(gamma.axis, tr.line)) continue;
        hyp2::CrossingPoint cp = hyp2::crossing(gamma.axis, tr.line);
        double t = hyp2::fermi(gamma.axis, cp.point).t;
        if (t < s0 || t >= s0 + l) continue;
        out.push_back({cp.point, cp.theta});
    }
    std::sort(out.begin(), out.end(), [&](const Crossing& a, const Crossing& b) {
        return hyp2::fermi(gamma.axis, a.point).t < hyp2::fermi(gamma.axis, b.point).t;
    });
    return out;
}

namespace {

// Minimum distance from axis(gamma) to translates of axis(gamma_prime) other
// than axis(gamma) itself; nullopt if some translate crosses it.
std::optional<double> min_translate_distance(const SurfaceModel& S, const GeodesicClass& gamma,
                                             const GeodesicClass& gamma_prime) {
    double s0 = segment_start(gamma);
    double l = gamma.length;
    HPoint mid = gamma.axis.point_at(s0 + 0.5 * l);
    Isometry centre = centering(mid);
    auto self_key = line_key(gamma.axis, centre);
    double rho = 0.5 * l + 1.0;
    for (int iter = 0; iter < 60; ++iter) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tr : enumerate_axis_translates(S, gamma_prime, mid, rho)) {
            auto k = line_key(tr.line, centre);
            bool is_self = true;
            for (int i = 0; i < 4; ++i) is_self = is_self && std::abs(k[i] - self_key[i]) < 1e-7;
            if (is_self) continue;
            if (hyp2::lines_cross(gamma.axis, tr.line)) return std::nullopt;
            auto ap = hyp2::common_perpendicular(gamma.axis, tr.line);
            if (ap) best = std::min(best, ap->distance);
        }
        if (best + 0.5 * l <= rho) return best;
        rho = std::isfinite(best) ? best + 0.5 * l + 1e-6 : 2.0 * rho;
    }
    throw std::runtime_error("geodesic distance search did not certify");
}

}  // namespace

double distance_between_geodesics(const SurfaceModel& S, const GeodesicClass& gamma,
                                  const GeodesicClass& gamma_prime) {
    if (same_class(S, gamma, gamma_prime)) return 0.0;
    if (S.kind() == Kind::Hourglass) return 0.0;
    auto d = min_translate_distance(S, gamma, gamma_prime);
    return d ? *d : 0.0;
}

double collar_width(const SurfaceModel& S, const GeodesicClass& gamma) {
    if (S.kind() == Kind::Hourglass) return kCollarCap;
    auto d = min_translate_distance(S, gamma, gamma);
    if (!d) throw std::domain_error("geodesic class '" + gamma.word + "' is not simple");
    return std::min(kCollarCap, 0.5 * *d);
}

double injectivity_radius(const SurfaceModel& S, const HPoint& x) {
    if (S.kind() == Kind::Hourglass) {
        double l = S.core_length();
        double r = hyp2::dist_to_line(S.geodesic("g").axis, x);
        double ch = std::cosh(r), sh = std::sinh(r);
        return 0.5 * std::acosh(ch * ch * std::cosh(l) - sh * sh);
    }
    for (double R = 1.0;; R *= 2.0) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : enumerate_orbit(S, x, x, R))
            if (e.distance > 1e-9) best = std::min(best, e.distance);
        if (std::isfinite(best)) return 0.5 * best;
    }
}

double translate_count_bound(double R, double eps) {
    double s = std::sinh(0.5 * (R + eps)) / std::sinh(0.5 * eps);
    return s * s;
}

double lift_count_bound(double R, double l, double r_inj) {
    double s = std::sinh(0.5 * r_inj);
    return l * std::sinh(R + r_inj) / (s * s);
}

}  // namespace graftlab::surface
