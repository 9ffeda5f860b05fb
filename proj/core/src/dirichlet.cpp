#include "graftlab/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "graftlab/quadrature.hpp"
#include "keyed_set.hpp"

namespace graftlab::surface {

using hyp2::Vec3;

namespace {

std::array<double, 4> element_key(const Isometry& g) {
    double s = g.trace() >= 0.0 ? 1.0 : -1.0;
    const auto& e = g.entries();
    return {s * e[0], s * e[1], s * e[2], s * e[3]};
}

// Isometry z -> (z - x)/y moving p to i.
Isometry centering(const HPoint& p) {
    double s = std::sqrt(p.y);
    return Isometry(1.0 / s, -p.x / s, 0.0, s);
}

struct Klein {
    double u, v;
};

Klein to_klein(const Vec3& X) { return {X[1] / X[0], X[2] / X[0]}; }

Vec3 from_klein(const Klein& k) {
    double w = 1.0 / std::sqrt(1.0 - k.u * k.u - k.v * k.v);
    return {w, w * k.u, w * k.v};
}

struct Candidate {
    Isometry g;
    Vec3 q;  // hyperboloid image of the basepoint, centred frame
    double displacement;
};

struct Polygon {
    std::vector<Klein> v;
    std::vector<int> label;  // label[i]: constraint of edge v[i] -> v[i+1]; -1 outer square
};

double eval(const Vec3& q, const Klein& k) { return (q[0] - 1.0) - q[1] * k.u - q[2] * k.v; }

void clip(Polygon& poly, const Vec3& q, int c) {
    const std::size_t n = poly.v.size();
    std::vector<double> f(n);
    bool any_out = false;
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = eval(q, poly.v[i]);
        any_out = any_out || f[i] < 0.0;
    }
    if (!any_out) return;
    Polygon out;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        bool in_i = f[i] >= 0.0, in_j = f[j] >= 0.0;
        auto cut = [&] {
            double t = f[i] / (f[i] - f[j]);
            return Klein{poly.v[i].u + t * (poly.v[j].u - poly.v[i].u),
                         poly.v[i].v + t * (poly.v[j].v - poly.v[i].v)};
        };
        if (in_i) {
            out.v.push_back(poly.v[i]);
            out.label.push_back(poly.label[i]);
            if (!in_j) {
                out.v.push_back(cut());
                out.label.push_back(c);
            }
        } else if (in_j) {
            out.v.push_back(cut());
            out.label.push_back(poly.label[i]);
        }
    }
    // Drop degenerate edges.
    Polygon clean;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const Klein& a = out.v[i];
        const Klein& b = out.v[(i + 1) % out.v.size()];
        if (std::hypot(a.u - b.u, a.v - b.v) < 1e-13) continue;
        clean.v.push_back(a);
        clean.label.push_back(out.label[i]);
    }
    poly = std::move(clean);
}

bool compact(const Polygon& poly) {
    for (const auto& k : poly.v)
        if (k.u * k.u + k.v * k.v >= 1.0 - 1e-12) return false;
    return !poly.v.empty();
}

double max_radius(const Polygon& poly) {
    double best = 0.0;
    for (const auto& k : poly.v) best = std::max(best, std::atanh(std::hypot(k.u, k.v)));
    return best;
}

double interior_angle(const Vec3& prev, const Vec3& cur, const Vec3& next) {
    auto tangent = [&](const Vec3& U) {
        double b = hyp2::minkowski(U, cur);
        return Vec3{U[0] - b * cur[0], U[1] - b * cur[1], U[2] - b * cur[2]};
    };
    Vec3 u = tangent(prev), w = tangent(next);
    double c = -hyp2::minkowski(u, w) /
               std::sqrt(hyp2::minkowski(u, u) * hyp2::minkowski(w, w));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double polygon_area(const Polygon& poly) {
    const std::size_t n = poly.v.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += interior_angle(from_klein(poly.v[(i + n - 1) % n]), from_klein(poly.v[i]),
                              from_klein(poly.v[(i + 1) % n]));
    }
    return (static_cast<double>(n) - 2.0) * std::numbers::pi - sum;
}

}  // namespace

DirichletDomain::DirichletDomain(const std::vector<Isometry>& gens, const HPoint& base,
                                 double target_area, int max_depth)
    : base_(base) {
    const Isometry C = centering(base);
    const Isometry Cinv = C.inverse();
    const int m = static_cast<int>(gens.size());
    std::vector<Isometry> letters;
    for (const auto& g : gens) letters.push_back(g);
    for (const auto& g : gens) letters.push_back(g.inverse());

    std::vector<Candidate> cands;
    detail::KeyedSet seen(1e-8);
    seen.insert(element_key(Isometry::identity()));
    struct Node {
        Isometry g;
        int last;
    };
    std::vector<Node> frontier{{Isometry::identity(), -1}};
    auto add = [&](const Isometry& g) {
        if (!seen.insert(element_key(g))) return;
        Vec3 q = hyp2::to_hyperboloid(C.apply(g.apply(base)));
        cands.push_back({g, q, std::acosh(std::max(1.0, q[0]))});
    };

    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<Node> next;
        for (const auto& nd : frontier) {
            for (int l = 0; l < 2 * m; ++l) {
                if (nd.last >= 0 && (l % m) == (nd.last % m) && l != nd.last) continue;
                Isometry g = hyp2::compose(nd.g, letters[l]);
                next.push_back({g, l});
                add(g);
            }
        }
        frontier = std::move(next);
        if (depth < 2) continue;

        std::vector<std::size_t> order(cands.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return cands[a].displacement < cands[b].displacement;
        });
        Polygon poly;
        poly.v = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
        poly.label = {-1, -1, -1, -1};
        for (std::size_t idx : order) {
            if (compact(poly) && cands[idx].displacement > 2.0 * max_radius(poly) + 1e-9) break;
            clip(poly, cands[idx].q, static_cast<int>(idx));
        }
        if (!compact(poly)) continue;
        double area = polygon_area(poly);
        if (std::abs(area - target_area) > 1e-7 * target_area) continue;

        area_ = area;
        depth_ = depth;
        covering_radius_ = max_radius(poly);
        std::vector<int> labels = poly.label;
        for (const auto& k : poly.v)
            vertices_.push_back(Cinv.apply(hyp2::from_hyperboloid(from_klein(k))));
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        for (int lab : labels) pairings_.push_back(cands[lab].g);
        // Side pairings come in inverse pairs.
        for (const auto& g : pairings_) {
            int found = -1;
            for (std::size_t j = 0; j < pairings_.size(); ++j)
                if (hyp2::approx_equal(pairings_[j], g.inverse(), 1e-8)) found = static_cast<int>(j);
            if (found < 0) throw std::runtime_error("Dirichlet domain sides are not paired");
            inverse_index_.push_back(found);
            HPoint q = g.apply(base_);
            neighbours_.push_back(q);
            half_sinh_.push_back(2.0 * std::sinh(0.5 * hyp2::dist(base_, q)));
        }
        return;
    }
    throw std::runtime_error("Dirichlet domain did not close with the expected area");
}

Isometry DirichletDomain::reduce(const HPoint& z, HPoint& z0) const {
    Isometry h = Isometry::identity();
    HPoint w = z;
    for (int iter = 0; iter < 100000; ++iter) {
        double c0 = hyp2::cosh_dist(w, base_);
        int best = -1;
        double best_c = c0;
        for (std::size_t i = 0; i < pairings_.size(); ++i) {
            double c = hyp2::cosh_dist(w, pairings_[i].apply(base_));
            if (c < best_c * (1.0 - 1e-13)) {
                best_c = c;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) {
            z0 = w;
            return h;
        }
        w = pairings_[best].inverse().apply(w);
        h = hyp2::compose(h, pairings_[best]);
    }
    throw std::runtime_error("fundamental domain reduction did not terminate");
}

std::vector<Isometry> DirichletDomain::tiles(const HPoint& x, double radius) const {
    std::vector<Isometry> out;
    HPoint x0;
    Isometry start = reduce(x, x0);
    const double cosh_r = std::cosh(radius);
    if (hyp2::cosh_dist(x, start.apply(base_)) > cosh_r) return out;
    const std::size_t m = pairings_.size();
    std::vector<double> c(m);
    std::deque<Isometry> queue{start};
    // Near-ties between neighbours are decided by rounding, so every tied
    // parent may claim a child; the key set keeps one copy.
    detail::KeyedSet seen(1e-8);
    seen.insert(element_key(start));
    while (!queue.empty()) {
        Isometry k = queue.front();
        queue.pop_front();
        out.push_back(k);
        double ck = hyp2::cosh_dist(x, k.apply(base_));
        for (std::size_t j = 0; j < m; ++j) {
            Isometry n = Isometry::product_raw(k, pairings_[j]);
            double cn = hyp2::cosh_dist(x, n.apply(base_));
            if (cn > cosh_r || cn <= ck) continue;
            // n is a child of k iff k is its neighbour closest to x.
            double best_c = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                c[i] = hyp2::cosh_dist(x, n.apply(neighbours_[i]));
                if (i == 0 || c[i] < best_c) best_c = c[i];
            }
            if (c[inverse_index_[j]] > best_c * (1.0 + 1e-10)) continue;
            if (!seen.insert(element_key(n))) continue;
            queue.push_back(hyp2::compose(n, Isometry::identity()));
        }
    }
    return out;
}

std::vector<Isometry> DirichletDomain::tiles_meeting_ball(const HPoint& x, double R) const {
    std::vector<Isometry> out;
    const double sinh_r = std::sinh(R);
    for (const auto& k : tiles(x, R + covering_radius_ + 1e-9)) {
        HPoint z = k.inverse().apply(x);
        double c0 = hyp2::cosh_dist(z, base_);
        double lower = 0.0;
        for (std::size_t i = 0; i < neighbours_.size(); ++i)
            lower = std::max(lower, (c0 - hyp2::cosh_dist(z, neighbours_[i])) / half_sinh_[i]);
        if (lower <= sinh_r * (1.0 + 1e-12) + 1e-12) out.push_back(k);
    }
    return out;
}

bool DirichletDomain::contains(const HPoint& z, double slack) const {
    double c0 = hyp2::cosh_dist(z, base_);
    for (const auto& q : neighbours_)
        if (hyp2::cosh_dist(z, q) < c0 * (1.0 - slack)) return false;
    return true;
}

double DirichletDomain::area_by_quadrature(int nodes) const {
    const Isometry C = centering(base_);
    std::vector<Klein> ks;
    for (const auto& v : vertices_) ks.push_back(to_klein(hyp2::to_hyperboloid(C.apply(v))));
    quad::Rule rule = quad::gauss_legendre(nodes);
    double total = 0.0;
    const std::size_t n = ks.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Klein& a = ks[i];
        const Klein& b = ks[(i + 1) % n];
        double pa = std::atan2(a.v, a.u);
        double pb = std::atan2(b.v, b.u);
        double span = std::remainder(pb - pa, 2.0 * std::numbers::pi);
        for (int j = 0; j < nodes; ++j) {
            double phi = pa + 0.5 * span * (rule.nodes[j] + 1.0);
            double cu = std::cos(phi), cv = std::sin(phi);
            // Ray s (cu, cv) meets the chord a + t (b - a).
            double du = b.u - a.u, dv = b.v - a.v;
            double den = cu * dv - cv * du;
            double s = (a.u * dv - a.v * du) / den;
            double cosh_rho = 1.0 / std::sqrt(1.0 - s * s);
            total += 0.5 * span * rule.weights[j] * (cosh_rho - 1.0);
        }
    }
    return std::abs(total);
}

}  // namespace graftlab::surface
