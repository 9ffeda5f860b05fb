#pragma once

// Independent reference computations for the tests. Nothing here uses the
// Dirichlet domain or the tile enumeration of the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "graftlab/hyp2.hpp"
#include "graftlab/surface.hpp"

namespace oracle {

using graftlab::hyp2::Isometry;

// Every reduced word of length <= depth over the generators, as matrices.
inline void for_each_word(const std::vector<Isometry>& gens, int depth,
                          const std::function<void(const Isometry&, int)>& visit) {
    const int m = static_cast<int>(gens.size());
    std::vector<Isometry> letters(gens);
    for (const auto& g : gens) letters.push_back(g.inverse());
    std::function<void(const Isometry&, int, int)> rec = [&](const Isometry& g, int last, int len) {
        visit(g, len);
        if (len == depth) return;
        for (int l = 0; l < 2 * m; ++l) {
            if (last >= 0 && l % m == last % m && l != last) continue;
            rec(Isometry::product_raw(g, letters[l]), l, len + 1);
        }
    };
    rec(Isometry::identity(), -1, 0);
}

inline bool same_matrix(const Isometry& g, const Isometry& h, double tol) {
    const auto& a = g.entries();
    const auto& b = h.entries();
    double s = 1.0;
    for (int i = 0; i < 4; ++i) s = std::max(s, std::abs(a[i]));
    // Matrices in PSL(2,R) are equal up to sign.
    bool plus = true, minus = true;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(a[i] - b[i]) > tol * s) plus = false;
        if (std::abs(a[i] + b[i]) > tol * s) minus = false;
    }
    return plus || minus;
}

// Sorted distances of the distinct elements g with d(x, g y) <= R.
inline std::vector<double> orbit_distances(const std::vector<Isometry>& gens, int depth,
                                           const graftlab::hyp2::HPoint& x,
                                           const graftlab::hyp2::HPoint& y, double R) {
    std::vector<std::pair<double, Isometry>> found;
    for_each_word(gens, depth, [&](const Isometry& g, int) {
        double d = graftlab::hyp2::dist(x, g.apply(y));
        if (d <= R) found.push_back({d, g});
    });
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, Isometry>> uniq;
    for (const auto& f : found) {
        bool dup = false;
        for (auto it = uniq.rbegin(); it != uniq.rend() && it->first > f.first - 1e-9; ++it)
            if (same_matrix(it->second, f.second, 1e-9)) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(f);
    }
    std::vector<double> out;
    for (const auto& u : uniq) out.push_back(u.first);
    return out;
}

// Ideal points compared on the boundary circle of the disc, so that huge
// finite endpoints match the point at infinity.
inline bool same_endpoint(const graftlab::hyp2::Ideal& a, const graftlab::hyp2::Ideal& b,
                          double tol) {
    auto circle = [](const graftlab::hyp2::Ideal& e) -> std::pair<double, double> {
        if (e.infinite) return {1.0, 0.0};
        double n = e.x * e.x + 1.0;
        return {(e.x * e.x - 1.0) / n, 2.0 * e.x / n};
    };
    auto [u1, v1] = circle(a);
    auto [u2, v2] = circle(b);
    return std::hypot(u1 - u2, v1 - v2) <= tol;
}

// Distinct unoriented lines g * line over words of length <= depth.
inline std::vector<graftlab::hyp2::GeodesicLine> line_translates(
    const std::vector<Isometry>& gens, int depth, const graftlab::hyp2::GeodesicLine& line,
    const std::function<bool(const graftlab::hyp2::GeodesicLine&)>& keep) {
    std::vector<graftlab::hyp2::GeodesicLine> out;
    for_each_word(gens, depth, [&](const Isometry& g, int) {
        auto l = graftlab::hyp2::apply(g, line);
        if (!keep(l)) return;
        for (const auto& o : out) {
            if ((same_endpoint(o.from, l.from, 1e-9) && same_endpoint(o.to, l.to, 1e-9)) ||
                (same_endpoint(o.from, l.to, 1e-9) && same_endpoint(o.to, l.from, 1e-9)))
                return;
        }
        out.push_back(l);
    });
    return out;
}

struct Metric2 {
    double E, F, G;
};

// Gaussian curvature of E du^2 + 2F du dv + G dv^2 by the Brioschi formula,
// all partials from Richardson-extrapolated central differences.
template <class M>
double brioschi_curvature(M metric, double u, double v, double h = 2e-3) {
    auto comp = [&](int k, double a, double b) {
        Metric2 m = metric(a, b);
        return k == 0 ? m.E : (k == 1 ? m.F : m.G);
    };
    auto d1 = [&](int k, bool du, double step) {
        double a = du ? step : 0.0, b = du ? 0.0 : step;
        return (comp(k, u + a, v + b) - comp(k, u - a, v - b)) / (2 * step);
    };
    auto d2 = [&](int k, bool du, double step) {
        double a = du ? step : 0.0, b = du ? 0.0 : step;
        return (comp(k, u + a, v + b) - 2 * comp(k, u, v) + comp(k, u - a, v - b)) / (step * step);
    };
    auto dm = [&](int k, double step) {
        return (comp(k, u + step, v + step) - comp(k, u + step, v - step) - comp(k, u - step, v + step) +
                comp(k, u - step, v - step)) / (4 * step * step);
    };
    auto rich = [&](auto f) { return (4 * f(0.5 * h) - f(h)) / 3; };
    Metric2 m = metric(u, v);
    double Eu = rich([&](double s) { return d1(0, true, s); });
    double Ev = rich([&](double s) { return d1(0, false, s); });
    double Fu = rich([&](double s) { return d1(1, true, s); });
    double Fv = rich([&](double s) { return d1(1, false, s); });
    double Gu = rich([&](double s) { return d1(2, true, s); });
    double Gv = rich([&](double s) { return d1(2, false, s); });
    double Evv = rich([&](double s) { return d2(0, false, s); });
    double Guu = rich([&](double s) { return d2(2, true, s); });
    double Fuv = rich([&](double s) { return dm(1, s); });
    auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double hh, double i) {
        return a * (e * i - f * hh) - b * (d * i - f * g) + c * (d * hh - e * g);
    };
    double d_first = det3(-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
                          Fv - 0.5 * Gu, m.E, m.F,
                          0.5 * Gv, m.F, m.G);
    double d_second = det3(0.0, 0.5 * Ev, 0.5 * Gu,
                           0.5 * Ev, m.E, m.F,
                           0.5 * Gu, m.F, m.G);
    double W = m.E * m.G - m.F * m.F;
    return (d_first - d_second) / (W * W);
}

}  // namespace oracle
