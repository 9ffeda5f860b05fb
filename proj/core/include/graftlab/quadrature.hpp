#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace graftlab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // sum of |K15 - G7| over accepted panels
    int evaluations = 0;
    bool converged = true;
};

struct Options {
    double abs_tol = 1e-9;
    int max_panels = 4000;
};

namespace detail {

// Kronrod 15-point nodes (x >= 0) with the embedded 7-point Gauss weights.
inline constexpr double xk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double k = fc * wk[7], g = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * xk[j];
        double s = f(c - dx) + f(c + dx);
        k += wk[j] * s;
        if (j % 2 == 1) g += wg[j / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7, 15) on [a, b]: the panel with the
// largest error estimate is bisected until the total estimate is below
// abs_tol.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result out;
    if (a == b) return out;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Panel> heap;
    detail::Panel first = detail::gk15(f, a, b);
    heap.push(first);
    double total_err = first.error;
    out.evaluations = 15;
    int panels = 1;
    while (total_err > opt.abs_tol) {
        if (panels >= opt.max_panels) {
            out.converged = false;
            break;
        }
        detail::Panel p = heap.top();
        double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        detail::Panel l = detail::gk15(f, p.a, m);
        detail::Panel r = detail::gk15(f, m, p.b);
        out.evaluations += 30;
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // Sum in interval order so the result does not depend on heap layout.
    std::vector<detail::Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(),
              [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
    double v = 0.0, e = 0.0;
    for (const auto& p : all) {
        v += p.value;
        e += p.error;
    }
    out.value = sign * v;
    out.error = e;
    return out;
}

// Integrate over consecutive break points, splitting the tolerance evenly.
template <class F>
Result integrate_pieces(F&& f, const std::vector<double>& breaks, const Options& opt = {}) {
    Result out;
    if (breaks.size() < 2) return out;
    Options o = opt;
    o.abs_tol = opt.abs_tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        Result r = integrate(f, breaks[i], breaks[i + 1], o);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    }
    return out;
}

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration.
Rule gauss_legendre(int n);

}  // namespace graftlab::quad
