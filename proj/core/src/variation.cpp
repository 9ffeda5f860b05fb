#include "graftlab/variation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "graftlab/quadrature.hpp"

namespace graftlab::variation {

namespace {

constexpr double kPi = std::numbers::pi;
// Integrals along a closed geodesic are split into pieces of at most this
// length, each with its own set of nearby translates.
constexpr double kPieceLength = 1.0;
constexpr double kAlongTol = 1e-10;

using hyp2::GeodesicLine;

// Along c(sigma) = path.point_at(sc + sigma), sinh of the signed distance to
// a line is A cosh(sigma) + B sinh(sigma).
struct Trace {
    double A = 0.0, B = 0.0;
    double sinh_r(double ch, double sh) const { return A * ch + B * sh; }
    double sinh_r_rate(double ch, double sh) const { return A * sh + B * ch; }
};

Trace trace_of(const GeodesicLine& line, const GeodesicLine& path, double sc) {
    double a = std::sinh(hyp2::fermi(line, path.point_at(sc)).r);
    double a1 = std::sinh(hyp2::fermi(line, path.point_at(sc + 1.0)).r);
    return {a, (a1 - a * std::cosh(1.0)) / std::sinh(1.0)};
}

std::vector<Trace> traces_of(const std::vector<GeodesicLine>& lines, const GeodesicLine& path, double sc) {
    std::vector<Trace> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(trace_of(l, path, sc));
    return out;
}

// Parameters sigma in (lo, hi) with A cosh + B sinh = c.
void add_level_crossings(const Trace& tr, double c, double lo, double hi, std::vector<double>& out) {
    // with x = e^sigma: (A + B) x^2 - 2 c x + (A - B) = 0
    double a = tr.A + tr.B, b = -2.0 * c, k = tr.A - tr.B;
    auto push = [&](double x) {
        if (x > 0.0) {
            double s = std::log(x);
            if (s > lo && s < hi) out.push_back(s);
        }
    };
    if (std::abs(a) < 1e-300) {
        if (b != 0.0) push(-k / b);
        return;
    }
    double disc = b * b - 4.0 * a * k;
    if (disc < 0.0) return;
    double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) {
        push(q / a);
        push(k / q);
    }
}

struct Piece {
    double centre = 0.0;
    double half = 0.0;
};

std::vector<Piece> pieces_of(const GeodesicClass& g) {
    int n = std::max(1, static_cast<int>(std::ceil(g.length / kPieceLength)));
    double h = g.length / n, s0 = surface::segment_start(g);
    std::vector<Piece> out;
    for (int i = 0; i < n; ++i) out.push_back({s0 + (i + 0.5) * h, 0.5 * h});
    return out;
}

quad::Result integrate_piece(const std::function<double(double)>& f, double half, std::vector<double> breaks,
                             double tol) {
    breaks.push_back(-half);
    breaks.push_back(half);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    quad::Options opt;
    opt.abs_tol = tol;
    opt.max_panels = 20000;
    return quad::integrate_pieces(f, breaks, opt);
}

std::vector<GeodesicLine> collar_lines(const SurfaceModel& S, const CollarPart& c, const HPoint& centre,
                                       double region) {
    if (S.kind() == surface::Kind::Hourglass) return {c.gamma.axis};
    greens::AxisOrbit orbit(S, c.gamma, c.psi.support_radius());
    return orbit.translates_near(centre, region);
}

std::vector<double> profile_breaks(const deform::BumpProfile& psi) {
    double R = psi.support_radius();
    if (psi.shape() == deform::Template::Plateau) return {-0.5 * R, 0.0, 0.5 * R};
    return {0.0};
}

// u near centre as a sum over every nearby translate, without cutoff.
std::function<double(const HPoint&)> conformal_near(const PerturbationField& A, const HPoint& centre,
                                                    double region) {
    struct Term {
        std::shared_ptr<const greens::LSolution> u;
        double weight;
        std::vector<GeodesicLine> lines;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    for (const auto& c : A.conformal) terms->push_back({c.u, c.weight, c.u->translates_near(centre, region)});
    double constant = A.constant;
    return [terms, constant](const HPoint& x) {
        double v = constant;
        for (const auto& t : *terms) {
            double s = 0.0;
            for (const auto& l : t.lines) s += t.u->profile(hyp2::fermi(l, x).r);
            v += t.weight * s;
        }
        return v;
    };
}

}  // namespace

greens::KernelEvaluation kernel_along(const SurfaceModel& S, const GeodesicClass& gamma,
                                      const GeodesicClass& gamma_prime, const TruncationPolicy& policy) {
    greens::KernelEvaluation out;
    const bool hourglass = S.kind() == surface::Kind::Hourglass;
    std::optional<greens::AxisOrbit> orbit;
    if (!hourglass) {
        double R = greens::resolve_radius(policy, [&](double r) { return greens::geodesic_tail_bound(S, gamma, r); });
        orbit.emplace(S, gamma, R);
        out.truncation_radius = R;
        out.tail_bound = gamma_prime.length * greens::geodesic_tail_bound(S, gamma, R);
    }
    auto pieces = pieces_of(gamma_prime);
    for (const auto& p : pieces) {
        HPoint centre = gamma_prime.axis.point_at(p.centre);
        auto lines = hourglass ? std::vector<GeodesicLine>{gamma.axis} : orbit->translates_near(centre, p.half);
        auto tr = traces_of(lines, gamma_prime.axis, p.centre);
        std::vector<double> breaks;
        for (const auto& t : tr) add_level_crossings(t, 0.0, -p.half, p.half, breaks);
        auto f = [&](double sigma) {
            double ch = std::cosh(sigma), sh = std::sinh(sigma), sum = 0.0;
            for (const auto& t : tr) sum += greens::decaying_solution_sinh(std::abs(t.sinh_r(ch, sh)));
            return sum / kPi;
        };
        auto r = integrate_piece(f, p.half, breaks, kAlongTol / pieces.size());
        out.value += r.value;
        out.quadrature_error += r.error;
        out.terms = std::max(out.terms, tr.size());
    }
    return out;
}

VariationReport grafting_length_derivative(const SurfaceModel& S, const GeodesicClass& gamma,
                                           const GeodesicClass& gamma_prime, const TruncationPolicy& policy) {
    VariationReport rep;
    const bool same = surface::same_class(S, gamma, gamma_prime);
    if (!same) {
        auto xs = surface::crossings(S, gamma, gamma_prime);
        for (const auto& x : xs) rep.sin_term += std::sin(x.theta);
        rep.crossings = xs.size();
    }
    auto k = kernel_along(S, gamma, gamma_prime, policy);
    rep.kernel_term = k.value;
    rep.total = rep.sin_term + rep.kernel_term;
    rep.tail_bound = k.tail_bound + k.quadrature_error;
    rep.truncation_radius = k.truncation_radius;
    if (!same && rep.crossings == 0 && S.kind() == surface::Kind::Genus2FN) {
        double d = surface::distance_between_geodesics(S, gamma, gamma_prime);
        rep.distance = d;
        rep.decay_bound = greens::decay_constant(0.5 * S.systole_lower_bound()) * gamma_prime.length * std::exp(-d);
    }
    return rep;
}

double earthquake_length_derivative(const SurfaceModel& S, const GeodesicClass& gamma,
                                    const GeodesicClass& gamma_prime) {
    if (surface::same_class(S, gamma, gamma_prime)) return 0.0;
    double sum = 0.0;
    for (const auto& x : surface::crossings(S, gamma, gamma_prime)) sum += std::cos(x.theta);
    return sum;
}

double fn_twist_fd_oracle(const surface::FNParams& params, int i, std::string_view word, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    if (i < 0 || i > 2) throw std::invalid_argument("gluing curve index must be 0, 1 or 2");
    auto w = surface::genus2_from_fn(params).parse(word);
    auto length = [&](double dt) {
        surface::FNParams p = params;
        p.twists[i] += dt;
        auto gens = surface::fn_generators(p);
        hyp2::Isometry g = hyp2::Isometry::identity();
        for (const auto& l : w) g = hyp2::compose(g, l.inverse ? gens[l.gen].inverse() : gens[l.gen]);
        return hyp2::translation_length(g);
    };
    return (length(h) - length(-h)) / (2.0 * h);
}

double PerturbationField::tail_bound() const {
    double t = 0.0;
    for (const auto& c : conformal) t += std::abs(c.weight) * c.u->tail_bound();
    return t;
}

PerturbationField combine(const std::vector<PerturbationField>& fields, const std::vector<double>& alpha) {
    if (fields.size() != alpha.size()) throw std::invalid_argument("one coefficient per field");
    PerturbationField out;
    for (std::size_t j = 0; j < fields.size(); ++j) {
        for (auto c : fields[j].collar) {
            c.weight *= alpha[j];
            out.collar.push_back(c);
        }
        for (auto c : fields[j].conformal) {
            c.weight *= alpha[j];
            out.conformal.push_back(c);
        }
        out.constant += alpha[j] * fields[j].constant;
        out.residual_norm += std::abs(alpha[j]) * fields[j].residual_norm;
    }
    return out;
}

double divergence_term(const deform::BumpProfile& psi, double r) {
    return psi(r) + psi.derivative(r) * std::tanh(r);
}

double perturbation_rhs(const deform::BumpProfile& psi, double r) { return deform::kappa_dot(psi, r); }

PerturbationField make_hyperbolic_perturbation(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const deform::BumpProfile& psi, const TruncationPolicy& policy,
                                               int samples) {
    const double width = surface::collar_width(S, gamma);
    const double a = psi.support_radius();
    if (!(2.0 * a < width)) throw std::domain_error("profile support must lie within half the collar of " + gamma.word);
    greens::CollarSource src{gamma, [psi](double r) { return perturbation_rhs(psi, r); }, a, profile_breaks(psi)};
    PerturbationField A;
    A.collar.push_back({gamma, psi, 1.0});
    A.conformal.push_back({std::make_shared<const greens::LSolution>(S, std::move(src), policy), 1.0});
    if (samples > 0) {
        std::vector<hyp2::FermiCoord> pts;
        const double s0 = surface::segment_start(gamma), span = std::min(gamma.length, kPieceLength);
        const double rmax = std::min(2.0 * a, 0.9 * width);
        for (int i = 0; i < samples; ++i) {
            double r = samples > 1 ? -rmax + 2.0 * rmax * i / (samples - 1) : 0.0;
            pts.push_back({s0 + span * (i + 0.5) / samples, r});
        }
        A.residual_norm = perturbation_residual(S, A, pts);
    }
    return A;
}

double perturbation_residual(const SurfaceModel& S, const PerturbationField& A,
                             const std::vector<hyp2::FermiCoord>& points) {
    if (A.collar.empty()) throw std::invalid_argument("residual needs a collar part for its coordinates");
    if (points.empty()) return 0.0;
    const GeodesicLine& axis = A.collar.front().gamma.axis;
    double tc = 0.0, rc = 0.0;
    for (const auto& p : points) {
        tc += p.t;
        rc += p.r;
    }
    HPoint centre = hyp2::from_fermi(axis, {tc / points.size(), rc / points.size()});
    double region = 0.0;
    for (const auto& p : points) region = std::max(region, hyp2::dist(centre, hyp2::from_fermi(axis, p)));
    region += 0.01;
    auto u = conformal_near(A, centre, region);
    std::vector<std::vector<GeodesicLine>> lines;
    for (const auto& c : A.collar) lines.push_back(collar_lines(S, c, centre, region));
    auto source = [&](const HPoint& x) {
        double v = 0.0;
        for (std::size_t k = 0; k < A.collar.size(); ++k) {
            const auto& c = A.collar[k];
            for (const auto& l : lines[k]) {
                double r = hyp2::fermi(l, x).r;
                if (std::abs(r) < c.psi.support_radius()) v += c.weight * perturbation_rhs(c.psi, r);
            }
        }
        return v;
    };
    double worst = 0.0;
    for (const auto& p : points) {
        auto at = [&](double dt, double dr) { return u(hyp2::from_fermi(axis, {p.t + dt, p.r + dr})); };
        auto L = [&](double h) {
            double c = at(0, 0);
            double urr = (at(0, h) - 2 * c + at(0, -h)) / (h * h);
            double ur = (at(0, h) - at(0, -h)) / (2 * h);
            double utt = (at(h, 0) - 2 * c + at(-h, 0)) / (h * h);
            double ch = std::cosh(p.r);
            return urr + std::tanh(p.r) * ur + utt / (ch * ch) - 2 * c;
        };
        const double h = 2e-3;
        double Lu = (4 * L(0.5 * h) - L(h)) / 3;
        worst = std::max(worst, std::abs(source(hyp2::from_fermi(axis, p)) - Lu));
    }
    return worst;
}

greens::KernelEvaluation delta_functional(const SurfaceModel& S, const GeodesicClass& gamma_prime,
                                          const PerturbationField& A) {
    greens::KernelEvaluation out;
    auto pieces = pieces_of(gamma_prime);
    double integral = 0.0, qerr = 0.0;
    for (const auto& p : pieces) {
        HPoint centre = gamma_prime.axis.point_at(p.centre);
        std::vector<double> breaks;
        std::vector<std::vector<Trace>> ctr;
        for (const auto& c : A.collar) {
            ctr.push_back(traces_of(collar_lines(S, c, centre, p.half), gamma_prime.axis, p.centre));
            double level = std::sinh(c.psi.support_radius());
            for (const auto& t : ctr.back()) {
                add_level_crossings(t, level, -p.half, p.half, breaks);
                add_level_crossings(t, -level, -p.half, p.half, breaks);
            }
        }
        std::vector<std::vector<Trace>> utr;
        for (const auto& c : A.conformal) {
            utr.push_back(traces_of(c.u->translates_near(centre, p.half), gamma_prime.axis, p.centre));
            out.terms += utr.back().size();
        }
        auto f = [&](double sigma) {
            double ch = std::cosh(sigma), sh = std::sinh(sigma);
            double v = A.constant;
            for (std::size_t k = 0; k < A.collar.size(); ++k) {
                const auto& c = A.collar[k];
                double level = std::sinh(c.psi.support_radius());
                for (const auto& t : ctr[k]) {
                    double s = t.sinh_r(ch, sh);
                    if (std::abs(s) >= level) continue;
                    double rate = t.sinh_r_rate(ch, sh) / std::sqrt(1.0 + s * s);  // dr/dl'
                    v += c.weight * c.psi(std::asinh(s)) * rate * rate;
                }
            }
            for (std::size_t k = 0; k < A.conformal.size(); ++k) {
                double sum = 0.0;
                for (const auto& t : utr[k]) sum += A.conformal[k].u->profile_sinh(t.sinh_r(ch, sh));
                v += A.conformal[k].weight * sum;
            }
            return v;
        };
        auto r = integrate_piece(f, p.half, breaks, kAlongTol / pieces.size());
        integral += r.value;
        qerr += r.error;
    }
    out.value = integral / gamma_prime.length;
    out.quadrature_error = qerr / gamma_prime.length;
    out.tail_bound = A.tail_bound();
    for (const auto& c : A.conformal) out.truncation_radius = std::max(out.truncation_radius, c.u->radius());
    return out;
}

DeltaMatrix delta_matrix(const SurfaceModel& S, const std::vector<GeodesicClass>& geodesics,
                         const std::vector<PerturbationField>& fields) {
    const std::size_t m = geodesics.size();
    if (fields.size() != m) throw std::invalid_argument("delta matrix needs one field per geodesic");
    DeltaMatrix D;
    D.M.assign(m, std::vector<double>(m, 0.0));
    D.error.assign(m, std::vector<double>(m, 0.0));
    Eigen::MatrixXd M(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            auto e = delta_functional(S, geodesics[i], fields[j]);
            D.M[i][j] = M(i, j) = e.value;
            D.error[i][j] = e.tail_bound + e.quadrature_error;
        }
    D.determinant = m ? M.determinant() : 1.0;
    D.diagonal_target = true;
    D.dominance_margin = m ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        D.diagonal.push_back(D.M[i][i]);
        double off = 0.0, offsum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            off = std::max(off, std::abs(D.M[i][j]));
            offsum += std::abs(D.M[i][j]) + D.error[i][j];
        }
        D.off_diagonal_max.push_back(off);
        D.diagonal_target = D.diagonal_target && D.M[i][i] < -1.0 / (2.0 * kPi);
        D.dominance_margin = std::min(D.dominance_margin, std::abs(D.M[i][i]) - D.error[i][i] - offsum);
    }
    D.invertible = m > 0 && D.dominance_margin > 0.0;
    return D;
}

std::vector<double> prescribe(const DeltaMatrix& D, const std::vector<double>& a) {
    const std::size_t m = D.M.size();
    if (a.size() != m) throw std::invalid_argument("one target per geodesic");
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) {
        b(i) = a[i];
        for (std::size_t j = 0; j < m; ++j) M(i, j) = D.M[i][j];
    }
    Eigen::VectorXd x = M.partialPivLu().solve(b);
    return {x.data(), x.data() + m};
}

double length_derivative_via_linearization(const SurfaceModel& S, const GeodesicClass& gamma,
                                           const deform::BumpProfile& psi, const GeodesicClass& gamma_prime,
                                           const TruncationPolicy& policy) {
    auto A = make_hyperbolic_perturbation(S, gamma, psi, policy, 0);
    return gamma_prime.length * delta_functional(S, gamma_prime, A).value;
}

}  // namespace graftlab::variation
