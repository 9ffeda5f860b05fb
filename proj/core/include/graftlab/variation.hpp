#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "graftlab/deform.hpp"
#include "graftlab/greens.hpp"

namespace graftlab::variation {

using greens::TruncationPolicy;
using hyp2::HPoint;
using surface::GeodesicClass;
using surface::SurfaceModel;

struct VariationReport {
    double sin_term = 0.0;
    double kernel_term = 0.0;
    double total = 0.0;
    double tail_bound = 0.0;  // truncation tail plus quadrature error estimate
    double truncation_radius = 0.0;
    std::size_t crossings = 0;
    // Disjoint pairs only: distance and the bound C l' e^{-d}.
    std::optional<double> distance;
    std::optional<double> decay_bound;
};

// Integral of K_gamma over one period of gamma'.
greens::KernelEvaluation kernel_along(const SurfaceModel& S, const GeodesicClass& gamma,
                                      const GeodesicClass& gamma_prime,
                                      const TruncationPolicy& policy = {});

// d/dt of l(gamma') under grafting along gamma.
VariationReport grafting_length_derivative(const SurfaceModel& S, const GeodesicClass& gamma,
                                           const GeodesicClass& gamma_prime,
                                           const TruncationPolicy& policy = {});
// d/dt of l(gamma') under the earthquake along gamma.
double earthquake_length_derivative(const SurfaceModel& S, const GeodesicClass& gamma,
                                    const GeodesicClass& gamma_prime);

// Central difference of l(word) in the twist of gluing curve i.
double fn_twist_fd_oracle(const surface::FNParams& params, int i, std::string_view word, double h);

// g(A v, v) = weight * psi(r) dr(v)^2 in the collar of gamma.
struct CollarPart {
    GeodesicClass gamma;
    deform::BumpProfile psi;
    double weight = 1.0;
};

struct ConformalPart {
    std::shared_ptr<const greens::LSolution> u;
    double weight = 1.0;
};

// A = sum of collar parts + (constant + sum weight * u) Id.
struct PerturbationField {
    std::vector<CollarPart> collar;
    std::vector<ConformalPart> conformal;
    double constant = 0.0;
    double residual_norm = 0.0;  // sup of |div div(JAJ) + Tr A| at the samples

    double tail_bound() const;
};

PerturbationField combine(const std::vector<PerturbationField>& fields, const std::vector<double>& alpha);

// div div(J A1 J) for the collar part of psi, as a function of r.
double divergence_term(const deform::BumpProfile& psi, double r);
// div div(J A1 J) + Tr A1, the source for the conformal correction.
double perturbation_rhs(const deform::BumpProfile& psi, double r);

// A1 + u Id with (Delta - 2) u = perturbation_rhs. The residual is measured
// by finite differences at `samples` points of the collar (none if 0).
PerturbationField make_hyperbolic_perturbation(const SurfaceModel& S, const GeodesicClass& gamma,
                                               const deform::BumpProfile& psi,
                                               const TruncationPolicy& policy = {}, int samples = 20);

// Sup of |div div(JAJ) + Tr A| over the given points, from finite
// differences of u in Fermi coordinates about the first collar part.
double perturbation_residual(const SurfaceModel& S, const PerturbationField& A,
                             const std::vector<hyp2::FermiCoord>& points);

// (1/l') times the integral of <c', A c'> over one period of gamma'.
greens::KernelEvaluation delta_functional(const SurfaceModel& S, const GeodesicClass& gamma_prime,
                                          const PerturbationField& A);

struct DeltaMatrix {
    std::vector<std::vector<double>> M;
    std::vector<std::vector<double>> error;  // per-entry tail bounds
    std::vector<double> diagonal;
    std::vector<double> off_diagonal_max;  // per row
    double determinant = 0.0;
    bool diagonal_target = false;  // every M_ii < -1/(2 pi)
    // min_i |M_ii| - err_ii - sum_{j != i} (|M_ij| + err_ij); positive means
    // strictly diagonally dominant for every matrix within the error bounds.
    double dominance_margin = 0.0;
    bool invertible = false;
};

DeltaMatrix delta_matrix(const SurfaceModel& S, const std::vector<GeodesicClass>& geodesics,
                         const std::vector<PerturbationField>& fields);
// alpha with M alpha = a.
std::vector<double> prescribe(const DeltaMatrix& D, const std::vector<double>& a);

// The first-variation integrals for the metric family of psi along gamma:
// int psi (dr/dl')^2 dl' + int u dl'.
double length_derivative_via_linearization(const SurfaceModel& S, const GeodesicClass& gamma,
                                           const deform::BumpProfile& psi,
                                           const GeodesicClass& gamma_prime,
                                           const TruncationPolicy& policy = {});

}  // namespace graftlab::variation
