#pragma once

#include <functional>
#include <vector>

#include "graftlab/hyp2.hpp"

namespace graftlab::surface {

using hyp2::HPoint;
using hyp2::Isometry;

// Dirichlet fundamental polygon of a cocompact Fuchsian group centred at a
// basepoint, certified by its area.
class DirichletDomain {
public:
    DirichletDomain() = default;
    // Clips with every reduced word of length <= max_depth, increasing the
    // depth from 2 until the polygon is compact with area `target_area`.
    DirichletDomain(const std::vector<Isometry>& gens, const HPoint& base,
                    double target_area, int max_depth = 8);

    const HPoint& base() const { return base_; }
    const std::vector<Isometry>& pairings() const { return pairings_; }
    const std::vector<HPoint>& vertices() const { return vertices_; }
    double covering_radius() const { return covering_radius_; }
    double area() const { return area_; }
    int depth_used() const { return depth_; }

    // Writes z = h z0 with z0 in the closed domain and returns h.
    Isometry reduce(const HPoint& z, HPoint& z0) const;

    // Every group element k with dist(x, k base) <= radius. Tiles form a
    // tree in which the parent of k s is the neighbour whose centre is
    // closest to x, so each tile is produced exactly once.
    std::vector<Isometry> tiles(const HPoint& x, double radius) const;
    // Superset of the tiles k F meeting the closed ball B_R(x), pruned with
    // the signed distances to the side bisectors.
    std::vector<Isometry> tiles_meeting_ball(const HPoint& x, double R) const;
    // Whether z lies in the closed domain, with a relative slack.
    bool contains(const HPoint& z, double slack = 1e-12) const;

    // Area by polar quadrature over the fan of triangles at the basepoint.
    double area_by_quadrature(int nodes = 48) const;

private:
    HPoint base_;
    std::vector<Isometry> pairings_;
    std::vector<int> inverse_index_;
    std::vector<HPoint> neighbours_;  // pairing_i(base)
    std::vector<double> half_sinh_;   // 2 sinh(d(base, neighbour_i) / 2)
    std::vector<HPoint> vertices_;
    double covering_radius_ = 0.0;
    double area_ = 0.0;
    int depth_ = 0;
};

}  // namespace graftlab::surface
