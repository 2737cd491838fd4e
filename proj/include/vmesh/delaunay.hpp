#pragma once

#include <array>
#include <span>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/spatial_hash.hpp"

namespace vmesh {

/// Delaunay triangulation of a planar point set.
///
/// Returns counter-clockwise triangles as indices into `points`; together they
/// tile the convex hull. Predicates are exact. Exactly cocircular quadrilaterals
/// take the diagonal whose sorted (tie_ids[i], tie_ids[j]) pair is
/// lexicographically smallest; when `tie_ids` is empty the point indices are
/// used. Exact duplicate points keep their first occurrence only.
///
/// Throws DegenerateError for fewer than 3 distinct points or when all points are collinear.
std::vector<std::array<int, 3>> delaunay_2d(std::span<const Vec2> points,
                                            std::span<const VertexId> tie_ids = {});

}  // namespace vmesh
