#include "vmesh/spatial_hash.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vmesh {

GridKey grid_key(const Point3& p, double cell_size) {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_size)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_size)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_size))};
}

Point3 cell_min_corner(const GridKey& key, double cell_size) {
  return Point3(static_cast<double>(key.x), static_cast<double>(key.y), static_cast<double>(key.z)) *
         cell_size;
}

bool cell_contains(const GridKey& key, double cell_size, const Point3& p) {
  // Same floor arithmetic as grid_key, so membership never disagrees with it.
  return grid_key(p, cell_size) == key;
}

std::uint64_t int_hash(std::int64_t x, std::int64_t y, std::int64_t z, const HashParams& params) {
  const auto ux = static_cast<std::uint64_t>(x);
  const auto uy = static_cast<std::uint64_t>(y);
  const auto uz = static_cast<std::uint64_t>(z);
  return ((ux * params.p1) ^ (uy * params.p2) ^ (uz * params.p3)) % params.n;
}

FacetKey::FacetKey(VertexId a, VertexId b, VertexId c) : ids_{a, b, c} {
  if (!(a < b && b < c)) {
    throw std::invalid_argument("facet key must be strictly increasing, got (" + std::to_string(a) +
                                ", " + std::to_string(b) + ", " + std::to_string(c) + ")");
  }
}

FacetKey FacetKey::from_unsorted(VertexId a, VertexId b, VertexId c) {
  std::array<VertexId, 3> s{a, b, c};
  std::sort(s.begin(), s.end());
  return FacetKey(s[0], s[1], s[2]);
}

std::uint64_t triangle_key(const FacetKey& key, const HashParams& params) {
  return int_hash(key[0], key[1], key[2], params);
}

std::uint64_t triangle_key(const std::array<VertexId, 3>& ids, const HashParams& params) {
  return triangle_key(FacetKey(ids[0], ids[1], ids[2]), params);
}

}  // namespace vmesh
