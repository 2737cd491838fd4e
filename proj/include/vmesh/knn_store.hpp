#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/spatial_hash.hpp"

namespace vmesh {

class EmptyStoreError : public std::runtime_error {
 public:
  EmptyStoreError() : std::runtime_error("empty store") {}
};

/// Exact nearest-neighbour and radius queries over a growing point set.
///
/// Points are bucketed in a uniform grid of `cell_size`; insertion is O(1) and
/// never rebuilds. Nearest queries expand Chebyshev rings of cells around the
/// query cell and stop once no unvisited cell can hold a closer point, falling
/// back to a linear scan when the rings would visit more cells than there are
/// points. Ties on distance resolve to the smaller id.
///
/// Const member functions do not mutate and may run concurrently.
class KnnStore {
 public:
  struct Neighbor {
    VertexId id = 0;
    double distance = 0.0;
  };

  explicit KnnStore(double cell_size = 0.1);

  void insert(VertexId id, const Point3& p);
  void reserve(std::size_t n) { entries_.reserve(n); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double cell_size() const { return cell_size_; }

  /// Throws EmptyStoreError when nothing has been inserted.
  Neighbor nearest(const Point3& p) const;
  std::optional<Neighbor> try_nearest(const Point3& p) const;
  /// Nearest entry with distance <= r, if any.
  std::optional<Neighbor> nearest_within(const Point3& p, double r) const;

  /// All entries with distance <= r, sorted by id.
  std::vector<Neighbor> radius(const Point3& p, double r) const;
  /// Appends ids of entries with distance <= r to `out` (unsorted).
  void radius_ids(const Point3& p, double r, std::vector<VertexId>& out) const;

 private:
  struct Entry {
    VertexId id;
    Point3 pos;
  };

  template <typename Fn>
  void for_each_in_box(const GridKey& lo, const GridKey& hi, Fn&& fn) const;
  std::size_t box_cell_count(const GridKey& lo, const GridKey& hi) const;
  void consider(const Entry& e, const Point3& p, double& best_sq, const Entry*& best) const;

  double cell_size_;
  std::vector<Entry> entries_;
  std::unordered_map<GridKey, std::vector<std::uint32_t>, GridKeyHasher> cells_;
  GridKey min_cell_{};
  GridKey max_cell_{};
};

}  // namespace vmesh
