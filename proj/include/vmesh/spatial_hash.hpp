#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>

#include "vmesh/geom.hpp"

namespace vmesh {

using VertexId = std::uint32_t;

/// Integer cell coordinates of a point at a given cell size (floor convention).
struct GridKey {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend auto operator<=>(const GridKey&, const GridKey&) = default;
  GridKey operator+(const GridKey& o) const { return {x + o.x, y + o.y, z + o.z}; }
};

/// Cell containing `p`: floor(p / cell_size) per axis. Requires cell_size > 0.
GridKey grid_key(const Point3& p, double cell_size);

/// Axis-aligned bounds [min, max) of the cell `key` at `cell_size`.
Point3 cell_min_corner(const GridKey& key, double cell_size);
bool cell_contains(const GridKey& key, double cell_size, const Point3& p);

struct HashParams {
  std::uint64_t p1 = 116101;
  std::uint64_t p2 = 37199;
  std::uint64_t p3 = 93911;
  std::uint64_t n = 201326611;
};

/// ((x*p1) ^ (y*p2) ^ (z*p3)) mod n. Coordinates are reinterpreted as unsigned
/// 64-bit values, so products wrap modulo 2^64 before the XOR.
std::uint64_t int_hash(std::int64_t x, std::int64_t y, std::int64_t z, const HashParams& params = {});

inline std::uint64_t hash_key(const GridKey& k, const HashParams& params = {}) {
  return int_hash(k.x, k.y, k.z, params);
}

/// Sorted vertex-index triple identifying a triangle facet.
class FacetKey {
 public:
  FacetKey() = default;
  /// Throws std::invalid_argument unless a < b < c.
  FacetKey(VertexId a, VertexId b, VertexId c);
  /// Sorts the three ids; throws std::invalid_argument on duplicates.
  static FacetKey from_unsorted(VertexId a, VertexId b, VertexId c);

  VertexId operator[](int i) const { return ids_[static_cast<std::size_t>(i)]; }
  const std::array<VertexId, 3>& ids() const { return ids_; }
  bool contains(VertexId v) const { return ids_[0] == v || ids_[1] == v || ids_[2] == v; }

  friend auto operator<=>(const FacetKey&, const FacetKey&) = default;

 private:
  std::array<VertexId, 3> ids_{0, 1, 2};
};

/// Same combiner as hash_key applied to the sorted triple.
std::uint64_t triangle_key(const FacetKey& key, const HashParams& params = {});
/// Validating overload for raw triples; throws std::invalid_argument unless strictly increasing.
std::uint64_t triangle_key(const std::array<VertexId, 3>& ids, const HashParams& params = {});

struct GridKeyHasher {
  std::size_t operator()(const GridKey& k) const { return static_cast<std::size_t>(hash_key(k)); }
};

struct FacetKeyHasher {
  std::size_t operator()(const FacetKey& k) const { return static_cast<std::size_t>(triangle_key(k)); }
};

/// Hash table from an exact key to a value. Buckets are addressed by the
/// prime-XOR hash; lookups always compare full keys, so colliding hashes
/// never alias. References to stored values stay valid until that entry is erased.
template <typename Key, typename Value, typename Hasher>
class SpatialHashTable {
 public:
  using Map = std::unordered_map<Key, Value, Hasher>;
  using iterator = typename Map::iterator;
  using const_iterator = typename Map::const_iterator;

  Value* find(const Key& key) {
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }
  const Value* find(const Key& key) const {
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }
  bool contains(const Key& key) const { return map_.count(key) != 0; }

  /// Binds `key` to `value`, replacing any previous binding.
  Value& insert_or_assign(const Key& key, Value value) {
    return map_.insert_or_assign(key, std::move(value)).first->second;
  }

  /// Returns the value for `key`, constructing it with `make()` if absent.
  template <typename Factory>
  std::pair<Value*, bool> get_or_create(const Key& key, Factory&& make) {
    auto it = map_.find(key);
    if (it != map_.end()) return {&it->second, false};
    auto [ins, ok] = map_.emplace(key, make());
    return {&ins->second, ok};
  }

  bool erase(const Key& key) { return map_.erase(key) != 0; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  void clear() { map_.clear(); }

  iterator begin() { return map_.begin(); }
  iterator end() { return map_.end(); }
  const_iterator begin() const { return map_.begin(); }
  const_iterator end() const { return map_.end(); }

 private:
  Map map_;
};

}  // namespace vmesh
