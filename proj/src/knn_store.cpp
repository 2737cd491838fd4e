#include "vmesh/knn_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vmesh {

KnnStore::KnnStore(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("KnnStore cell size must be positive");
}

void KnnStore::insert(VertexId id, const Point3& p) {
  if (!is_finite(p)) throw std::invalid_argument("KnnStore::insert: non-finite point");
  const GridKey key = grid_key(p, cell_size_);
  if (entries_.empty()) {
    min_cell_ = max_cell_ = key;
  } else {
    min_cell_ = {std::min(min_cell_.x, key.x), std::min(min_cell_.y, key.y), std::min(min_cell_.z, key.z)};
    max_cell_ = {std::max(max_cell_.x, key.x), std::max(max_cell_.y, key.y), std::max(max_cell_.z, key.z)};
  }
  cells_[key].push_back(static_cast<std::uint32_t>(entries_.size()));
  entries_.push_back({id, p});
}

std::size_t KnnStore::box_cell_count(const GridKey& lo, const GridKey& hi) const {
  if (hi.x < lo.x || hi.y < lo.y || hi.z < lo.z) return 0;
  const double n = static_cast<double>(hi.x - lo.x + 1) * static_cast<double>(hi.y - lo.y + 1) *
                   static_cast<double>(hi.z - lo.z + 1);
  return n > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(n);
}

template <typename Fn>
void KnnStore::for_each_in_box(const GridKey& lo, const GridKey& hi, Fn&& fn) const {
  const GridKey a{std::max(lo.x, min_cell_.x), std::max(lo.y, min_cell_.y), std::max(lo.z, min_cell_.z)};
  const GridKey b{std::min(hi.x, max_cell_.x), std::min(hi.y, max_cell_.y), std::min(hi.z, max_cell_.z)};
  if (box_cell_count(a, b) > 4 * entries_.size() + 64) {
    for (const auto& e : entries_) fn(e);
    return;
  }
  for (std::int64_t x = a.x; x <= b.x; ++x) {
    for (std::int64_t y = a.y; y <= b.y; ++y) {
      for (std::int64_t z = a.z; z <= b.z; ++z) {
        auto it = cells_.find({x, y, z});
        if (it == cells_.end()) continue;
        for (std::uint32_t idx : it->second) fn(entries_[idx]);
      }
    }
  }
}

void KnnStore::consider(const Entry& e, const Point3& p, double& best_sq, const Entry*& best) const {
  const double d = (e.pos - p).squaredNorm();
  if (d < best_sq || (d == best_sq && best != nullptr && e.id < best->id)) {
    best_sq = d;
    best = &e;
  }
}

std::optional<KnnStore::Neighbor> KnnStore::try_nearest(const Point3& p) const {
  if (entries_.empty()) return std::nullopt;
  const GridKey c = grid_key(p, cell_size_);
  double best_sq = std::numeric_limits<double>::infinity();
  const Entry* best = nullptr;

  // Rings needed to cover every occupied cell from the query cell.
  const std::int64_t max_ring = std::max({std::abs(c.x - min_cell_.x), std::abs(c.x - max_cell_.x),
                                          std::abs(c.y - min_cell_.y), std::abs(c.y - max_cell_.y),
                                          std::abs(c.z - min_cell_.z), std::abs(c.z - max_cell_.z)});
  bool done = false;
  for (std::int64_t r = 0; r <= max_ring && !done; ++r) {
    const double side = static_cast<double>(2 * r + 1);
    if (side * side * side > 8.0 * static_cast<double>(entries_.size()) + 64.0) {
      for (const auto& e : entries_) consider(e, p, best_sq, best);
      break;
    }
    for (std::int64_t dx = -r; dx <= r; ++dx) {
      for (std::int64_t dy = -r; dy <= r; ++dy) {
        const bool xy_shell = std::abs(dx) == r || std::abs(dy) == r;
        for (std::int64_t dz = -r; dz <= r; dz += (xy_shell ? 1 : 2 * std::max<std::int64_t>(r, 1))) {
          auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) continue;
          for (std::uint32_t idx : it->second) consider(entries_[idx], p, best_sq, best);
        }
      }
    }
    // Any point in ring r+1 or beyond is at least r cells away on some axis.
    const double reach = static_cast<double>(r) * cell_size_;
    if (best != nullptr && best_sq < reach * reach) done = true;
  }
  return Neighbor{best->id, std::sqrt(best_sq)};
}

KnnStore::Neighbor KnnStore::nearest(const Point3& p) const {
  auto n = try_nearest(p);
  if (!n) throw EmptyStoreError();
  return *n;
}

std::optional<KnnStore::Neighbor> KnnStore::nearest_within(const Point3& p, double r) const {
  if (entries_.empty() || r < 0.0) return std::nullopt;
  const Vec3 ext = Vec3::Constant(r);
  double best_sq = std::numeric_limits<double>::infinity();
  const Entry* best = nullptr;
  for_each_in_box(grid_key(p - ext, cell_size_), grid_key(p + ext, cell_size_),
                  [&](const Entry& e) { consider(e, p, best_sq, best); });
  if (best == nullptr || best_sq > r * r) return std::nullopt;
  return Neighbor{best->id, std::sqrt(best_sq)};
}

void KnnStore::radius_ids(const Point3& p, double r, std::vector<VertexId>& out) const {
  if (entries_.empty() || r < 0.0) return;
  const Vec3 ext = Vec3::Constant(r);
  const double r_sq = r * r;
  for_each_in_box(grid_key(p - ext, cell_size_), grid_key(p + ext, cell_size_), [&](const Entry& e) {
    if ((e.pos - p).squaredNorm() <= r_sq) out.push_back(e.id);
  });
}

std::vector<KnnStore::Neighbor> KnnStore::radius(const Point3& p, double r) const {
  std::vector<Neighbor> out;
  if (entries_.empty() || r < 0.0) return out;
  const Vec3 ext = Vec3::Constant(r);
  const double r_sq = r * r;
  for_each_in_box(grid_key(p - ext, cell_size_), grid_key(p + ext, cell_size_), [&](const Entry& e) {
    const double d = (e.pos - p).squaredNorm();
    if (d <= r_sq) out.push_back({e.id, std::sqrt(d)});
  });
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  return out;
}

}  // namespace vmesh
