#include "vmesh/voxel_map.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "vmesh/errors.hpp"

namespace vmesh {

MapConfig MapConfig::mechanical() {
  MapConfig c;
  c.xi = 0.15;
  c.region_size = 15.0;
  c.voxel_size = 0.60;
  return c;
}

MapConfig MapConfig::solid_state() {
  MapConfig c;
  c.xi = 0.10;
  c.region_size = 10.0;
  c.voxel_size = 0.40;
  return c;
}

void MapConfig::validate() const {
  if (!(xi > 0.0 && xi < voxel_size && voxel_size < region_size)) {
    throw InputError("map config requires 0 < xi < voxel_size < region_size (xi=" + std::to_string(xi) +
                     ", voxel_size=" + std::to_string(voxel_size) +
                     ", region_size=" + std::to_string(region_size) + ")");
  }
  if (dilation_radius < 0.0 || downsample_leaf < 0.0) {
    throw InputError("map config: dilation_radius and downsample_leaf must be >= 0");
  }
}

std::vector<Point3> downsample_grid(std::span<const Point3> points, double leaf) {
  if (!(leaf > 0.0)) throw std::invalid_argument("downsample_grid: leaf must be positive");
  struct Acc {
    Vec3 sum = Vec3::Zero();
    std::size_t n = 0;
  };
  std::unordered_map<GridKey, std::size_t, GridKeyHasher> slot;
  slot.reserve(points.size());
  std::vector<Acc> acc;
  for (const auto& p : points) {
    auto [it, inserted] = slot.try_emplace(grid_key(p, leaf), acc.size());
    if (inserted) acc.emplace_back();
    Acc& a = acc[it->second];
    a.sum += p;
    ++a.n;
  }
  std::vector<Point3> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.sum / static_cast<double>(a.n));
  return out;
}

VoxelMap::VoxelMap(MapConfig config) : config_(config), knn_(config.xi) { config_.validate(); }

Voxel& VoxelMap::get_or_create_voxel(const Point3& p) {
  const GridKey key = voxel_key(p);
  return *voxels_.get_or_create(key, [&] {
    Voxel v;
    v.key = key;
    return v;
  }).first;
}

Region& VoxelMap::get_or_create_region(const Point3& p) {
  const GridKey key = region_key(p);
  return *regions_.get_or_create(key, [&] {
    Region r;
    r.key = key;
    return r;
  }).first;
}

Voxel& VoxelMap::append_vertex_impl(const Point3& p, VertexId& id) {
  id = static_cast<VertexId>(vertices_.size());
  vertices_.push_back({id, p, {}});
  knn_.insert(id, p);
  Voxel& voxel = get_or_create_voxel(p);
  voxel.vertex_ids.push_back(id);
  voxel.flag = VoxelFlag::Activated;
  activated_.insert(voxel.key);
  // Regions are created with their first point, as voxels are.
  get_or_create_region(p);
  return voxel;
}

VertexId VoxelMap::append_vertex(const Point3& p) {
  if (!is_finite(p)) throw InputError("append_vertex: non-finite point");
  std::lock_guard lock(facet_mutex_);
  VertexId id = 0;
  Voxel& voxel = append_vertex_impl(p, id);
  voxel.stats.add(p);
  return id;
}

RegistrationReport VoxelMap::register_scan(const ScanFrame& frame) {
  if (!frame.pose.is_valid()) throw InputError("register_scan: invalid pose");

  // Appends may reallocate the vertex list that a background snapshot reads.
  std::lock_guard lock(facet_mutex_);
  RegistrationReport report;
  std::vector<Point3> world;
  world.reserve(frame.points.size());
  for (const auto& p : frame.points) {
    if (!is_finite(p)) {
      ++report.nonfinite_count;
      continue;
    }
    world.push_back(transform_point(frame.pose, p));
  }
  const std::vector<Point3> candidates = downsample_grid(world, config_.effective_downsample_leaf());
  report.downsampled_count = candidates.size();

  // New positions per touched voxel, folded into its statistics once at the end.
  std::vector<std::pair<Voxel*, std::vector<Point3>>> pending;
  std::unordered_map<GridKey, std::size_t, GridKeyHasher> pending_slot;

  for (const auto& p : candidates) {
    // nearest_within is inclusive; only strictly closer points are discarded.
    if (const auto n = knn_.nearest_within(p, config_.xi); n && n->distance < config_.xi) {
      ++report.discarded_count;
      continue;
    }
    VertexId id = 0;
    Voxel& voxel = append_vertex_impl(p, id);
    report.appended_vertex_ids.push_back(id);
    auto [it, inserted] = pending_slot.try_emplace(voxel.key, pending.size());
    if (inserted) {
      pending.emplace_back(&voxel, std::vector<Point3>{});
      report.activated_voxel_keys.push_back(voxel.key);
    }
    pending[it->second].second.push_back(p);
  }
  for (auto& [voxel, pts] : pending) voxel->stats.add(std::span<const Point3>(pts));
  return report;
}

void VoxelMap::deactivate(const GridKey& key) {
  if (Voxel* v = voxels_.find(key)) v->flag = VoxelFlag::Deactivated;
  activated_.erase(key);
}

void VoxelMap::add_facet(const TriangleFacet& facet) {
  for (VertexId v : facet.key.ids()) {
    if (v >= vertices_.size()) throw IntegrityError("add_facet: unknown vertex id " + std::to_string(v));
  }
  if (facets_.contains(facet.key)) {
    throw IntegrityError("add_facet: facet (" + std::to_string(facet.key[0]) + "," +
                         std::to_string(facet.key[1]) + "," + std::to_string(facet.key[2]) +
                         ") already exists");
  }
  facets_.insert_or_assign(facet.key, facet);
  Region& region = get_or_create_region(facet.center);
  region.facets.insert(facet.key);
  region.sync = SyncFlag::SyncRequired;
  for (VertexId v : facet.key.ids()) vertices_[v].tri_list.push_back(facet.key);
}

void VoxelMap::erase_facet(const FacetKey& key) {
  const TriangleFacet* facet = facets_.find(key);
  if (facet == nullptr) {
    throw IntegrityError("erase_facet: facet (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                         "," + std::to_string(key[2]) + ") does not exist");
  }
  for (VertexId v : key.ids()) {
    auto& list = vertices_[v].tri_list;
    auto it = std::find(list.begin(), list.end(), key);
    if (it == list.end()) throw IntegrityError("erase_facet: facet missing from a vertex tri_list");
    *it = list.back();
    list.pop_back();
  }
  Region* region = regions_.find(region_key(facet->center));
  if (region == nullptr || region->facets.erase(key) == 0) {
    throw IntegrityError("erase_facet: facet missing from its region");
  }
  region->sync = SyncFlag::SyncRequired;
  facets_.erase(key);
}

}  // namespace vmesh
