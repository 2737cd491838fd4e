#include "vmesh/mesher.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_set>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "vmesh/delaunay.hpp"
#include "vmesh/errors.hpp"

namespace vmesh {

std::vector<VertexId> retrieve_vertices(const VoxelMap& map, const Voxel& voxel) {
  std::vector<VertexId> ids(voxel.vertex_ids.begin(), voxel.vertex_ids.end());
  const double r = map.config().effective_dilation_radius();
  for (VertexId v : voxel.vertex_ids) map.knn().radius_ids(map.vertex(v).pos, r, ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<Projected2D> project_to_plane(const VoxelMap& map, std::span<const VertexId> ids,
                                          const PlaneStats& stats) {
  if (ids.size() < 3) throw DegenerateError("fewer than 3 vertices to project");
  const Vec3 q = stats.mean();
  const Vec3 u1 = stats.eigen().u1();
  const Vec3 u2 = stats.eigen().u2();
  std::vector<Projected2D> out;
  out.reserve(ids.size());
  for (VertexId id : ids) {
    const Vec3 d = map.vertex(id).pos - q;
    out.push_back({id, d.dot(u1), d.dot(u2)});
  }
  return out;
}

std::vector<std::array<int, 3>> delaunay_2d(std::span<const Projected2D> points) {
  std::vector<Vec2> xy;
  std::vector<VertexId> ids;
  xy.reserve(points.size());
  ids.reserve(points.size());
  for (const auto& p : points) {
    xy.emplace_back(p.phi, p.rho);
    ids.push_back(p.vertex_id);
  }
  return delaunay_2d(std::span<const Vec2>(xy), std::span<const VertexId>(ids));
}

bool nearly_collinear(std::span<const Projected2D> points, double tol) {
  if (points.size() < 3) return true;
  // Farthest pair via two sweeps: extreme point from the first, then extreme from that.
  auto farthest_from = [&](const Projected2D& o) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = std::hypot(points[i].phi - o.phi, points[i].rho - o.rho);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  const Projected2D& a = points[farthest_from(points[0])];
  const Projected2D& b = points[farthest_from(a)];
  const double dx = b.phi - a.phi;
  const double dy = b.rho - a.rho;
  const double len = std::hypot(dx, dy);
  if (len <= tol) return true;
  for (const auto& p : points) {
    const double dist = std::abs(dx * (p.rho - a.rho) - dy * (p.phi - a.phi)) / len;
    if (dist > tol) return false;
  }
  return true;
}

std::vector<TriangleFacet> lift_and_orient(std::span<const std::array<int, 3>> triples,
                                           std::span<const VertexId> ids, std::span<const Point3> positions,
                                           const Point3& sensor) {
  std::vector<TriangleFacet> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    std::array<std::pair<VertexId, int>, 3> v{{{ids[static_cast<std::size_t>(t[0])], t[0]},
                                               {ids[static_cast<std::size_t>(t[1])], t[1]},
                                               {ids[static_cast<std::size_t>(t[2])], t[2]}}};
    std::sort(v.begin(), v.end());
    if (v[0].first == v[1].first || v[1].first == v[2].first) continue;
    const Point3& pa = positions[static_cast<std::size_t>(v[0].second)];
    const Point3& pb = positions[static_cast<std::size_t>(v[1].second)];
    const Point3& pc = positions[static_cast<std::size_t>(v[2].second)];
    const Vec3 cross = (pb - pa).cross(pc - pa);
    const double norm = cross.norm();
    if (norm < 1e-12) continue;

    TriangleFacet f;
    f.key = FacetKey(v[0].first, v[1].first, v[2].first);
    f.center = (pa + pb + pc) / 3.0;
    f.normal = cross / norm;
    f.published_order = f.key.ids();
    if ((sensor - f.center).dot(f.normal) < 0.0) {
      f.normal = -f.normal;
      std::swap(f.published_order[0], f.published_order[1]);
    }
    out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const TriangleFacet& a, const TriangleFacet& b) { return a.key < b.key; });
  return out;
}

FacetKeySet mesh_pull(const VoxelMap& map, std::span<const VertexId> ids) {
  FacetKeySet out;
  auto member = [&](VertexId v) { return std::binary_search(ids.begin(), ids.end(), v); };
  for (VertexId v : ids) {
    for (const FacetKey& k : map.vertex(v).tri_list) {
      if (member(k[0]) && member(k[1]) && member(k[2])) out.insert(k);
    }
  }
  return out;
}

VoxelMeshDelta mesh_commit(std::span<const TriangleFacet> fresh, const FacetKeySet& pulled) {
  VoxelMeshDelta delta;
  FacetKeySet fresh_keys;
  for (const auto& f : fresh) {
    if (fresh_keys.insert(f.key).second && !pulled.contains(f.key)) delta.to_add.push_back(f);
  }
  for (const auto& k : pulled) {
    if (!fresh_keys.contains(k)) delta.to_erase.push_back(k);
  }
  std::sort(delta.to_add.begin(), delta.to_add.end(),
            [](const TriangleFacet& a, const TriangleFacet& b) { return a.key < b.key; });
  return delta;
}

void mesh_push(VoxelMap& map, const VoxelMeshDelta& delta) {
  std::lock_guard lock(map.facet_mutex());
  for (const auto& k : delta.to_erase) map.erase_facet(k);
  for (const auto& f : delta.to_add) map.add_facet(f);
}

VoxelMeshResult mesh_voxel(const VoxelMap& map, const GridKey& key, const Point3& sensor) {
  VoxelMeshResult r;
  r.voxel = key;
  const Voxel* voxel = map.find_voxel(key);
  if (voxel == nullptr) {
    r.skipped = true;
    return r;
  }
  r.retrieved = retrieve_vertices(map, *voxel);
  if (r.retrieved.size() < 3) {
    r.skipped = true;
    return r;
  }
  const std::vector<Projected2D> projected = project_to_plane(map, r.retrieved, voxel->stats);
  if (nearly_collinear(projected)) {
    r.skipped = true;
    return r;
  }
  std::vector<std::array<int, 3>> triples;
  try {
    triples = delaunay_2d(std::span<const Projected2D>(projected));
  } catch (const DegenerateError&) {
    r.skipped = true;
    return r;
  }
  std::vector<Point3> positions;
  positions.reserve(r.retrieved.size());
  for (VertexId id : r.retrieved) positions.push_back(map.vertex(id).pos);
  r.fresh = lift_and_orient(triples, r.retrieved, positions, sensor);
  r.delta = mesh_commit(r.fresh, mesh_pull(map, r.retrieved));
  return r;
}

MeshUpdateReport mesh_update(VoxelMap& map, std::span<const GridKey> voxels, const Point3& sensor,
                             const MeshUpdateOptions& options) {
  MeshUpdateReport report;
  std::vector<VoxelMeshResult> results(voxels.size());
  {
    const VoxelMap& frozen = map;
    auto body = [&] {
      tbb::parallel_for(std::size_t{0}, voxels.size(),
                        [&](std::size_t i) { results[i] = mesh_voxel(frozen, voxels[i], sensor); });
    };
    if (options.workers > 0) {
      tbb::task_arena arena(static_cast<int>(options.workers));
      arena.execute(body);
    } else {
      body();
    }
  }

  // Reduce in voxel order so the outcome is independent of scheduling.
  std::unordered_set<FacetKey, FacetKeyHasher> kept;
  for (const auto& r : results) {
    for (const auto& f : r.fresh) kept.insert(f.key);
  }
  VoxelMeshDelta merged;
  FacetKeySet erase_set;
  FacetKeySet add_seen;
  for (const auto& r : results) {
    for (const auto& k : r.delta.to_erase) {
      if (kept.contains(k)) {
        ++report.cancelled_erasures;
      } else {
        erase_set.insert(k);
      }
    }
    for (const auto& f : r.delta.to_add) {
      if (add_seen.insert(f.key).second) merged.to_add.push_back(f);
    }
  }
  merged.to_erase.assign(erase_set.begin(), erase_set.end());
  mesh_push(map, merged);

  for (const auto& r : results) {
    map.deactivate(r.voxel);
    ++report.processed;
    if (r.skipped) ++report.skipped;
  }
  report.added = merged.to_add.size();
  report.erased = merged.to_erase.size();
  if (options.keep_voxel_results) report.voxels = std::move(results);
  return report;
}

}  // namespace vmesh
