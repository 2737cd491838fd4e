#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/spatial_hash.hpp"
#include "vmesh/voxel_map.hpp"

namespace vmesh {

/// A vertex expressed in a voxel's plane basis: phi along u1, rho along u2, origin at the voxel mean.
struct Projected2D {
  VertexId vertex_id = 0;
  double phi = 0.0;
  double rho = 0.0;
};

using FacetKeySet = std::set<FacetKey>;

struct VoxelMeshDelta {
  std::vector<TriangleFacet> to_add;  ///< sorted by key
  std::vector<FacetKey> to_erase;     ///< sorted
};

/// In-voxel vertex ids plus every vertex within the dilation radius of one of
/// them. Sorted and unique.
std::vector<VertexId> retrieve_vertices(const VoxelMap& map, const Voxel& voxel);

/// Projects the vertices onto the plane through stats.mean() spanned by u1, u2.
/// Throws DegenerateError for fewer than 3 vertices.
std::vector<Projected2D> project_to_plane(const VoxelMap& map, std::span<const VertexId> ids,
                                          const PlaneStats& stats);

/// Delaunay triangulation of projected vertices; cocircular ties use the global vertex ids.
std::vector<std::array<int, 3>> delaunay_2d(std::span<const Projected2D> points);

/// True when every point lies within `tol` of the line through the two points farthest apart.
bool nearly_collinear(std::span<const Projected2D> points, double tol = 1e-9);

/// Turns index triples (into `ids` / `positions`) into 3D facets whose normal
/// faces `sensor`. Triangles with a cross-product norm below 1e-12 are dropped.
/// Output is sorted by key.
std::vector<TriangleFacet> lift_and_orient(std::span<const std::array<int, 3>> triples,
                                           std::span<const VertexId> ids, std::span<const Point3> positions,
                                           const Point3& sensor);

/// Stored facets whose three vertices all belong to `ids` (which must be sorted).
FacetKeySet mesh_pull(const VoxelMap& map, std::span<const VertexId> ids);

VoxelMeshDelta mesh_commit(std::span<const TriangleFacet> fresh, const FacetKeySet& pulled);

/// Applies erasures, then additions. Throws IntegrityError when erasing a
/// missing facet or adding an existing one.
void mesh_push(VoxelMap& map, const VoxelMeshDelta& delta);

/// Result of triangulating one voxel against the current map, without mutation.
struct VoxelMeshResult {
  GridKey voxel;
  bool skipped = false;             ///< fewer than 3 vertices or collinear projection
  std::vector<VertexId> retrieved;  ///< sorted
  std::vector<TriangleFacet> fresh; ///< sorted by key
  VoxelMeshDelta delta;
};

/// Read-only per-voxel step: retrieve, project, triangulate, lift, pull, commit.
VoxelMeshResult mesh_voxel(const VoxelMap& map, const GridKey& voxel, const Point3& sensor);

struct MeshUpdateOptions {
  std::size_t workers = 0;         ///< 0 uses the default thread count
  bool keep_voxel_results = false; ///< retain per-voxel results in the report
};

struct MeshUpdateReport {
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::size_t added = 0;
  std::size_t erased = 0;
  std::size_t cancelled_erasures = 0;  ///< erasures dropped because another voxel kept the facet
  std::vector<VoxelMeshResult> voxels;  ///< filled when keep_voxel_results is set
};

/// One meshing pass over `voxels`: the per-voxel steps run in parallel on a
/// frozen map, then all erasures and additions are pushed serially and every
/// processed voxel is deactivated. A facet erased by one voxel but produced by
/// another in the same pass is kept. The result does not depend on `workers`.
MeshUpdateReport mesh_update(VoxelMap& map, std::span<const GridKey> voxels, const Point3& sensor,
                             const MeshUpdateOptions& options = {});

}  // namespace vmesh
