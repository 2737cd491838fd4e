#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/knn_store.hpp"
#include "vmesh/spatial_hash.hpp"

namespace vmesh {

/// One timestamped point-cloud frame. Points are in the sensor frame and
/// already motion-compensated; `pose` maps sensor to world.
struct ScanFrame {
  double timestamp = 0.0;
  std::vector<Point3> points;
  Pose pose;
};

struct MapConfig {
  double xi = 0.10;               ///< minimum spacing between mesh vertices (m)
  double region_size = 10.0;      ///< S_R (m)
  double voxel_size = 0.40;       ///< S_O (m)
  double dilation_radius = 0.0;   ///< d_r (m); 0 selects voxel_size / 4
  double downsample_leaf = 0.0;   ///< pre-append voxel-grid leaf (m); 0 selects xi / 1.5

  static MapConfig mechanical();
  static MapConfig solid_state();

  double effective_dilation_radius() const { return dilation_radius > 0.0 ? dilation_radius : voxel_size / 4.0; }
  double effective_downsample_leaf() const { return downsample_leaf > 0.0 ? downsample_leaf : xi / 1.5; }
  /// Throws InputError unless 0 < xi < voxel_size < region_size.
  void validate() const;
};

enum class VoxelFlag : std::uint8_t { Deactivated, Activated };
enum class SyncFlag : std::uint8_t { Synced, SyncRequired };

struct MeshVertex {
  VertexId id = 0;
  Point3 pos = Point3::Zero();
  std::vector<FacetKey> tri_list;  ///< facets incident on this vertex (set semantics)
};

struct TriangleFacet {
  FacetKey key;
  Point3 center = Point3::Zero();
  Vec3 normal = Vec3::UnitZ();
  /// Winding used when publishing: key order, or the first two swapped when the
  /// normal was flipped toward the sensor.
  std::array<VertexId, 3> published_order{0, 1, 2};

  bool flipped() const { return published_order[0] != key[0]; }
};

struct Voxel {
  GridKey key;
  std::vector<VertexId> vertex_ids;
  PlaneStats stats;
  VoxelFlag flag = VoxelFlag::Deactivated;
};

struct Region {
  GridKey key;
  std::unordered_set<FacetKey, FacetKeyHasher> facets;
  SyncFlag sync = SyncFlag::Synced;
};

struct RegistrationReport {
  std::vector<VertexId> appended_vertex_ids;
  std::vector<GridKey> activated_voxel_keys;  ///< distinct, in first-activation order
  std::size_t discarded_count = 0;            ///< rejected by the minimum-spacing filter
  std::size_t nonfinite_count = 0;            ///< non-finite input points
  std::size_t downsampled_count = 0;          ///< points left after the voxel-grid filter
};

/// Regions (facets + sync flags), voxels (vertices + plane statistics), the
/// global vertex list, the facet table and the vertex kNN store.
///
/// Single writer: register_scan, append_vertex, add_facet, erase_facet and
/// flag writes must not run concurrently with anything else. Const accessors
/// may be shared by any number of readers.
class VoxelMap {
 public:
  using VoxelTable = SpatialHashTable<GridKey, Voxel, GridKeyHasher>;
  using RegionTable = SpatialHashTable<GridKey, Region, GridKeyHasher>;
  using FacetTable = SpatialHashTable<FacetKey, TriangleFacet, FacetKeyHasher>;

  explicit VoxelMap(MapConfig config);

  const MapConfig& config() const { return config_; }

  /// Registers a frame: world transform, voxel-grid downsample, minimum-spacing
  /// filter, vertex append and voxel activation. Throws InputError on an invalid pose.
  RegistrationReport register_scan(const ScanFrame& frame);

  /// Appends one mesh vertex unconditionally (no spacing filter) and activates its voxel.
  VertexId append_vertex(const Point3& p);

  Voxel& get_or_create_voxel(const Point3& p);
  Region& get_or_create_region(const Point3& p);
  GridKey voxel_key(const Point3& p) const { return grid_key(p, config_.voxel_size); }
  GridKey region_key(const Point3& p) const { return grid_key(p, config_.region_size); }

  const Voxel* find_voxel(const GridKey& key) const { return voxels_.find(key); }
  const Region* find_region(const GridKey& key) const { return regions_.find(key); }
  Region* find_region(const GridKey& key) { return regions_.find(key); }
  const TriangleFacet* find_facet(const FacetKey& key) const { return facets_.find(key); }

  const std::vector<MeshVertex>& vertices() const { return vertices_; }
  const MeshVertex& vertex(VertexId id) const { return vertices_.at(id); }
  const VoxelTable& voxels() const { return voxels_; }
  const RegionTable& regions() const { return regions_; }
  RegionTable& regions() { return regions_; }
  const FacetTable& facets() const { return facets_; }
  const KnnStore& knn() const { return knn_; }

  /// Activated voxels in key order.
  std::vector<GridKey> activated_voxels() const { return {activated_.begin(), activated_.end()}; }
  void deactivate(const GridKey& key);

  /// Inserts the facet into the facet table, its center's region and the
  /// tri_lists of its three vertices. Throws IntegrityError if already present
  /// or if a vertex id is unknown.
  void add_facet(const TriangleFacet& facet);
  /// Inverse of add_facet. Throws IntegrityError if the facet does not exist.
  void erase_facet(const FacetKey& key);

  /// Guards vertex, facet and region mutation against the broadcaster's
  /// background copy. register_scan and append_vertex take it internally;
  /// add_facet and erase_facet expect the caller to hold it when a copy may run.
  std::mutex& facet_mutex() const { return facet_mutex_; }

 private:
  Voxel& append_vertex_impl(const Point3& p, VertexId& id);

  MapConfig config_;
  std::vector<MeshVertex> vertices_;
  VoxelTable voxels_;
  RegionTable regions_;
  FacetTable facets_;
  KnnStore knn_;
  std::set<GridKey> activated_;
  mutable std::mutex facet_mutex_;
};

/// Voxel-grid filter: one centroid per occupied cell of side `leaf`, emitted in
/// order of each cell's first point.
std::vector<Point3> downsample_grid(std::span<const Point3> points, double leaf);

}  // namespace vmesh
