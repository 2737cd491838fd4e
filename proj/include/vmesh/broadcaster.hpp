#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "vmesh/voxel_map.hpp"

namespace vmesh {

/// Self-contained copy of the published mesh.
struct MeshSnapshot {
  struct Face {
    std::array<std::uint32_t, 3> indices{};  ///< into `vertices`, in published winding
    Vec3 normal = Vec3::UnitZ();
  };
  std::vector<std::pair<VertexId, Point3>> vertices;  ///< referenced vertices, sorted by id
  std::vector<Face> faces;                            ///< region order, then facet key order
  std::uint64_t frame_counter = 0;
};

/// Keeps a per-region copy of the map's facets and refreshes only regions
/// flagged SyncRequired. Copying holds the map's facet mutex, so it never
/// overlaps a push or a registration.
class Broadcaster {
 public:
  explicit Broadcaster(VoxelMap& map) : map_(map) {}
  ~Broadcaster() { stop(); }
  Broadcaster(const Broadcaster&) = delete;
  Broadcaster& operator=(const Broadcaster&) = delete;

  /// Copies every SyncRequired region and marks it Synced. Returns the number of regions copied.
  std::size_t sync();
  /// Snapshot of the current copies; advances the frame counter.
  MeshSnapshot snapshot();
  MeshSnapshot sync_snapshot() {
    sync();
    return snapshot();
  }

  /// Runs sync() every `period` on a background thread until stop().
  void start(std::chrono::milliseconds period);
  void stop();
  bool running() const { return worker_.joinable(); }

 private:
  struct CopiedFacet {
    std::array<VertexId, 3> order;
    std::array<Point3, 3> pos;
    Vec3 normal;
  };

  VoxelMap& map_;
  std::mutex copy_mutex_;  // guards copies_ and frame_counter_
  std::map<GridKey, std::vector<CopiedFacet>> copies_;
  std::uint64_t frame_counter_ = 0;

  std::thread worker_;
  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stop_requested_ = false;
};

}  // namespace vmesh
