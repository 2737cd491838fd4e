#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vmesh/broadcaster.hpp"
#include "vmesh/mesher.hpp"
#include "vmesh/voxel_map.hpp"

namespace vmesh {

struct RunConfig {
  std::string preset = "solid_state";  ///< mechanical, solid_state or custom
  MapConfig map = MapConfig::solid_state();
  std::size_t workers = 0;          ///< 0 uses the default thread count
  std::size_t export_every = 0;     ///< export cadence in frames; 0 exports only at the end
  std::uint64_t seed = 1;
  bool check_integrity = false;     ///< full sweep after every frame
  bool background_sync = false;     ///< run the broadcaster on its own thread

  /// Applies "key = value" settings. `preset` is applied first, then the
  /// individual map fields. Throws InputError on unknown keys or bad values.
  void apply(const std::map<std::string, std::string>& settings);
};

struct FrameStats {
  double registration_ms = 0.0;
  double meshing_ms = 0.0;
  std::size_t appended = 0;
  std::size_t activated_voxels = 0;
  std::size_t vertex_count = 0;
  std::size_t facet_count = 0;
};

struct RunReport {
  std::vector<FrameStats> frames;
  std::size_t vertex_count = 0;
  std::size_t facet_count = 0;

  double mean_meshing_ms() const;
  double stddev_meshing_ms() const;
  double mean_registration_ms() const;
  std::string to_json() const;
};

/// Register-then-mesh driver over a sequence of frames.
class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config);
  ~Pipeline();

  /// Registers and meshes one frame. Throws IntegrityError when checking is on and the sweep fails.
  FrameStats process(const ScanFrame& frame);

  VoxelMap& map() { return map_; }
  const VoxelMap& map() const { return map_; }
  Broadcaster& broadcaster() { return broadcaster_; }
  /// Syncs and returns the current snapshot.
  MeshSnapshot snapshot() { return broadcaster_.sync_snapshot(); }
  const RunReport& report() const { return report_; }

  /// Called after frames whose 1-based index is a multiple of export_every.
  std::function<void(std::size_t frame_index, const MeshSnapshot&)> on_export;

 private:
  RunConfig config_;
  VoxelMap map_;
  Broadcaster broadcaster_;
  RunReport report_;
};

/// Runs every frame through a fresh pipeline and returns its report.
RunReport run_pipeline(const RunConfig& config, std::span<const ScanFrame> frames);

}  // namespace vmesh
