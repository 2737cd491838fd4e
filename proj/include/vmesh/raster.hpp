#pragma once

#include <filesystem>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/mesh_io.hpp"

namespace vmesh {

/// Pinhole camera. The pose maps camera to world; in the camera frame x points
/// right, y down and z forward (see Pose::look_at).
struct CameraModel {
  int width = 640;
  int height = 480;
  double hfov_deg = 90.0;
  double vfov_deg = 67.5;
  double near_plane = 0.05;
  double far_plane = 1000.0;
  Pose pose;

  double fx() const;
  double fy() const;
  double cx() const { return width / 2.0; }
  double cy() const { return height / 2.0; }
  /// Throws InputError unless 0 < fov < 180, sizes >= 1 and 0 < near < far.
  void validate() const;
};

/// Planar depth (camera z) per pixel, row-major; 0 marks pixels without a hit.
struct DepthImage {
  CameraModel camera;
  std::vector<float> depth;

  float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * static_cast<std::size_t>(camera.width) + static_cast<std::size_t>(u)]; }
  std::size_t hit_count() const;
};

/// Z-buffered software rasterization sampled at pixel centers, with
/// near-plane clipping, perspective-correct depth and no back-face culling.
DepthImage rasterize_depth(const TriMesh& mesh, const CameraModel& camera);

/// One world-frame point per hit pixel.
std::vector<Point3> reinforce_points(const DepthImage& image);

/// Text header (magic, no-hit value, camera and pose) followed by width x height
/// little-endian float32 values in row-major order.
void write_depth_image(const DepthImage& image, const std::filesystem::path& path);
DepthImage read_depth_image(const std::filesystem::path& path);

}  // namespace vmesh
