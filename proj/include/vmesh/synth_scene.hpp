#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/raster.hpp"
#include "vmesh/voxel_map.hpp"

namespace vmesh {

/// Solid axis-aligned box; its six faces are surface.
struct Box {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Ones();
};

/// Two-sided parallelogram origin + s*u + t*v with s, t in [0, 1].
struct Quad {
  Point3 origin = Point3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
};

/// Two-sided triangle.
struct Triangle {
  Point3 a = Point3::Zero();
  Point3 b = Point3::UnitX();
  Point3 c = Point3::UnitY();
};

using Primitive = std::variant<Box, Quad, Triangle>;

/// Smallest ray parameter t > 0 with origin + t * dir on the primitive's surface.
std::optional<double> intersect(const Primitive& prim, const Point3& origin, const Vec3& dir);
/// Euclidean distance from p to the primitive's surface.
double surface_distance(const Primitive& prim, const Point3& p);

struct Scene {
  std::string name = "scene";
  std::vector<Primitive> primitives;
  Point3 bounds_min = Point3::Zero();
  Point3 bounds_max = Point3::Zero();

  std::optional<double> cast(const Point3& origin, const Vec3& dir) const;
  double distance(const Point3& p) const;
};

/// Cameras to render, with shared depth noise.
struct ScanScript {
  std::vector<CameraModel> cameras;
  double sigma = 0.0;  ///< Gaussian range noise (m)
  std::uint64_t seed = 1;
};

/// 20 x 10 x 8 m: ground plane and three boxes.
Scene box_town();
/// 12 x 12 m ground plane.
Scene plane_only();
/// Elevated cameras around the box-town block, all looking inward and down.
ScanScript box_town_script(int width = 640, int height = 480);
/// Cameras above the plane looking down at it.
ScanScript plane_only_script(int width = 320, int height = 240);

/// Ray-casts one camera. Points are in the camera (sensor) frame and the frame
/// carries the camera pose. Noise, when sigma > 0, displaces each point along
/// its ray and is keyed by (seed, scan_index, pixel).
ScanFrame render_scan(const Scene& scene, const CameraModel& camera, double sigma = 0.0, std::uint64_t seed = 1,
                      std::uint64_t scan_index = 0);

/// Cell-center sampling of every primitive surface at `resolution`, keeping
/// only points with a side facing open space inside the scene bounds (not
/// buried in a box or below the bounds).
std::vector<Point3> ground_truth_points(const Scene& scene, double resolution);

/// Plain-text scene description; see README for the grammar. Throws InputError with the line number.
Scene parse_scene(std::istream& is);
void write_scene(const Scene& scene, std::ostream& os);
ScanScript parse_scan_script(std::istream& is);
void write_scan_script(const ScanScript& script, std::ostream& os);

}  // namespace vmesh
