#include "vmesh/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "vmesh/errors.hpp"

namespace vmesh {
namespace {

double focal(int pixels, double fov_deg) {
  return (pixels / 2.0) / std::tan(fov_deg * std::numbers::pi / 360.0);
}

struct ScreenVertex {
  double x, y, inv_z;
};

// Keeps the part of a camera-frame polygon with z >= near.
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri, double near) {
  std::vector<Vec3> out;
  out.reserve(4);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3& a = tri[i];
    const Vec3& b = tri[(i + 1) % 3];
    const bool a_in = a.z() >= near;
    const bool b_in = b.z() >= near;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (near - a.z()) / (b.z() - a.z());
      Vec3 p = a + t * (b - a);
      p.z() = near;
      out.push_back(p);
    }
  }
  return out;
}

void raster_triangle(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c, const CameraModel& cam,
                     std::vector<double>& zbuf) {
  const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (!(std::abs(area) > 1e-12)) return;
  const double min_x = std::min({a.x, b.x, c.x});
  const double max_x = std::max({a.x, b.x, c.x});
  const double min_y = std::min({a.y, b.y, c.y});
  const double max_y = std::max({a.y, b.y, c.y});
  const int u0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  const int u1 = std::min(cam.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
  const int v0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  const int v1 = std::min(cam.height - 1, static_cast<int>(std::floor(max_y - 0.5)));
  // Slack so pixel centers on a shared edge are never dropped by both neighbours.
  const double slack = -1e-9;
  for (int v = v0; v <= v1; ++v) {
    const double py = v + 0.5;
    for (int u = u0; u <= u1; ++u) {
      const double px = u + 0.5;
      const double w0 = ((b.x - px) * (c.y - py) - (b.y - py) * (c.x - px)) / area;
      const double w1 = ((c.x - px) * (a.y - py) - (c.y - py) * (a.x - px)) / area;
      const double w2 = 1.0 - w0 - w1;
      if (w0 < slack || w1 < slack || w2 < slack) continue;
      const double inv_z = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
      if (!(inv_z > 0.0)) continue;
      const double z = 1.0 / inv_z;
      if (z > cam.far_plane) continue;
      double& slot = zbuf[static_cast<std::size_t>(v) * static_cast<std::size_t>(cam.width) + static_cast<std::size_t>(u)];
      if (z < slot) slot = z;
    }
  }
}

}  // namespace

double CameraModel::fx() const { return focal(width, hfov_deg); }
double CameraModel::fy() const { return focal(height, vfov_deg); }

void CameraModel::validate() const {
  if (width < 1 || height < 1) throw InputError("camera: width and height must be >= 1");
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0 && vfov_deg > 0.0 && vfov_deg < 180.0)) {
    throw InputError("camera: fields of view must lie in (0, 180) degrees");
  }
  if (!(near_plane > 0.0 && near_plane < far_plane)) throw InputError("camera: need 0 < near < far");
  if (!pose.is_valid()) throw InputError("camera: invalid pose");
}

std::size_t DepthImage::hit_count() const {
  return static_cast<std::size_t>(std::count_if(depth.begin(), depth.end(), [](float d) { return d > 0.0f; }));
}

DepthImage rasterize_depth(const TriMesh& mesh, const CameraModel& camera) {
  camera.validate();
  const std::size_t n = static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
  std::vector<double> zbuf(n, std::numeric_limits<double>::infinity());
  const Pose to_camera = camera.pose.inverse();
  const double fx = camera.fx(), fy = camera.fy(), cx = camera.cx(), cy = camera.cy();

  std::vector<Vec3> cam_pts;
  cam_pts.reserve(mesh.vertices.size());
  for (const auto& p : mesh.vertices) cam_pts.push_back(transform_point(to_camera, p));

  for (const auto& f : mesh.faces) {
    const std::array<Vec3, 3> tri{cam_pts.at(f[0]), cam_pts.at(f[1]), cam_pts.at(f[2])};
    const std::vector<Vec3> poly = clip_near(tri, camera.near_plane);
    if (poly.size() < 3) continue;
    std::vector<ScreenVertex> sv;
    sv.reserve(poly.size());
    for (const auto& p : poly) sv.push_back({fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy, 1.0 / p.z()});
    for (std::size_t k = 1; k + 1 < sv.size(); ++k) raster_triangle(sv[0], sv[k], sv[k + 1], camera, zbuf);
  }

  DepthImage image;
  image.camera = camera;
  image.depth.resize(n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(zbuf[i])) image.depth[i] = static_cast<float>(zbuf[i]);
  }
  return image;
}

std::vector<Point3> reinforce_points(const DepthImage& image) {
  const CameraModel& cam = image.camera;
  const double fx = cam.fx(), fy = cam.fy(), cx = cam.cx(), cy = cam.cy();
  std::vector<Point3> out;
  out.reserve(image.hit_count());
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const double d = image.at(u, v);
      if (!(d > 0.0)) continue;
      const Vec3 p((u + 0.5 - cx) / fx * d, (v + 0.5 - cy) / fy * d, d);
      out.push_back(transform_point(cam.pose, p));
    }
  }
  return out;
}

void write_depth_image(const DepthImage& image, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError(path.string() + ": cannot open for writing");
  const CameraModel& c = image.camera;
  const Eigen::Quaterniond q = c.pose.quaternion();
  const Vec3& t = c.pose.translation;
  os.precision(17);
  os << "PF32D\n"
     << "# nohit 0\n"
     << "# camera " << c.hfov_deg << ' ' << c.vfov_deg << ' ' << c.near_plane << ' ' << c.far_plane << '\n'
     << "# pose " << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' '
     << q.w() << '\n'
     << c.width << ' ' << c.height << '\n';
  os.write(reinterpret_cast<const char*>(image.depth.data()),
           static_cast<std::streamsize>(image.depth.size() * sizeof(float)));
  if (!os) throw InputError(path.string() + ": write failed");
}

DepthImage read_depth_image(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError(path.string() + ": cannot open for reading");
  auto fail = [&](const std::string& what) { return InputError(path.string() + ": " + what); };
  std::string line;
  if (!std::getline(is, line) || line != "PF32D") throw fail("missing PF32D magic");
  DepthImage image;
  CameraModel& c = image.camera;
  bool have_size = false;
  while (!have_size && std::getline(is, line)) {
    std::istringstream ls(line);
    if (line.rfind('#', 0) == 0) {
      std::string hash, tag;
      ls >> hash >> tag;
      if (tag == "camera") {
        ls >> c.hfov_deg >> c.vfov_deg >> c.near_plane >> c.far_plane;
      } else if (tag == "pose") {
        Vec3 t;
        Eigen::Quaterniond q;
        ls >> t.x() >> t.y() >> t.z() >> q.x() >> q.y() >> q.z() >> q.w();
        if (ls) c.pose = Pose::from_quaternion(q.normalized(), t);
      }
      if (!ls) throw fail("malformed header line '" + line + "'");
    } else {
      ls >> c.width >> c.height;
      if (!ls || c.width < 1 || c.height < 1) throw fail("malformed size line '" + line + "'");
      have_size = true;
    }
  }
  if (!have_size) throw fail("missing size line");
  image.depth.resize(static_cast<std::size_t>(c.width) * static_cast<std::size_t>(c.height));
  is.read(reinterpret_cast<char*>(image.depth.data()), static_cast<std::streamsize>(image.depth.size() * sizeof(float)));
  if (!is) throw fail("truncated depth payload");
  return image;
}

}  // namespace vmesh
