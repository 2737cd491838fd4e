#include "vmesh/synth_scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vmesh/errors.hpp"

namespace vmesh {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

// Coordinates (s, t) of w in the basis (u, v), assuming w lies in their plane.
Vec2 plane_coords(const Vec3& w, const Vec3& u, const Vec3& v) {
  const double uu = u.dot(u), uv = u.dot(v), vv = v.dot(v);
  const double wu = w.dot(u), wv = w.dot(v);
  const double det = uu * vv - uv * uv;
  return {(wu * vv - wv * uv) / det, (wv * uu - wu * uv) / det};
}

constexpr double kParamSlack = 1e-12;

std::optional<double> intersect_parallelogram(const Point3& origin, const Vec3& u, const Vec3& v, bool triangle,
                                              const Point3& o, const Vec3& d) {
  const Vec3 n = u.cross(v);
  const double denom = d.dot(n);
  if (std::abs(denom) <= 1e-15 * d.norm() * n.norm()) return std::nullopt;
  const double t = (origin - o).dot(n) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Vec2 st = plane_coords(o + t * d - origin, u, v);
  if (st.x() < -kParamSlack || st.y() < -kParamSlack) return std::nullopt;
  if (triangle ? st.x() + st.y() > 1.0 + kParamSlack : (st.x() > 1.0 + kParamSlack || st.y() > 1.0 + kParamSlack)) {
    return std::nullopt;
  }
  return t;
}

double parallelogram_distance(const Point3& origin, const Vec3& u, const Vec3& v, bool triangle, const Point3& p) {
  const Vec3 n = u.cross(v).normalized();
  const Vec3 w = p - origin;
  const Vec2 st = plane_coords(w - w.dot(n) * n, u, v);
  const bool inside = triangle ? (st.x() >= 0.0 && st.y() >= 0.0 && st.x() + st.y() <= 1.0)
                               : (st.x() >= 0.0 && st.y() >= 0.0 && st.x() <= 1.0 && st.y() <= 1.0);
  if (inside) return std::abs(w.dot(n));
  const Point3 a = origin, b = origin + u, c = origin + v;
  if (triangle) return std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
  const Point3 e = origin + u + v;
  return std::min({segment_distance(p, a, b), segment_distance(p, b, e), segment_distance(p, e, c),
                   segment_distance(p, c, a)});
}

// A sampled surface patch and the sides from which it may be exposed.
struct Patch {
  Point3 origin;
  Vec3 u, v;
  bool triangle = false;
  bool two_sided = true;
};

std::vector<Patch> patches_of(const Primitive& prim) {
  return std::visit(
      overloaded{
          [](const Box& b) {
            const Vec3 ext = b.max - b.min;
            const Vec3 ex(ext.x(), 0, 0), ey(0, ext.y(), 0), ez(0, 0, ext.z());
            // Each face ordered so u x v is the outward normal.
            return std::vector<Patch>{
                {b.min, ey, ex, false, false},       {b.min + ez, ex, ey, false, false},
                {b.min, ex, ez, false, false},       {b.min + ey, ez, ex, false, false},
                {b.min, ez, ey, false, false},       {b.min + ex, ey, ez, false, false},
            };
          },
          [](const Quad& q) { return std::vector<Patch>{{q.origin, q.u, q.v, false, true}}; },
          [](const Triangle& t) { return std::vector<Patch>{{t.a, t.b - t.a, t.c - t.a, true, true}}; },
      },
      prim);
}

bool open_space(const Scene& scene, const Point3& q) {
  for (int i = 0; i < 3; ++i) {
    if (q[i] < scene.bounds_min[i] || q[i] > scene.bounds_max[i]) return false;
  }
  for (const auto& prim : scene.primitives) {
    if (const Box* b = std::get_if<Box>(&prim)) {
      if ((q.array() > b->min.array()).all() && (q.array() < b->max.array()).all()) return false;
    }
  }
  return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Standard normal deviate keyed by (seed, scan, pixel).
double keyed_gaussian(std::uint64_t seed, std::uint64_t scan, std::uint64_t pixel) {
  const std::uint64_t h1 = splitmix64(seed ^ splitmix64(scan ^ splitmix64(pixel)));
  const std::uint64_t h2 = splitmix64(h1);
  const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::optional<double> intersect(const Primitive& prim, const Point3& o, const Vec3& d) {
  return std::visit(
      overloaded{
          [&](const Box& b) -> std::optional<double> {
            double t0 = -std::numeric_limits<double>::infinity();
            double t1 = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 3; ++i) {
              if (d[i] == 0.0) {
                if (o[i] < b.min[i] || o[i] > b.max[i]) return std::nullopt;
                continue;
              }
              double ta = (b.min[i] - o[i]) / d[i];
              double tb = (b.max[i] - o[i]) / d[i];
              if (ta > tb) std::swap(ta, tb);
              t0 = std::max(t0, ta);
              t1 = std::min(t1, tb);
            }
            if (t1 < t0) return std::nullopt;
            if (t0 > 0.0) return t0;
            if (t1 > 0.0) return t1;
            return std::nullopt;
          },
          [&](const Quad& q) { return intersect_parallelogram(q.origin, q.u, q.v, false, o, d); },
          [&](const Triangle& t) { return intersect_parallelogram(t.a, t.b - t.a, t.c - t.a, true, o, d); },
      },
      prim);
}

double surface_distance(const Primitive& prim, const Point3& p) {
  return std::visit(overloaded{
                        [&](const Box& b) {
                          const Vec3 below = (b.min - p).cwiseMax(0.0);
                          const Vec3 above = (p - b.max).cwiseMax(0.0);
                          const Vec3 outside = below + above;
                          if (outside.squaredNorm() > 0.0) return outside.norm();
                          return std::min((p - b.min).minCoeff(), (b.max - p).minCoeff());
                        },
                        [&](const Quad& q) { return parallelogram_distance(q.origin, q.u, q.v, false, p); },
                        [&](const Triangle& t) { return parallelogram_distance(t.a, t.b - t.a, t.c - t.a, true, p); },
                    },
                    prim);
}

std::optional<double> Scene::cast(const Point3& origin, const Vec3& dir) const {
  std::optional<double> best;
  for (const auto& prim : primitives) {
    if (const auto t = intersect(prim, origin, dir); t && (!best || *t < *best)) best = t;
  }
  return best;
}

double Scene::distance(const Point3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& prim : primitives) best = std::min(best, surface_distance(prim, p));
  return best;
}

Scene box_town() {
  Scene s;
  s.name = "box_town";
  s.bounds_min = Point3(0, 0, 0);
  s.bounds_max = Point3(20, 10, 8);
  s.primitives.push_back(Quad{Point3(0, 0, 0), Vec3(20, 0, 0), Vec3(0, 10, 0)});
  s.primitives.push_back(Box{Point3(2, 2, 0), Point3(6, 5, 3)});
  s.primitives.push_back(Box{Point3(9, 5.5, 0), Point3(13, 8.5, 5)});
  s.primitives.push_back(Box{Point3(15, 1.5, 0), Point3(18, 4, 2)});
  return s;
}

Scene plane_only() {
  Scene s;
  s.name = "plane_only";
  s.bounds_min = Point3(-6, -6, 0);
  s.bounds_max = Point3(6, 6, 6);
  s.primitives.push_back(Quad{Point3(-6, -6, 0), Vec3(12, 0, 0), Vec3(0, 12, 0)});
  return s;
}

namespace {

CameraModel make_camera(int w, int h, double hfov, const Point3& eye, const Point3& target) {
  CameraModel c;
  c.width = w;
  c.height = h;
  c.hfov_deg = hfov;
  c.vfov_deg = 2.0 * std::atan(std::tan(hfov * std::numbers::pi / 360.0) * h / w) * 180.0 / std::numbers::pi;
  c.pose = Pose::look_at(eye, target);
  return c;
}

}  // namespace

ScanScript box_town_script(int width, int height) {
  ScanScript s;
  const std::pair<Point3, Point3> views[] = {
      {{0.5, 0.5, 7.5}, {7, 4.5, 0}},   {{10, 0.3, 7.5}, {10, 5, 0}},  {{19.5, 0.5, 7.5}, {13, 4.5, 0}},
      {{19.7, 5, 7.5}, {12, 5, 0}},     {{19.5, 9.5, 7.5}, {13, 5.5, 0}}, {{10, 9.7, 7.5}, {10, 5, 0}},
      {{0.5, 9.5, 7.5}, {7, 5.5, 0}},   {{0.3, 5, 7.5}, {8, 5, 0}},
  };
  for (const auto& [eye, target] : views) s.cameras.push_back(make_camera(width, height, 90.0, eye, target));
  return s;
}

ScanScript plane_only_script(int width, int height) {
  ScanScript s;
  const std::pair<Point3, Point3> views[] = {
      {{-3, 0, 4}, {1, 0, 0}}, {{3, 0, 4}, {-1, 0, 0}}, {{0, -3, 4}, {0, 1, 0}}, {{0, 3, 4}, {0, -1, 0}}};
  for (const auto& [eye, target] : views) s.cameras.push_back(make_camera(width, height, 90.0, eye, target));
  return s;
}

ScanFrame render_scan(const Scene& scene, const CameraModel& camera, double sigma, std::uint64_t seed,
                      std::uint64_t scan_index) {
  camera.validate();
  if (sigma < 0.0) throw InputError("render_scan: sigma must be >= 0");
  ScanFrame frame;
  frame.pose = camera.pose;
  frame.timestamp = static_cast<double>(scan_index) * 0.1;
  const double fx = camera.fx(), fy = camera.fy(), cx = camera.cx(), cy = camera.cy();
  const Point3& eye = camera.pose.translation;
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Vec3 ray((u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0);
      const auto t = scene.cast(eye, camera.pose.rotation * ray);
      if (!t || *t > camera.far_plane) continue;
      double scale = *t;
      if (sigma > 0.0) {
        const std::uint64_t pixel = static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(camera.width) +
                                    static_cast<std::uint64_t>(u);
        scale += sigma * keyed_gaussian(seed, scan_index, pixel) / ray.norm();
      }
      frame.points.push_back(scale * ray);
    }
  }
  return frame;
}

std::vector<Point3> ground_truth_points(const Scene& scene, double resolution) {
  if (!(resolution > 0.0)) throw InputError("ground_truth_points: resolution must be positive");
  constexpr double kProbe = 1e-4;
  std::vector<Point3> out;
  for (const auto& prim : scene.primitives) {
    for (const Patch& patch : patches_of(prim)) {
      const Vec3 n = patch.u.cross(patch.v).normalized();
      const auto nu = std::max<long>(1, std::lround(patch.u.norm() / resolution));
      const auto nv = std::max<long>(1, std::lround(patch.v.norm() / resolution));
      for (long i = 0; i < nu; ++i) {
        const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(nu);
        for (long j = 0; j < nv; ++j) {
          const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(nv);
          if (patch.triangle && s + t >= 1.0) continue;
          const Point3 p = patch.origin + s * patch.u + t * patch.v;
          const bool exposed = open_space(scene, p + kProbe * n) || (patch.two_sided && open_space(scene, p - kProbe * n));
          if (exposed) out.push_back(p);
        }
      }
    }
  }
  return out;
}

}  // namespace vmesh
