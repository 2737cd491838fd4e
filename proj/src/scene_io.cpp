#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vmesh/errors.hpp"
#include "vmesh/synth_scene.hpp"

namespace vmesh {
namespace {

// Splits a stream into (line number, keyword, remaining fields), skipping blanks and comments.
template <typename Fn>
void for_each_statement(std::istream& is, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    fn(line_no, keyword, ls);
  }
}

InputError bad_line(int line_no, const std::string& what) {
  return InputError("line " + std::to_string(line_no) + ": " + what);
}

Vec3 read_vec(std::istream& ls, int line_no, const std::string& keyword) {
  Vec3 v;
  if (!(ls >> v.x() >> v.y() >> v.z())) throw bad_line(line_no, "'" + keyword + "' expects 3 numbers per vector");
  return v;
}

void expect_end(std::istream& ls, int line_no) {
  std::string extra;
  if (ls >> extra) throw bad_line(line_no, "unexpected trailing token '" + extra + "'");
}

void write_vec(std::ostream& os, const Vec3& v) { os << ' ' << v.x() << ' ' << v.y() << ' ' << v.z(); }

}  // namespace

Scene parse_scene(std::istream& is) {
  Scene scene;
  bool have_bounds = false;
  for_each_statement(is, [&](int line_no, const std::string& kw, std::istream& ls) {
    if (kw == "scene") {
      if (!(ls >> scene.name)) throw bad_line(line_no, "'scene' expects a name");
    } else if (kw == "bounds") {
      scene.bounds_min = read_vec(ls, line_no, kw);
      scene.bounds_max = read_vec(ls, line_no, kw);
      if (!(scene.bounds_min.array() < scene.bounds_max.array()).all()) throw bad_line(line_no, "empty bounds");
      have_bounds = true;
    } else if (kw == "box") {
      Box b{read_vec(ls, line_no, kw), read_vec(ls, line_no, kw)};
      if (!(b.min.array() < b.max.array()).all()) throw bad_line(line_no, "box min must be below max");
      scene.primitives.push_back(b);
    } else if (kw == "quad") {
      Quad q{read_vec(ls, line_no, kw), read_vec(ls, line_no, kw), read_vec(ls, line_no, kw)};
      if (q.u.cross(q.v).norm() == 0.0) throw bad_line(line_no, "degenerate quad");
      scene.primitives.push_back(q);
    } else if (kw == "triangle") {
      Triangle t{read_vec(ls, line_no, kw), read_vec(ls, line_no, kw), read_vec(ls, line_no, kw)};
      if ((t.b - t.a).cross(t.c - t.a).norm() == 0.0) throw bad_line(line_no, "degenerate triangle");
      scene.primitives.push_back(t);
    } else {
      throw bad_line(line_no, "unknown keyword '" + kw + "'");
    }
    expect_end(ls, line_no);
  });
  if (!have_bounds) throw InputError("scene: missing 'bounds' line");
  return scene;
}

void write_scene(const Scene& scene, std::ostream& os) {
  os.precision(17);
  os << "scene " << scene.name << "\nbounds";
  write_vec(os, scene.bounds_min);
  write_vec(os, scene.bounds_max);
  os << '\n';
  for (const auto& prim : scene.primitives) {
    if (const Box* b = std::get_if<Box>(&prim)) {
      os << "box";
      write_vec(os, b->min);
      write_vec(os, b->max);
    } else if (const Quad* q = std::get_if<Quad>(&prim)) {
      os << "quad";
      write_vec(os, q->origin);
      write_vec(os, q->u);
      write_vec(os, q->v);
    } else if (const Triangle* t = std::get_if<Triangle>(&prim)) {
      os << "triangle";
      write_vec(os, t->a);
      write_vec(os, t->b);
      write_vec(os, t->c);
    }
    os << '\n';
  }
}

ScanScript parse_scan_script(std::istream& is) {
  ScanScript script;
  CameraModel current;  // intrinsics apply to every later pose
  for_each_statement(is, [&](int line_no, const std::string& kw, std::istream& ls) {
    if (kw == "resolution") {
      if (!(ls >> current.width >> current.height)) throw bad_line(line_no, "'resolution' expects W H");
    } else if (kw == "fov") {
      if (!(ls >> current.hfov_deg >> current.vfov_deg)) throw bad_line(line_no, "'fov' expects HFOV VFOV in degrees");
    } else if (kw == "clip") {
      if (!(ls >> current.near_plane >> current.far_plane)) throw bad_line(line_no, "'clip' expects NEAR FAR");
    } else if (kw == "sigma") {
      if (!(ls >> script.sigma) || script.sigma < 0.0) throw bad_line(line_no, "'sigma' expects a value >= 0");
    } else if (kw == "seed") {
      if (!(ls >> script.seed)) throw bad_line(line_no, "'seed' expects an unsigned integer");
    } else if (kw == "pose") {
      const Vec3 t = read_vec(ls, line_no, kw);
      Eigen::Quaterniond q;
      if (!(ls >> q.x() >> q.y() >> q.z() >> q.w())) throw bad_line(line_no, "'pose' expects tx ty tz qx qy qz qw");
      if (std::abs(q.norm() - 1.0) > 1e-6) throw bad_line(line_no, "pose quaternion is not unit length");
      current.pose = Pose::from_quaternion(q.normalized(), t);
      current.validate();
      script.cameras.push_back(current);
    } else if (kw == "look_at") {
      const Vec3 eye = read_vec(ls, line_no, kw);
      const Vec3 target = read_vec(ls, line_no, kw);
      try {
        current.pose = Pose::look_at(eye, target);
        current.validate();
      } catch (const std::exception& e) {
        throw bad_line(line_no, e.what());
      }
      script.cameras.push_back(current);
    } else {
      throw bad_line(line_no, "unknown keyword '" + kw + "'");
    }
    expect_end(ls, line_no);
  });
  return script;
}

void write_scan_script(const ScanScript& script, std::ostream& os) {
  os.precision(17);
  os << "sigma " << script.sigma << "\nseed " << script.seed << '\n';
  for (const auto& c : script.cameras) {
    const Eigen::Quaterniond q = c.pose.quaternion();
    os << "resolution " << c.width << ' ' << c.height << "\nfov " << c.hfov_deg << ' ' << c.vfov_deg << "\nclip "
       << c.near_plane << ' ' << c.far_plane << "\npose";
    write_vec(os, c.pose.translation);
    os << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' ' << q.w() << '\n';
  }
}

}  // namespace vmesh
