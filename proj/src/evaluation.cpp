#include "vmesh/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <json.hpp>
#include <tbb/parallel_for.h>

#include "vmesh/errors.hpp"

namespace vmesh {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  // 53 random mantissa bits in [0, 1); independent of library distribution details.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Directed {
  double mean = 0.0;
  double within = 0.0;
};

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using RPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using RBox = bg::model::box<RPoint>;
using REntry = std::pair<RPoint, std::uint32_t>;

RPoint rpoint(const Point3& p) { return RPoint(p.x(), p.y(), p.z()); }

// Mean nearest distance from `from` to `to`, and the fraction strictly below threshold.
Directed directed_distance(std::span<const Point3> from, std::span<const Point3> to, double threshold) {
  std::vector<REntry> entries;
  entries.reserve(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) entries.emplace_back(rpoint(to[i]), static_cast<std::uint32_t>(i));
  const bgi::rtree<REntry, bgi::rstar<16>> tree(entries.begin(), entries.end());  // bulk-loaded

  std::vector<double> dist(from.size());
  tbb::parallel_for(std::size_t{0}, from.size(), [&](std::size_t i) {
    const Point3& p = from[i];
    std::vector<REntry> hit;
    tree.query(bgi::nearest(rpoint(p), 1), std::back_inserter(hit));
    double best = (to[hit.front().second] - p).norm();
    if (best > 0.0) {
      // The tree ranks by its own squared-distance arithmetic; re-rank candidates
      // in a slightly padded box with norm() so results match a brute-force scan bit for bit.
      const double r = best * (1.0 + 1e-9);
      const RBox box(rpoint(p - Vec3::Constant(r)), rpoint(p + Vec3::Constant(r)));
      hit.clear();
      tree.query(bgi::intersects(box), std::back_inserter(hit));
      for (const auto& e : hit) best = std::min(best, (to[e.second] - p).norm());
    }
    dist[i] = best;
  });

  // Sequential reduction keeps the sums independent of scheduling.
  double sum = 0.0;
  std::size_t hits = 0;
  for (double d : dist) {
    sum += d;
    if (d < threshold) ++hits;
  }
  return {sum / static_cast<double>(from.size()), static_cast<double>(hits) / static_cast<double>(from.size())};
}

const char* mode_name(AngleErrorMode m) { return m == AngleErrorMode::Spread ? "spread" : "mean_of_extremes"; }

}  // namespace

std::vector<Point3> sample_mesh_uniform(const TriMesh& mesh, double resolution, std::uint64_t seed) {
  if (mesh.faces.empty()) throw EmptyInputError("empty mesh");
  if (!(resolution > 0.0)) throw std::invalid_argument("sample_mesh_uniform: resolution must be positive");
  std::vector<Point3> out;
  const double cell_area = resolution * resolution;
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& f = mesh.faces[fi];
    const Point3& a = mesh.vertices.at(f[0]);
    const Point3& b = mesh.vertices.at(f[1]);
    const Point3& c = mesh.vertices.at(f[2]);
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const double ratio = 0.5 * ab.cross(ac).norm() / cell_area;
    // Relative guard so exact multiples of the cell area are not bumped up by rounding.
    const auto count = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
    if (count == 0) continue;
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (fi + 1)));
    for (std::size_t k = 0; k < count; ++k) {
      double r1 = unit_uniform(rng);
      double r2 = unit_uniform(rng);
      if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
      }
      out.push_back(a + r1 * ab + r2 * ac);
    }
  }
  return out;
}

CorrectnessReport correctness(std::span<const Point3> predicted, std::span<const Point3> reference,
                              double threshold) {
  if (predicted.empty() || reference.empty()) throw EmptyInputError("empty input");
  if (!(threshold > 0.0)) throw std::invalid_argument("correctness: threshold must be positive");
  CorrectnessReport r;
  r.threshold = threshold;
  r.predicted_count = predicted.size();
  r.reference_count = reference.size();
  const Directed forward = directed_distance(predicted, reference, threshold);
  const Directed backward = directed_distance(reference, predicted, threshold);
  r.accuracy = forward.mean;
  r.precision = forward.within;
  r.completeness = backward.mean;
  r.recall = backward.within;
  const double denom = r.precision + r.recall;
  r.f_score = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  return r;
}

CorrectnessReport mesh_correctness(const TriMesh& mesh, std::span<const Point3> reference, double threshold,
                                   double resolution, std::uint64_t seed) {
  if (reference.empty()) throw EmptyInputError("empty input");
  const std::vector<Point3> predicted = downsample_grid(sample_mesh_uniform(mesh, resolution, seed), resolution);
  const std::vector<Point3> ref = downsample_grid(reference, resolution);
  CorrectnessReport r = correctness(predicted, ref, threshold);
  r.sample_resolution = resolution;
  return r;
}

double triangle_angle_error(const Point3& a, const Point3& b, const Point3& c, AngleErrorMode mode) {
  auto angle_at = [](const Point3& p, const Point3& q, const Point3& r) {
    const Vec3 u = q - p;
    const Vec3 v = r - p;
    return std::atan2(u.cross(v).norm(), u.dot(v)) * 180.0 / std::numbers::pi;
  };
  const double angles[3] = {angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)};
  const double hi = *std::max_element(std::begin(angles), std::end(angles));
  const double lo = *std::min_element(std::begin(angles), std::end(angles));
  return mode == AngleErrorMode::Spread ? hi - lo : ((hi - 60.0) + (60.0 - lo)) / 2.0;
}

double triangle_c2se(const Point3& a, const Point3& b, const Point3& c) {
  const double la = (b - c).norm();
  const double lb = (c - a).norm();
  const double lc = (a - b).norm();
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const double circumradius = la * lb * lc / (4.0 * area);
  return circumradius / std::min({la, lb, lc});
}

FairnessReport fairness(const TriMesh& mesh, AngleErrorMode mode) {
  FairnessReport r;
  r.mode = mode;
  double angle_sum = 0.0;
  double c2se_sum = 0.0;
  for (const auto& f : mesh.faces) {
    const Point3& a = mesh.vertices.at(f[0]);
    const Point3& b = mesh.vertices.at(f[1]);
    const Point3& c = mesh.vertices.at(f[2]);
    if ((b - a).cross(c - a).norm() < 1e-12) {
      ++r.degenerate_count;
      continue;
    }
    angle_sum += triangle_angle_error(a, b, c, mode);
    c2se_sum += triangle_c2se(a, b, c);
    ++r.facet_count;
  }
  if (r.facet_count == 0) throw EmptyInputError("no valid facets");
  r.max_min_angle_error = angle_sum / static_cast<double>(r.facet_count);
  r.c2se = c2se_sum / static_cast<double>(r.facet_count);
  return r;
}

std::string to_key_value(const CorrectnessReport* c, const FairnessReport* f) {
  std::ostringstream os;
  os.precision(10);
  if (c) {
    os << "accuracy=" << c->accuracy << "\ncompleteness=" << c->completeness << "\nprecision=" << c->precision
       << "\nrecall=" << c->recall << "\nf_score=" << c->f_score << "\nthreshold=" << c->threshold
       << "\nsample_resolution=" << c->sample_resolution << "\npredicted_count=" << c->predicted_count
       << "\nreference_count=" << c->reference_count << '\n';
  }
  if (f) {
    os << "max_min_angle_error=" << f->max_min_angle_error << "\nc2se=" << f->c2se
       << "\nfacet_count=" << f->facet_count << "\ndegenerate_count=" << f->degenerate_count
       << "\nangle_error_mode=" << mode_name(f->mode) << '\n';
  }
  return os.str();
}

std::string to_json(const CorrectnessReport* c, const FairnessReport* f) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (c) {
    j["correctness"] = {{"accuracy", c->accuracy},
                        {"completeness", c->completeness},
                        {"precision", c->precision},
                        {"recall", c->recall},
                        {"f_score", c->f_score},
                        {"threshold", c->threshold},
                        {"sample_resolution", c->sample_resolution},
                        {"predicted_count", c->predicted_count},
                        {"reference_count", c->reference_count}};
  }
  if (f) {
    j["fairness"] = {{"max_min_angle_error", f->max_min_angle_error},
                     {"c2se", f->c2se},
                     {"facet_count", f->facet_count},
                     {"degenerate_count", f->degenerate_count},
                     {"angle_error_mode", mode_name(f->mode)}};
  }
  return j.dump(2) + "\n";
}

}  // namespace vmesh
