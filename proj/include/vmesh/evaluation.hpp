#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmesh/geom.hpp"
#include "vmesh/mesh_io.hpp"
#include "vmesh/voxel_map.hpp"  // downsample_grid

namespace vmesh {

inline constexpr double kDefaultThreshold = 0.05;
inline constexpr double kDefaultSampleResolution = 0.01;
inline constexpr std::uint64_t kDefaultSampleSeed = 0x5eedULL;

struct CorrectnessReport {
  double accuracy = 0.0;      ///< mean distance from predicted to reference (m)
  double completeness = 0.0;  ///< mean distance from reference to predicted (m)
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double threshold = kDefaultThreshold;
  double sample_resolution = kDefaultSampleResolution;
  std::size_t predicted_count = 0;
  std::size_t reference_count = 0;
};

enum class AngleErrorMode {
  MeanOfExtremes,  ///< ((max - 60) + (60 - min)) / 2 per triangle
  Spread,          ///< max - min per triangle
};

struct FairnessReport {
  double max_min_angle_error = 0.0;  ///< degrees, mean over valid facets
  double c2se = 0.0;                 ///< mean circumradius / shortest edge
  std::size_t facet_count = 0;       ///< valid facets used
  std::size_t degenerate_count = 0;  ///< facets excluded for (near) zero area
  AngleErrorMode mode = AngleErrorMode::MeanOfExtremes;
};

/// Area-proportional sampling: each facet gets ceil(area / resolution^2)
/// uniform barycentric samples from a per-facet stream derived from `seed`.
/// Throws EmptyInputError("empty mesh") when the mesh has no faces.
std::vector<Point3> sample_mesh_uniform(const TriMesh& mesh, double resolution = kDefaultSampleResolution,
                                        std::uint64_t seed = kDefaultSampleSeed);

/// Accuracy, completeness, precision, recall and F-score with exact nearest
/// neighbours; a distance counts as a match when strictly below `threshold`.
/// Throws EmptyInputError when either set is empty.
CorrectnessReport correctness(std::span<const Point3> predicted, std::span<const Point3> reference,
                              double threshold = kDefaultThreshold);

/// Mesh-to-reference comparison as done by `vmesh evaluate`: the mesh is
/// sampled at `resolution`, both sets are voxel-grid downsampled with the same
/// leaf, then compared with correctness().
CorrectnessReport mesh_correctness(const TriMesh& mesh, std::span<const Point3> reference,
                                   double threshold = kDefaultThreshold,
                                   double resolution = kDefaultSampleResolution,
                                   std::uint64_t seed = kDefaultSampleSeed);

/// Interior-angle error and circumradius-to-shortest-edge ratio averaged over
/// facets; facets with a cross-product norm below 1e-12 are excluded and counted.
/// Throws EmptyInputError when no valid facet remains.
FairnessReport fairness(const TriMesh& mesh, AngleErrorMode mode = AngleErrorMode::MeanOfExtremes);

/// Per-triangle helpers, exposed for tests.
double triangle_angle_error(const Point3& a, const Point3& b, const Point3& c, AngleErrorMode mode);
double triangle_c2se(const Point3& a, const Point3& b, const Point3& c);

/// Flat `key=value` lines.
std::string to_key_value(const CorrectnessReport* correctness, const FairnessReport* fairness);
/// JSON object with optional "correctness" and "fairness" members.
std::string to_json(const CorrectnessReport* correctness, const FairnessReport* fairness);

}  // namespace vmesh
