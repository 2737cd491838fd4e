#include "vmesh/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "vmesh/errors.hpp"
#include "vmesh/integrity.hpp"

namespace vmesh {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (value.empty() || value[0] == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError("config: '" + key + "' expects true or false, got '" + value + "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

void RunConfig::apply(const std::map<std::string, std::string>& settings) {
  if (const auto it = settings.find("preset"); it != settings.end()) {
    preset = it->second;
    if (preset == "mechanical") {
      map = MapConfig::mechanical();
    } else if (preset == "solid_state") {
      map = MapConfig::solid_state();
    } else if (preset != "custom") {
      throw InputError("config: unknown preset '" + preset + "' (mechanical, solid_state, custom)");
    }
  }
  for (const auto& [key, value] : settings) {
    if (key == "preset") continue;
    if (key == "xi") {
      map.xi = parse_double(key, value);
    } else if (key == "region_size") {
      map.region_size = parse_double(key, value);
    } else if (key == "voxel_size") {
      map.voxel_size = parse_double(key, value);
    } else if (key == "dilation_radius") {
      map.dilation_radius = parse_double(key, value);
    } else if (key == "downsample_leaf") {
      map.downsample_leaf = parse_double(key, value);
    } else if (key == "workers") {
      workers = parse_unsigned(key, value);
    } else if (key == "export_every") {
      export_every = parse_unsigned(key, value);
    } else if (key == "seed") {
      seed = parse_unsigned(key, value);
    } else if (key == "check_integrity") {
      check_integrity = parse_bool(key, value);
    } else if (key == "background_sync") {
      background_sync = parse_bool(key, value);
    } else {
      throw InputError("config: unknown key '" + key + "'");
    }
  }
  map.validate();
}

double RunReport::mean_meshing_ms() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : frames) sum += f.meshing_ms;
  return sum / static_cast<double>(frames.size());
}

double RunReport::stddev_meshing_ms() const {
  if (frames.size() < 2) return 0.0;
  const double mean = mean_meshing_ms();
  double ss = 0.0;
  for (const auto& f : frames) ss += (f.meshing_ms - mean) * (f.meshing_ms - mean);
  return std::sqrt(ss / static_cast<double>(frames.size() - 1));
}

double RunReport::mean_registration_ms() const {
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& f : frames) sum += f.registration_ms;
  return sum / static_cast<double>(frames.size());
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["frame_count"] = frames.size();
  j["vertex_count"] = vertex_count;
  j["facet_count"] = facet_count;
  j["meshing_ms_mean"] = mean_meshing_ms();
  j["meshing_ms_std"] = stddev_meshing_ms();
  j["registration_ms_mean"] = mean_registration_ms();
  nlohmann::ordered_json per_frame = nlohmann::ordered_json::array();
  for (const auto& f : frames) {
    per_frame.push_back({{"registration_ms", f.registration_ms},
                         {"meshing_ms", f.meshing_ms},
                         {"appended", f.appended},
                         {"activated_voxels", f.activated_voxels},
                         {"vertex_count", f.vertex_count},
                         {"facet_count", f.facet_count}});
  }
  j["frames"] = std::move(per_frame);
  return j.dump(2) + "\n";
}

Pipeline::Pipeline(const RunConfig& config) : config_(config), map_(config.map), broadcaster_(map_) {
  if (config_.background_sync) broadcaster_.start(std::chrono::milliseconds(50));
}

Pipeline::~Pipeline() { broadcaster_.stop(); }

FrameStats Pipeline::process(const ScanFrame& frame) {
  FrameStats stats;
  auto t0 = std::chrono::steady_clock::now();
  const RegistrationReport reg = map_.register_scan(frame);
  stats.registration_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  MeshUpdateOptions opts;
  opts.workers = config_.workers;
  mesh_update(map_, reg.activated_voxel_keys, frame.pose.translation, opts);
  stats.meshing_ms = elapsed_ms(t0);

  stats.appended = reg.appended_vertex_ids.size();
  stats.activated_voxels = reg.activated_voxel_keys.size();
  stats.vertex_count = map_.vertices().size();
  stats.facet_count = map_.facets().size();

  if (config_.check_integrity) {
    const auto violations = check_integrity(map_);
    if (!violations.empty()) {
      throw IntegrityError("integrity sweep failed after frame " + std::to_string(report_.frames.size()) + ": " +
                           violations.front() + " (" + std::to_string(violations.size()) + " violations)");
    }
  }
  report_.frames.push_back(stats);
  report_.vertex_count = stats.vertex_count;
  report_.facet_count = stats.facet_count;

  if (config_.export_every > 0 && report_.frames.size() % config_.export_every == 0 && on_export) {
    on_export(report_.frames.size(), broadcaster_.sync_snapshot());
  }
  return stats;
}

RunReport run_pipeline(const RunConfig& config, std::span<const ScanFrame> frames) {
  Pipeline pipeline(config);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      pipeline.process(frames[i]);
    } catch (const InputError& e) {
      throw InputError("frame " + std::to_string(i) + ": " + e.what());
    }
  }
  return pipeline.report();
}

}  // namespace vmesh
