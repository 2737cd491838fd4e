// Command-line driver: run, synth, evaluate, rasterize, reinforce, export.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vmesh/errors.hpp"
#include "vmesh/evaluation.hpp"
#include "vmesh/frame_io.hpp"
#include "vmesh/mesh_io.hpp"
#include "vmesh/pipeline.hpp"
#include "vmesh/raster.hpp"
#include "vmesh/synth_scene.hpp"

namespace fs = std::filesystem;
using namespace vmesh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIntegrity = 3;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw InputError(path.string() + ": cannot open for writing");
  os << text;
  if (!os) throw InputError(path.string() + ": write failed");
}

Scene load_scene(const std::string& name_or_path) {
  if (name_or_path == "box_town") return box_town();
  if (name_or_path == "plane_only") return plane_only();
  std::ifstream is(name_or_path);
  if (!is) throw InputError(name_or_path + ": not a built-in scene name and cannot be opened");
  try {
    return parse_scene(is);
  } catch (const InputError& e) {
    throw InputError(name_or_path + ": " + e.what());
  }
}

Pose parse_pose_text(const std::vector<double>& v, const std::string& what) {
  if (v.size() == 7) {
    Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
    if (std::abs(q.norm() - 1.0) > 1e-6) throw InputError(what + ": quaternion is not unit length");
    return Pose::from_quaternion(q.normalized(), Vec3(v[0], v[1], v[2]));
  }
  if (v.size() == 6) return Pose::look_at(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]));
  throw InputError(what + ": expected 7 values (tx ty tz qx qy qz qw) or 6 (eye xyz, target xyz)");
}

// ---- run ----

struct RunArgs {
  std::string config_path, preset, frames_dir, trajectory, out_mesh, report;
  std::size_t workers = 0, export_every = 0;
  std::uint64_t seed = 1;
  bool check_integrity = false, ascii = false, background_sync = false;
};

int cmd_run(const RunArgs& a, const CLI::App& app) {
  RunConfig cfg;
  std::map<std::string, std::string> settings;
  if (!a.config_path.empty()) {
    std::ifstream is(a.config_path);
    if (!is) throw InputError(a.config_path + ": cannot open config");
    try {
      settings = parse_key_values(is);
    } catch (const InputError& e) {
      throw InputError(a.config_path + ": " + e.what());
    }
  }
  // Flags override the file.
  if (app.count("--preset")) settings["preset"] = a.preset;
  if (app.count("--workers")) settings["workers"] = std::to_string(a.workers);
  if (app.count("--export-every")) settings["export_every"] = std::to_string(a.export_every);
  if (app.count("--seed")) settings["seed"] = std::to_string(a.seed);
  if (a.check_integrity) settings["check_integrity"] = "true";
  if (a.background_sync) settings["background_sync"] = "true";
  cfg.apply(settings);

  const auto trajectory = read_trajectory(fs::path(a.trajectory));
  const auto files = list_frame_files(a.frames_dir);
  if (files.size() != trajectory.size()) {
    throw InputError("found " + std::to_string(files.size()) + " frame files but " +
                     std::to_string(trajectory.size()) + " trajectory entries");
  }

  const MeshFormat format = mesh_format_for(a.out_mesh, a.ascii);
  Pipeline pipeline(cfg);
  pipeline.on_export = [&](std::size_t frame, const MeshSnapshot& snap) {
    fs::path p = a.out_mesh;
    p.replace_extension();
    std::ostringstream suffix;
    suffix << '_' << std::setw(6) << std::setfill('0') << frame << fs::path(a.out_mesh).extension().string();
    p += suffix.str();
    export_mesh(snap, p, format);
  };
  for (std::size_t i = 0; i < files.size(); ++i) {
    ScanFrame frame;
    frame.timestamp = trajectory[i].timestamp;
    frame.pose = trajectory[i].pose;
    try {
      frame.points = read_frame(files[i]);
      pipeline.process(frame);
    } catch (const InputError& e) {
      throw InputError("frame " + std::to_string(i) + ": " + e.what());
    }
  }
  export_mesh(pipeline.snapshot(), a.out_mesh, format);
  const RunReport& report = pipeline.report();
  std::cout << "frames=" << report.frames.size() << "\nvertices=" << report.vertex_count
            << "\nfacets=" << report.facet_count << "\nmeshing_ms_mean=" << report.mean_meshing_ms()
            << "\nregistration_ms_mean=" << report.mean_registration_ms() << '\n';
  if (!a.report.empty()) write_text(a.report, report.to_json());
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::string scene = "box_town", script, out_dir;
  int width = 0, height = 0;
  double sigma = -1.0, gt_resolution = kDefaultSampleResolution;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, const CLI::App& app) {
  const Scene scene = load_scene(a.scene);
  ScanScript script;
  if (!a.script.empty()) {
    std::ifstream is(a.script);
    if (!is) throw InputError(a.script + ": cannot open scan script");
    try {
      script = parse_scan_script(is);
    } catch (const InputError& e) {
      throw InputError(a.script + ": " + e.what());
    }
  } else if (scene.name == "plane_only") {
    script = plane_only_script(a.width > 0 ? a.width : 320, a.height > 0 ? a.height : 240);
  } else {
    script = box_town_script(a.width > 0 ? a.width : 640, a.height > 0 ? a.height : 480);
  }
  if (app.count("--sigma")) script.sigma = a.sigma;
  if (app.count("--seed")) script.seed = a.seed;

  const fs::path out(a.out_dir);
  fs::create_directories(out / "frames");
  std::vector<StampedPose> poses;
  for (std::size_t i = 0; i < script.cameras.size(); ++i) {
    const ScanFrame frame = render_scan(scene, script.cameras[i], script.sigma, script.seed, i);
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.bin", i);
    write_frame(out / "frames" / name, frame.points);
    poses.push_back({frame.timestamp, frame.pose});
  }
  {
    std::ofstream os(out / "trajectory.txt");
    write_trajectory(os, poses);
  }
  {
    std::ofstream os(out / "scene.txt");
    write_scene(scene, os);
  }
  {
    std::ofstream os(out / "script.txt");
    write_scan_script(script, os);
  }
  TriMesh gt;
  gt.vertices = ground_truth_points(scene, a.gt_resolution);
  write_mesh(gt, out / "ground_truth.ply", MeshFormat::PlyBinary);
  std::cout << "scans=" << script.cameras.size() << "\nground_truth_points=" << gt.vertices.size() << '\n';
  return kExitOk;
}

// ---- evaluate ----

struct EvalArgs {
  std::string mesh, scene, gt, report, angle_mode = "mean_of_extremes";
  double threshold = kDefaultThreshold, resolution = kDefaultSampleResolution;
  std::uint64_t seed = kDefaultSampleSeed;
};

int cmd_evaluate(const EvalArgs& a) {
  const TriMesh mesh = read_mesh(a.mesh);
  std::vector<Point3> reference;
  if (!a.gt.empty()) {
    reference = read_mesh(a.gt).vertices;
  } else {
    reference = ground_truth_points(load_scene(a.scene), a.resolution);
  }
  const AngleErrorMode mode = a.angle_mode == "spread" ? AngleErrorMode::Spread : AngleErrorMode::MeanOfExtremes;
  const CorrectnessReport corr = mesh_correctness(mesh, reference, a.threshold, a.resolution, a.seed);
  const FairnessReport fair = fairness(mesh, mode);
  std::cout << to_key_value(&corr, &fair);
  if (!a.report.empty()) write_text(a.report, to_json(&corr, &fair));
  return kExitOk;
}

// ---- rasterize / reinforce / export ----

struct RasterArgs {
  std::string mesh, out;
  std::vector<double> pose;
  int width = 640, height = 480;
  double hfov = 90.0, vfov = 67.5, near_plane = 0.05, far_plane = 1000.0;
};

int cmd_rasterize(const RasterArgs& a) {
  CameraModel cam;
  cam.width = a.width;
  cam.height = a.height;
  cam.hfov_deg = a.hfov;
  cam.vfov_deg = a.vfov;
  cam.near_plane = a.near_plane;
  cam.far_plane = a.far_plane;
  cam.pose = parse_pose_text(a.pose, "--pose");
  const DepthImage image = rasterize_depth(read_mesh(a.mesh), cam);
  write_depth_image(image, a.out);
  std::cout << "hit_pixels=" << image.hit_count() << '\n';
  return kExitOk;
}

int cmd_reinforce(const std::string& depth_path, const std::string& out, bool ascii) {
  TriMesh cloud;
  cloud.vertices = reinforce_points(read_depth_image(depth_path));
  write_mesh(cloud, out, mesh_format_for(out, ascii));
  std::cout << "points=" << cloud.vertices.size() << '\n';
  return kExitOk;
}

int cmd_export(const std::string& in, const std::string& out, bool ascii) {
  const TriMesh mesh = read_mesh(in);
  write_mesh(mesh, out, mesh_format_for(out, ascii));
  std::cout << "vertices=" << mesh.vertices.size() << "\nfaces=" << mesh.faces.size() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental triangle-mesh reconstruction from posed LiDAR frames"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Register and mesh a frame sequence, then export the mesh");
  run_cmd->add_option("--config", run.config_path, "key = value config file");
  run_cmd->add_option("--preset", run.preset, "mechanical, solid_state or custom");
  run_cmd->add_option("--frames-dir", run.frames_dir, "directory of .bin frames")->required();
  run_cmd->add_option("--trajectory", run.trajectory, "TUM-style pose file, one line per frame")->required();
  run_cmd->add_option("--out-mesh", run.out_mesh, "output .ply or .obj")->required();
  run_cmd->add_option("--workers", run.workers, "meshing threads (0 = default)");
  run_cmd->add_option("--export-every", run.export_every, "also export every N frames");
  run_cmd->add_option("--seed", run.seed, "seed recorded in the run config");
  run_cmd->add_option("--report", run.report, "JSON run report");
  run_cmd->add_flag("--check-integrity", run.check_integrity, "full consistency sweep after every frame");
  run_cmd->add_flag("--background-sync", run.background_sync, "run the snapshot copier on its own thread");
  run_cmd->add_flag("--ascii", run.ascii, "ASCII instead of binary PLY");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render synthetic scans and ground truth for a scene");
  synth_cmd->add_option("--scene", synth.scene, "box_town, plane_only or a scene file");
  synth_cmd->add_option("--script", synth.script, "scan script file (default: built-in poses)");
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")->required();
  synth_cmd->add_option("--width", synth.width, "image width for built-in scripts");
  synth_cmd->add_option("--height", synth.height, "image height for built-in scripts");
  synth_cmd->add_option("--sigma", synth.sigma, "Gaussian range noise (m)")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth.seed, "noise seed");
  synth_cmd->add_option("--gt-resolution", synth.gt_resolution, "ground-truth sampling step (m)")
      ->check(CLI::PositiveNumber);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Correctness and fairness of a mesh against ground truth");
  eval_cmd->add_option("--mesh", eval.mesh, "mesh to evaluate")->required();
  auto* scene_opt = eval_cmd->add_option("--scene", eval.scene, "box_town, plane_only or a scene file");
  auto* gt_opt = eval_cmd->add_option("--gt", eval.gt, "ground-truth point cloud (.ply/.obj vertices)");
  scene_opt->excludes(gt_opt);
  eval_cmd->add_option("--threshold", eval.threshold, "match distance (m)")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--resolution", eval.resolution, "sampling and downsampling step (m)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.seed, "mesh sampling seed");
  eval_cmd->add_option("--angle-mode", eval.angle_mode, "mean_of_extremes or spread")
      ->check(CLI::IsMember({"mean_of_extremes", "spread"}));
  eval_cmd->add_option("--report", eval.report, "JSON report path");

  RasterArgs raster;
  auto* raster_cmd = app.add_subcommand("rasterize", "Render a depth image of a mesh");
  raster_cmd->add_option("--mesh", raster.mesh, "input mesh")->required();
  raster_cmd->add_option("--out", raster.out, "output depth file")->required();
  raster_cmd->add_option("--pose", raster.pose, "tx ty tz qx qy qz qw, or eye xyz target xyz")->required();
  raster_cmd->add_option("--width", raster.width, "pixels");
  raster_cmd->add_option("--height", raster.height, "pixels");
  raster_cmd->add_option("--hfov", raster.hfov, "degrees");
  raster_cmd->add_option("--vfov", raster.vfov, "degrees");
  raster_cmd->add_option("--near", raster.near_plane, "near clip (m)");
  raster_cmd->add_option("--far", raster.far_plane, "far clip (m)");

  std::string depth_in, reinforce_out;
  bool reinforce_ascii = false;
  auto* reinforce_cmd = app.add_subcommand("reinforce", "Unproject a depth image into world points");
  reinforce_cmd->add_option("--depth", depth_in, "depth file")->required();
  reinforce_cmd->add_option("--out", reinforce_out, "output .ply or .obj point cloud")->required();
  reinforce_cmd->add_flag("--ascii", reinforce_ascii, "ASCII instead of binary PLY");

  std::string export_in, export_out;
  bool export_ascii = false;
  auto* export_cmd = app.add_subcommand("export", "Convert a mesh between PLY and OBJ");
  export_cmd->add_option("--in", export_in, "input mesh")->required();
  export_cmd->add_option("--out", export_out, "output mesh")->required();
  export_cmd->add_flag("--ascii", export_ascii, "ASCII instead of binary PLY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd);
    if (*synth_cmd) return cmd_synth(synth, *synth_cmd);
    if (*eval_cmd) {
      if (eval.scene.empty() && eval.gt.empty()) throw InputError("evaluate: pass --scene or --gt");
      return cmd_evaluate(eval);
    }
    if (*raster_cmd) return cmd_rasterize(raster);
    if (*reinforce_cmd) return cmd_reinforce(depth_in, reinforce_out, reinforce_ascii);
    if (*export_cmd) return cmd_export(export_in, export_out, export_ascii);
  } catch (const IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const EmptyInputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
