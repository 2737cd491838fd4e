#include <gtest/gtest.h>

#include <json.hpp>
#include <fstream>
#include <thread>

#include "vmesh/errors.hpp"
#include "vmesh/integrity.hpp"
#include "vmesh/mesh_io.hpp"
#include "vmesh/pipeline.hpp"
#include "vmesh/synth_scene.hpp"

using namespace vmesh;

namespace {

std::vector<ScanFrame> plane_frames() {
  const Scene s = plane_only();
  std::vector<ScanFrame> frames;
  const auto script = plane_only_script(80, 60);
  for (std::size_t i = 0; i < script.cameras.size(); ++i) frames.push_back(render_scan(s, script.cameras[i], 0.0, 1, i));
  return frames;
}

VoxelMap& with_triangle(VoxelMap& map) {
  map.append_vertex(Point3(0, 0, 0));
  map.append_vertex(Point3(0.2, 0, 0));
  map.append_vertex(Point3(0, 0.2, 0));
  return map;
}

}  // namespace

TEST(Integrity, DetectsBadCenterAndNormal) {
  VoxelMap map(MapConfig::solid_state());
  with_triangle(map);
  TriangleFacet f;
  f.key = FacetKey(0, 1, 2);
  f.center = Point3(0.2 / 3, 0.2 / 3, 0);
  f.normal = Vec3(0, 0, 2);
  map.add_facet(f);
  EXPECT_FALSE(check_integrity(map).empty());
  map.erase_facet(f.key);
  f.normal = Vec3::UnitZ();
  f.center = Point3(1, 1, 1);
  map.add_facet(f);
  EXPECT_FALSE(check_integrity(map).empty());
  map.erase_facet(f.key);
  f.center = Point3(0.2 / 3, 0.2 / 3, 0);
  f.normal = Vec3::UnitX();  // not orthogonal to the triangle
  map.add_facet(f);
  EXPECT_FALSE(check_integrity(map).empty());
  map.erase_facet(f.key);
  f.normal = -Vec3::UnitZ();
  map.add_facet(f);
  EXPECT_TRUE(check_integrity(map).empty());
}

TEST(Broadcaster, SyncsOnlyDirtyRegions) {
  VoxelMap map(MapConfig::solid_state());
  Broadcaster b(map);
  EXPECT_EQ(b.sync(), 0u);
  const auto frames = plane_frames();
  const auto reg = map.register_scan(frames[0]);
  mesh_update(map, reg.activated_voxel_keys, frames[0].pose.translation);
  const std::size_t dirty = b.sync();
  EXPECT_GT(dirty, 0u);
  EXPECT_EQ(b.sync(), 0u);
  for (const auto& [k, r] : map.regions()) EXPECT_EQ(r.sync, SyncFlag::Synced);

  const MeshSnapshot s1 = b.snapshot();
  const MeshSnapshot s2 = b.snapshot();
  EXPECT_EQ(s2.frame_counter, s1.frame_counter + 1);
  EXPECT_EQ(s1.faces.size(), map.facets().size());
  EXPECT_TRUE(std::is_sorted(s1.vertices.begin(), s1.vertices.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; }));
  for (const auto& f : s1.faces) {
    const Point3& a = s1.vertices[f.indices[0]].second;
    const Point3& bb = s1.vertices[f.indices[1]].second;
    const Point3& c = s1.vertices[f.indices[2]].second;
    EXPECT_GT((bb - a).cross(c - a).dot(f.normal), 0.0);
  }
}

TEST(Broadcaster, BackgroundThreadCopiesWhileMeshing) {
  RunConfig cfg;
  cfg.background_sync = true;
  Pipeline p(cfg);
  EXPECT_TRUE(p.broadcaster().running());
  for (const auto& f : plane_frames()) p.process(f);
  std::this_thread::sleep_for(std::chrono::milliseconds(120));
  const MeshSnapshot s = p.snapshot();
  EXPECT_EQ(s.faces.size(), p.map().facets().size());
  p.broadcaster().stop();
  EXPECT_FALSE(p.broadcaster().running());
}

TEST(RunConfig, ApplyPresetsAndOverrides) {
  RunConfig c;
  c.apply({{"preset", "mechanical"}, {"workers", "3"}, {"check_integrity", "true"}});
  EXPECT_DOUBLE_EQ(c.map.xi, 0.15);
  EXPECT_EQ(c.workers, 3u);
  EXPECT_TRUE(c.check_integrity);
  c.apply({{"preset", "custom"}, {"xi", "0.05"}, {"voxel_size", "0.3"}, {"region_size", "5"}});
  EXPECT_DOUBLE_EQ(c.map.xi, 0.05);
  EXPECT_THROW(c.apply({{"colour", "blue"}}), InputError);
  EXPECT_THROW(c.apply({{"preset", "lidar9000"}}), InputError);
  EXPECT_THROW(c.apply({{"workers", "-1"}}), InputError);
  EXPECT_THROW(c.apply({{"xi", "abc"}}), InputError);
  EXPECT_THROW(c.apply({{"xi", "5"}}), InputError);  // xi >= voxel_size
}

TEST(Pipeline, PlaneRunStaysConsistentAndFlat) {
  RunConfig cfg;
  cfg.check_integrity = true;
  cfg.export_every = 2;
  Pipeline p(cfg);
  std::vector<std::size_t> exported;
  p.on_export = [&](std::size_t i, const MeshSnapshot&) { exported.push_back(i); };
  for (const auto& f : plane_frames()) p.process(f);
  EXPECT_EQ(exported, (std::vector<std::size_t>{2, 4}));
  const auto& rep = p.report();
  EXPECT_EQ(rep.frames.size(), 4u);
  EXPECT_GT(rep.facet_count, 100u);
  for (const auto& [k, f] : p.map().facets())
    for (VertexId v : k.ids()) EXPECT_NEAR(p.map().vertex(v).pos.z(), 0.0, 1e-6);
  const auto j = nlohmann::json::parse(rep.to_json());
  EXPECT_EQ(j["frame_count"].get<int>(), 4);
  EXPECT_EQ(j["frames"].size(), 4u);
}

TEST(Pipeline, RunPipelineTagsBadFrames) {
  auto frames = plane_frames();
  frames[1].pose.rotation(0, 0) = 5.0;
  try {
    run_pipeline(RunConfig{}, frames);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 1"), std::string::npos);
  }
}

TEST(MeshExport, IdMapMatchesSnapshot) {
  Pipeline p(RunConfig{});
  for (const auto& f : plane_frames()) p.process(f);
  const MeshSnapshot s = p.snapshot();
  const auto path = std::filesystem::temp_directory_path() / ("vmesh_export_" + std::to_string(::getpid()) + ".ply");
  export_mesh(s, path, MeshFormat::PlyBinary);
  const TriMesh back = read_mesh(path);
  EXPECT_EQ(back.faces.size(), s.faces.size());
  std::ifstream ids(path.string() + ".idmap");
  std::size_t n = 0;
  for (VertexId id; ids >> id; ++n) EXPECT_EQ(id, s.vertices[n].first);
  EXPECT_EQ(n, s.vertices.size());
}
