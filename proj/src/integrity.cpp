#include "vmesh/integrity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vmesh {
namespace {

std::string describe(const FacetKey& k) {
  std::ostringstream os;
  os << '(' << k[0] << ',' << k[1] << ',' << k[2] << ')';
  return os.str();
}

}  // namespace

std::vector<std::string> check_integrity(const VoxelMap& map) {
  std::vector<std::string> out;
  const auto& vertices = map.vertices();
  const double voxel_size = map.config().voxel_size;

  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const MeshVertex& v = vertices[i];
    if (v.id != i) out.push_back("vertex " + std::to_string(i) + " has id " + std::to_string(v.id));
    std::vector<FacetKey> sorted = v.tri_list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      out.push_back("vertex " + std::to_string(i) + " tri_list has duplicates");
    }
    for (const FacetKey& k : v.tri_list) {
      if (!map.find_facet(k)) out.push_back("vertex " + std::to_string(i) + " lists dead facet " + describe(k));
      if (!k.contains(static_cast<VertexId>(i))) {
        out.push_back("vertex " + std::to_string(i) + " lists foreign facet " + describe(k));
      }
    }
  }

  for (const auto& [key, voxel] : map.voxels()) {
    for (VertexId id : voxel.vertex_ids) {
      if (id >= vertices.size()) {
        out.push_back("voxel lists unknown vertex " + std::to_string(id));
      } else if (!cell_contains(key, voxel_size, vertices[id].pos)) {
        out.push_back("vertex " + std::to_string(id) + " lies outside its voxel");
      }
    }
  }

  std::size_t region_total = 0;
  for (const auto& [key, region] : map.regions()) {
    region_total += region.facets.size();
    for (const FacetKey& k : region.facets) {
      const TriangleFacet* f = map.find_facet(k);
      if (!f) {
        out.push_back("region lists dead facet " + describe(k));
      } else if (map.region_key(f->center) != key) {
        out.push_back("facet " + describe(k) + " is filed under a region not containing its center");
      }
    }
  }
  if (region_total != map.facets().size()) {
    out.push_back("regions hold " + std::to_string(region_total) + " facet entries for " +
                  std::to_string(map.facets().size()) + " facets");
  }

  for (const auto& [key, f] : map.facets()) {
    if (!(key[0] < key[1] && key[1] < key[2])) out.push_back("facet " + describe(key) + " key not increasing");
    if (f.key != key) out.push_back("facet " + describe(key) + " stored under another key");
    bool ids_ok = true;
    for (VertexId id : key.ids()) {
      if (id >= vertices.size()) {
        out.push_back("facet " + describe(key) + " references unknown vertex " + std::to_string(id));
        ids_ok = false;
        continue;
      }
      const auto& list = vertices[id].tri_list;
      if (std::count(list.begin(), list.end(), key) != 1) {
        out.push_back("facet " + describe(key) + " not listed exactly once by vertex " + std::to_string(id));
      }
    }
    const Region* region = map.find_region(map.region_key(f.center));
    if (!region || !region->facets.contains(key)) out.push_back("facet " + describe(key) + " missing from its region");
    if (!ids_ok) continue;
    const Point3& a = vertices[key[0]].pos;
    const Point3& b = vertices[key[1]].pos;
    const Point3& c = vertices[key[2]].pos;
    if ((f.center - (a + b + c) / 3.0).norm() > 1e-9) out.push_back("facet " + describe(key) + " center mismatch");
    if (std::abs(f.normal.norm() - 1.0) > 1e-9) out.push_back("facet " + describe(key) + " normal not unit");
    const Vec3 e1 = (b - a).normalized();
    const Vec3 e2 = (c - a).normalized();
    if (std::abs(f.normal.dot(e1)) > 1e-6 || std::abs(f.normal.dot(e2)) > 1e-6) {
      out.push_back("facet " + describe(key) + " normal not orthogonal to its plane");
    }
  }
  return out;
}

}  // namespace vmesh
