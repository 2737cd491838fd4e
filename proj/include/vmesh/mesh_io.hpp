#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vmesh/broadcaster.hpp"

namespace vmesh {

enum class MeshFormat { PlyBinary, PlyAscii, Obj };

/// Picks the format from the extension (.ply or .obj). PLY is binary unless `ascii`.
/// Throws InputError for other extensions.
MeshFormat mesh_format_for(const std::filesystem::path& path, bool ascii = false);

/// Plain indexed triangle mesh.
struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
};

TriMesh to_tri_mesh(const MeshSnapshot& snapshot);

/// Writes the snapshot with dense vertex indices and a sidecar `<path>.idmap`
/// whose line i holds the global vertex id of dense index i. Face winding
/// follows the published order. Binary PLY stores double coordinates.
/// Throws InputError naming the path on I/O failure.
void export_mesh(const MeshSnapshot& snapshot, const std::filesystem::path& path, MeshFormat format);

/// Writes a plain mesh (faces may be empty for point clouds) without an id map.
void write_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format);

/// Reads ASCII or binary little-endian PLY and OBJ triangle meshes. Polygons
/// with more than 3 corners are fan-triangulated. Throws InputError on malformed input.
TriMesh read_mesh(const std::filesystem::path& path);

}  // namespace vmesh
