#pragma once

#include <string>
#include <vector>

#include "vmesh/voxel_map.hpp"

namespace vmesh {

/// Full cross-reference sweep of vertices, voxels, facets and regions.
/// Returns one human-readable line per violation; empty means consistent.
std::vector<std::string> check_integrity(const VoxelMap& map);

}  // namespace vmesh
