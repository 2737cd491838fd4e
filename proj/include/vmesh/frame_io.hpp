#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vmesh/geom.hpp"

namespace vmesh {

/// Frame file: little-endian uint32 point count, then count x (x, y, z) float32.
void write_frame(const std::filesystem::path& path, std::span<const Point3> points);
std::vector<Point3> read_frame(const std::filesystem::path& path);

/// Regular files in `dir` with the given extension, sorted by file name.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir, const std::string& ext = ".bin");

struct StampedPose {
  double timestamp = 0.0;
  Pose pose;
};

/// Lines "timestamp tx ty tz qx qy qz qw"; '#' starts a comment. Timestamps must
/// strictly increase and quaternions be unit length within 1e-6.
std::vector<StampedPose> read_trajectory(std::istream& is);
std::vector<StampedPose> read_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& os, std::span<const StampedPose> poses);

/// Flat "key = value" lines; '#' starts a comment. Throws InputError on
/// malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::istream& is);

}  // namespace vmesh
