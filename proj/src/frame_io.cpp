#include "vmesh/frame_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "vmesh/errors.hpp"

namespace vmesh {

static_assert(std::endian::native == std::endian::little, "frame I/O assumes a little-endian host");

void write_frame(const std::filesystem::path& path, std::span<const Point3> points) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError(path.string() + ": cannot open for writing");
  const auto count = static_cast<std::uint32_t>(points.size());
  os.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& p : points) {
    const float xyz[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
    os.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
  if (!os) throw InputError(path.string() + ": write failed");
}

std::vector<Point3> read_frame(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError(path.string() + ": cannot open for reading");
  std::uint32_t count = 0;
  if (!is.read(reinterpret_cast<char*>(&count), sizeof(count))) throw InputError(path.string() + ": missing point count");
  const auto expected = sizeof(count) + static_cast<std::uintmax_t>(count) * 3 * sizeof(float);
  if (std::filesystem::file_size(path) != expected) {
    throw InputError(path.string() + ": size does not match point count " + std::to_string(count));
  }
  std::vector<float> raw(static_cast<std::size_t>(count) * 3);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!is) throw InputError(path.string() + ": truncated point data");
  std::vector<Point3> points;
  points.reserve(count);
  for (std::size_t i = 0; i < raw.size(); i += 3) points.emplace_back(raw[i], raw[i + 1], raw[i + 2]);
  return points;
}

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir, const std::string& ext) {
  if (!std::filesystem::is_directory(dir)) throw InputError(dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return files;
}

std::vector<StampedPose> read_trajectory(std::istream& is) {
  std::vector<StampedPose> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    StampedPose sp;
    Vec3 t;
    Eigen::Quaterniond q;
    if (!(ls >> sp.timestamp)) continue;
    auto fail = [&](const std::string& what) { return InputError("trajectory line " + std::to_string(line_no) + ": " + what); };
    if (!(ls >> t.x() >> t.y() >> t.z() >> q.x() >> q.y() >> q.z() >> q.w())) {
      throw fail("expected 'timestamp tx ty tz qx qy qz qw'");
    }
    if (!t.allFinite() || !q.coeffs().allFinite() || std::abs(q.norm() - 1.0) > 1e-6) throw fail("invalid pose");
    if (!out.empty() && !(sp.timestamp > out.back().timestamp)) throw fail("timestamps must strictly increase");
    sp.pose = Pose::from_quaternion(q.normalized(), t);
    out.push_back(sp);
  }
  return out;
}

std::vector<StampedPose> read_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError(path.string() + ": cannot open for reading");
  try {
    return read_trajectory(is);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_trajectory(std::ostream& os, std::span<const StampedPose> poses) {
  os.precision(17);
  for (const auto& sp : poses) {
    const Eigen::Quaterniond q = sp.pose.quaternion();
    const Vec3& t = sp.pose.translation;
    os << sp.timestamp << ' ' << t.x() << ' ' << t.y() << ' ' << t.z() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z()
       << ' ' << q.w() << '\n';
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? std::string{} : trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
      throw InputError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

}  // namespace vmesh
