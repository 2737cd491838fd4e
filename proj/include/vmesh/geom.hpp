#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vmesh {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Point3 = Eigen::Vector3d;

inline bool is_finite(const Vec3& p) { return p.allFinite(); }

/// Rigid sensor-to-world transform. `rotation` must be a proper rotation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);
  /// Camera-style pose at `eye` whose +z axis points at `target`, with +x
  /// horizontal (perpendicular to world `up`) and +y pointing downward.
  static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

  /// Orthonormal with det +1 within `tol`, translation finite.
  bool is_valid(double tol = 1e-9) const;
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation).normalized(); }
  Pose inverse() const;
  Eigen::Matrix4d homogeneous() const;
};

inline Point3 transform_point(const Pose& pose, const Point3& p) {
  return pose.rotation * p + pose.translation;
}

/// Eigenpairs of a symmetric 3x3 matrix, sorted so that values(0) >= values(1) >= values(2).
/// Column i of `vectors` is the unit eigenvector for values(i). The basis is
/// right-handed; u1 and u3 follow a fixed sign convention (see eig_sym3).
struct SymEigen3 {
  Vec3 values = Vec3::Zero();
  Mat3 vectors = Mat3::Identity();

  Vec3 u1() const { return vectors.col(0); }
  Vec3 u2() const { return vectors.col(1); }
  Vec3 u3() const { return vectors.col(2); }
};

/// Symmetric eigendecomposition. Sign convention: u3 and u1 are flipped so that
/// their z component is positive, or their first nonzero component when z ~ 0;
/// u2 = u3 x u1.
SymEigen3 eig_sym3(const Mat3& a);

/// Running first/second-order statistics of a point set: count, mean, scatter
/// (sum of centered outer products) and the eigendecomposition of the
/// population covariance scatter / N.
class PlaneStats {
 public:
  PlaneStats() = default;

  std::int64_t count() const { return count_; }
  const Vec3& mean() const { return mean_; }
  Mat3 covariance() const;
  const SymEigen3& eigen() const { return eigen_; }

  Vec3 normal() const { return eigen_.u3(); }

  void add(const Point3& p);
  /// Adds a batch and refreshes the eigendecomposition once.
  void add(std::span<const Point3> points);
  /// Merge two statistics (Chan et al. pairwise update).
  void merge(const PlaneStats& other);

  static PlaneStats from_points(std::span<const Point3> points);

 private:
  void add_no_refresh(const Point3& p);
  void refresh();

  std::int64_t count_ = 0;
  Vec3 mean_ = Vec3::Zero();
  Mat3 scatter_ = Mat3::Zero();
  SymEigen3 eigen_;
};

/// Returns `stats` extended by `new_points`.
PlaneStats incremental_plane_stats(PlaneStats stats, std::span<const Point3> new_points);

}  // namespace vmesh
