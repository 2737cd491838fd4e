#include "vmesh/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace vmesh {

Pose Pose::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  Pose pose;
  pose.rotation = q.normalized().toRotationMatrix();
  pose.translation = t;
  return pose;
}

Pose Pose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // Looking straight along `up`; any horizontal axis works.
    right = forward.cross(Vec3::UnitX());
    if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitY());
  }
  right.normalize();
  Vec3 down = forward.cross(right);
  Pose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  return pose;
}

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 should_be_identity = rotation.transpose() * rotation;
  if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Eigen::Matrix4d Pose::homogeneous() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

namespace {

void orient_by_convention(Eigen::Ref<Vec3> v) {
  constexpr double kEps = 1e-12;
  double decisive = v.z();
  if (std::abs(decisive) <= kEps) {
    decisive = std::abs(v.x()) > kEps ? v.x() : v.y();
  }
  if (decisive < 0.0) v = -v;
}

}  // namespace

SymEigen3 eig_sym3(const Mat3& a) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver(a, Eigen::ComputeEigenvectors);
  // Eigen returns ascending order.
  const Vec3 asc_values = solver.eigenvalues();
  const Mat3 asc_vectors = solver.eigenvectors();

  SymEigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values(i) = asc_values(2 - i);
    out.vectors.col(i) = asc_vectors.col(2 - i).normalized();
  }
  Vec3 u1 = out.vectors.col(0);
  Vec3 u3 = out.vectors.col(2);
  orient_by_convention(u1);
  orient_by_convention(u3);
  out.vectors.col(0) = u1;
  out.vectors.col(1) = u3.cross(u1).normalized();
  out.vectors.col(2) = u3;
  return out;
}

Mat3 PlaneStats::covariance() const {
  if (count_ == 0) return Mat3::Zero();
  return scatter_ / static_cast<double>(count_);
}

void PlaneStats::add_no_refresh(const Point3& p) {
  // Welford update of mean and scatter.
  ++count_;
  const Vec3 delta = p - mean_;
  mean_ += delta / static_cast<double>(count_);
  scatter_ += delta * (p - mean_).transpose();
}

void PlaneStats::add(const Point3& p) {
  add_no_refresh(p);
  refresh();
}

void PlaneStats::add(std::span<const Point3> points) {
  if (points.empty()) return;
  PlaneStats batch;
  for (const auto& p : points) batch.add_no_refresh(p);
  merge(batch);
}

void PlaneStats::merge(const PlaneStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    count_ = other.count_;
    mean_ = other.mean_;
    scatter_ = other.scatter_;
    refresh();
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Vec3 delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  scatter_ += other.scatter_ + delta * delta.transpose() * (na * nb / n);
  count_ += other.count_;
  refresh();
}

void PlaneStats::refresh() {
  // Keep the scatter exactly symmetric so the eigensolver sees a symmetric input.
  scatter_ = 0.5 * (scatter_ + scatter_.transpose()).eval();
  eigen_ = eig_sym3(covariance());
}

PlaneStats PlaneStats::from_points(std::span<const Point3> points) {
  PlaneStats stats;
  stats.add(points);
  return stats;
}

PlaneStats incremental_plane_stats(PlaneStats stats, std::span<const Point3> new_points) {
  stats.add(new_points);
  return stats;
}

}  // namespace vmesh
