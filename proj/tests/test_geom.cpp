#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vmesh/geom.hpp"

using namespace vmesh;

TEST(EigSym3, DiagonalSortedDescending) {
  Mat3 a = Vec3(1.0, 5.0, 3.0).asDiagonal();
  const SymEigen3 e = eig_sym3(a);
  EXPECT_NEAR(e.values(0), 5.0, 1e-12);
  EXPECT_NEAR(e.values(1), 3.0, 1e-12);
  EXPECT_NEAR(e.values(2), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(e.u1().y()), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(e.u3().x()), 1.0, 1e-12);
}

TEST(EigSym3, RightHandedAndSignConvention) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = test::random_points_3d(rng, 20);
    const PlaneStats s = PlaneStats::from_points(pts);
    const SymEigen3& e = s.eigen();
    EXPECT_NEAR(e.vectors.determinant(), 1.0, 1e-9);
    EXPECT_GE(e.values(0), e.values(1));
    EXPECT_GE(e.values(1), e.values(2));
    EXPECT_GT(e.u3().z(), 0.0);
    EXPECT_GT(e.u1().z(), 0.0);
    const Mat3 recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LT((recon - s.covariance()).norm(), 1e-12);
  }
}

TEST(PlaneStats, PlaneNormalRecovered) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Vec3 n = Vec3(1.0, 2.0, 3.0).normalized();
  const Vec3 t1 = n.unitOrthogonal();
  const Vec3 t2 = n.cross(t1);
  std::vector<Point3> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(Vec3(4, 5, 6) + d(rng) * t1 + 2.0 * d(rng) * t2);
  const PlaneStats s = PlaneStats::from_points(pts);
  EXPECT_NEAR(std::abs(s.normal().dot(n)), 1.0, 1e-9);
  EXPECT_NEAR(s.eigen().values(2), 0.0, 1e-12);
}

// Property: incremental, batched and merged statistics agree with a direct two-pass computation.
TEST(PlaneStats, IncrementalMatchesTwoPass) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = test::random_points_3d(rng, 1 + static_cast<int>(rng() % 60), -10.0, 10.0);
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Mat3 cov = Mat3::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(pts.size());

    PlaneStats one;
    for (const auto& p : pts) one.add(p);
    const std::size_t half = pts.size() / 2;
    PlaneStats a = PlaneStats::from_points(std::span(pts).first(half));
    const PlaneStats b = PlaneStats::from_points(std::span(pts).subspan(half));
    a.merge(b);
    const PlaneStats inc = incremental_plane_stats(PlaneStats::from_points(std::span(pts).first(half)),
                                                   std::span(pts).subspan(half));

    for (const PlaneStats* s : std::array<const PlaneStats*, 3>{&one, &a, &inc}) {
      EXPECT_EQ(s->count(), static_cast<std::int64_t>(pts.size()));
      EXPECT_LT((s->mean() - mean).norm(), 1e-10);
      EXPECT_LT((s->covariance() - cov).norm(), 1e-9);
    }
  }
}

TEST(PlaneStats, EmptyMergeIsIdentity) {
  PlaneStats a;
  a.add(Point3(1, 2, 3));
  a.merge(PlaneStats{});
  EXPECT_EQ(a.count(), 1);
  PlaneStats empty;
  empty.merge(a);
  EXPECT_EQ(empty.count(), 1);
  EXPECT_TRUE(empty.mean().isApprox(Point3(1, 2, 3)));
}

TEST(Pose, QuaternionRoundTripAndInverse) {
  const Eigen::Quaterniond q = Eigen::Quaterniond(0.3, -0.2, 0.9, 0.1).normalized();
  const Pose p = Pose::from_quaternion(q, Vec3(1, -2, 3));
  EXPECT_TRUE(p.is_valid());
  EXPECT_NEAR(std::abs(p.quaternion().dot(q)), 1.0, 1e-12);
  const Point3 x(0.5, 0.25, -4.0);
  EXPECT_LT((transform_point(p.inverse(), transform_point(p, x)) - x).norm(), 1e-12);
  EXPECT_LT((p.homogeneous() * p.inverse().homogeneous() - Eigen::Matrix4d::Identity()).norm(), 1e-12);
}

TEST(Pose, LookAtAxes) {
  const Vec3 eye(1, 2, 5);
  const Vec3 target(4, 6, 0);
  const Pose p = Pose::look_at(eye, target);
  EXPECT_TRUE(p.is_valid());
  const Vec3 forward = p.rotation.col(2);
  EXPECT_LT((forward - (target - eye).normalized()).norm(), 1e-12);
  EXPECT_NEAR(p.rotation.col(0).z(), 0.0, 1e-12);  // x horizontal
  EXPECT_LT(p.rotation.col(1).z(), 0.0);            // y points down
  EXPECT_TRUE(p.translation.isApprox(eye));
}

TEST(Pose, InvalidRotationRejected) {
  Pose p;
  p.rotation(0, 0) = 2.0;
  EXPECT_FALSE(p.is_valid());
  Pose mirror;
  mirror.rotation(2, 2) = -1.0;
  EXPECT_FALSE(mirror.is_valid());
}
