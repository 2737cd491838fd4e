#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "vmesh/knn_store.hpp"
#include "vmesh/spatial_hash.hpp"

using namespace vmesh;

// Expected values computed with an independent arbitrary-precision script:
// ((x*p1 mod 2^64) ^ (y*p2 mod 2^64) ^ (z*p3 mod 2^64)) mod n.
TEST(IntHash, FrozenValues) {
  EXPECT_EQ(int_hash(1, 1, 1), 14877u);
  EXPECT_EQ(int_hash(1, 0, 0), 116101u);
  EXPECT_EQ(int_hash(0, 1, 0), 37199u);
  EXPECT_EQ(int_hash(-1, 0, 0), 44787441u);
  EXPECT_EQ(int_hash(-3, 7, -11), 617115u);
  EXPECT_EQ(int_hash(123456, -654321, 42), 34313004u);
  EXPECT_EQ(int_hash(0, 0, 0), 0u);
}

TEST(IntHash, AlwaysBelowModulus) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const auto x = static_cast<std::int64_t>(rng());
    const auto y = static_cast<std::int64_t>(rng());
    const auto z = static_cast<std::int64_t>(rng());
    EXPECT_LT(int_hash(x, y, z), HashParams{}.n);
  }
}

TEST(GridKey, FloorConvention) {
  EXPECT_EQ(grid_key(Point3(0.0, 0.39, -0.01), 0.4), (GridKey{0, 0, -1}));
  EXPECT_EQ(grid_key(Point3(0.4, -0.4, -0.41), 0.4), (GridKey{1, -1, -2}));
  EXPECT_EQ(grid_key(Point3(15.0, 29.999, -15.0), 15.0), (GridKey{1, 1, -1}));
}

// Property: every point maps into a cell that contains it.
TEST(GridKey, CellContainsItsPoints) {
  std::mt19937_64 rng(9);
  for (double s : {0.1, 0.4, 0.6, 10.0}) {
    for (const auto& p : test::random_points_3d(rng, 2000, -50.0, 50.0)) {
      const GridKey k = grid_key(p, s);
      EXPECT_TRUE(cell_contains(k, s, p));
      const Point3 lo = cell_min_corner(k, s);
      EXPECT_LE(lo.x(), p.x());
      EXPECT_LT(p.x(), lo.x() + s + 1e-12);
    }
  }
}

TEST(FacetKey, OrderingAndValidation) {
  EXPECT_NO_THROW(FacetKey(1, 2, 3));
  EXPECT_THROW(FacetKey(2, 1, 3), std::invalid_argument);
  EXPECT_THROW(FacetKey(1, 1, 3), std::invalid_argument);
  const FacetKey k = FacetKey::from_unsorted(9, 2, 5);
  EXPECT_EQ(k[0], 2u);
  EXPECT_EQ(k[1], 5u);
  EXPECT_EQ(k[2], 9u);
  EXPECT_TRUE(k.contains(5));
  EXPECT_FALSE(k.contains(3));
  EXPECT_THROW(FacetKey::from_unsorted(4, 4, 1), std::invalid_argument);
  EXPECT_EQ(triangle_key(k), int_hash(2, 5, 9));
  EXPECT_THROW(triangle_key(std::array<VertexId, 3>{3, 2, 1}), std::invalid_argument);
}

TEST(SpatialHashTable, CollidingHashesDoNotAlias) {
  // Both keys hash to 0: (0,0,0) trivially, and (n,0,0) because n*p1 mod n == 0.
  const auto n = static_cast<std::int64_t>(HashParams{}.n);
  const GridKey a{0, 0, 0};
  const GridKey b{n, 0, 0};
  ASSERT_EQ(hash_key(a), hash_key(b));
  SpatialHashTable<GridKey, int, GridKeyHasher> table;
  table.insert_or_assign(a, 1);
  table.insert_or_assign(b, 2);
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(*table.find(a), 1);
  EXPECT_EQ(*table.find(b), 2);
  auto [v, created] = table.get_or_create(a, [] { return 7; });
  EXPECT_FALSE(created);
  EXPECT_EQ(*v, 1);
  EXPECT_TRUE(table.erase(a));
  EXPECT_FALSE(table.contains(a));
  EXPECT_TRUE(table.contains(b));
}

TEST(KnnStore, EmptyStore) {
  KnnStore store(0.5);
  EXPECT_THROW(store.nearest(Point3::Zero()), EmptyStoreError);
  EXPECT_FALSE(store.try_nearest(Point3::Zero()).has_value());
  EXPECT_TRUE(store.radius(Point3::Zero(), 10.0).empty());
}

// Oracle: brute-force scan over all inserted points.
TEST(KnnStore, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (double cell : {0.05, 0.3, 2.0}) {
    KnnStore store(cell);
    std::vector<Point3> pts;
    for (int round = 0; round < 5; ++round) {
      for (const auto& p : test::random_points_3d(rng, 300, -3.0, 3.0)) {
        store.insert(static_cast<VertexId>(pts.size()), p);
        pts.push_back(p);
      }
      for (const auto& q : test::random_points_3d(rng, 100, -5.0, 5.0)) {
        double best = std::numeric_limits<double>::infinity();
        VertexId best_id = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = (pts[i] - q).norm();
          if (d < best) {
            best = d;
            best_id = static_cast<VertexId>(i);
          }
        }
        const auto nn = store.nearest(q);
        EXPECT_EQ(nn.id, best_id);
        EXPECT_DOUBLE_EQ(nn.distance, best);

        const double r = 0.7;
        std::vector<VertexId> expect;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if ((pts[i] - q).norm() <= r) expect.push_back(static_cast<VertexId>(i));
        }
        const auto got = store.radius(q, r);
        ASSERT_EQ(got.size(), expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].id, expect[i]);

        const auto within = store.nearest_within(q, 0.2);
        EXPECT_EQ(within.has_value(), best <= 0.2);
      }
    }
  }
}

TEST(KnnStore, TiesResolveToSmallerId) {
  KnnStore store(1.0);
  store.insert(5, Point3(1, 0, 0));
  store.insert(2, Point3(-1, 0, 0));
  EXPECT_EQ(store.nearest(Point3::Zero()).id, 2u);
}
