#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hcube/covering.hpp"

using namespace hcube;

namespace {

const WeightSequence kHalves = WeightSequence::geometric(0.5, 0.5);

std::vector<Cylinder> cells_of(const Covering& c) {
  std::vector<Cylinder> out;
  c.for_each_cell([&](const Cylinder& k) { out.push_back(k); });
  return out;
}

}  // namespace

TEST(GridSpec, WorkedExample) {
  const auto s = grid_spec(kHalves, 0.3);
  EXPECT_EQ(s.n, 2u);
  EXPECT_EQ(s.m, 3u);
  EXPECT_LT(s.cell_diameter, 0.3);
  const auto c = grid_covering(kHalves, 0.3);
  EXPECT_EQ(c.cell_count(), 9.0);
  EXPECT_NEAR(c.total_volume(), 1.0, 1e-12);
  const auto cells = cells_of(c);
  ASSERT_EQ(cells.size(), 9u);
  double sum = 0.0;
  for (const auto& k : cells) {
    EXPECT_NEAR(k.volume(), 1.0 / 9.0, 1e-15);
    EXPECT_LT(k.diameter(kHalves), 0.3);
    sum += k.volume();
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(GridSpec, LargeDeltaGivesTheCube) {
  const auto c = grid_covering(kHalves, 0.6);
  EXPECT_EQ(c.grid_n, 0u);
  EXPECT_EQ(c.cell_count(), 1.0);
  EXPECT_EQ(c.total_volume(), 1.0);
  const auto cells = cells_of(c);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].source() == BasicCylinder::cube());
  EXPECT_THROW(grid_spec(kHalves, 0.0), InvalidArgument);
}

TEST(GridCovering, DefaultScheduleIsAPartition) {
  for (double delta : {0.5, 0.3, 0.2, 0.1}) {
    const auto c = grid_covering(kHalves, delta);
    EXPECT_NEAR(c.total_volume(), 1.0, 1e-12);
    const auto v = validate_covering(c, 2000, kHalves);
    EXPECT_TRUE(v.pass) << "delta " << delta;
    EXPECT_EQ(v.misses, 0u);
    EXPECT_LT(v.max_diameter, delta);
  }
}

TEST(GridCovering, BudgetIsEnforced) {
  try {
    (void)grid_covering(kHalves, 0.05, 10);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.budget(), 10u);
    EXPECT_GT(e.required(), 10.0);
  }
}

TEST(ValidateCovering, DeletedCellLeavesAWitness) {
  auto c = grid_covering(kHalves, 0.3);
  c.groups[0].excluded.push_back(IndexBox{{1, 1}, {1, 1}});
  EXPECT_EQ(c.cell_count(), 8.0);
  const auto v = validate_covering(c, 10'000, kHalves);
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.misses, 0u);
  ASSERT_TRUE(v.witness);
  EXPECT_GT((*v.witness)[0], 1.0 / 3.0);
  EXPECT_LT((*v.witness)[0], 2.0 / 3.0);
  EXPECT_GT((*v.witness)[1], 1.0 / 3.0);
  EXPECT_LT((*v.witness)[1], 2.0 / 3.0);
}

TEST(IndexBoxes, UnionSizeByInclusionExclusion) {
  const std::vector<IndexBox> boxes{{{0, 0}, {2, 2}}, {{1, 1}, {3, 3}}, {{2, 2}, {2, 2}}};
  EXPECT_EQ(detail::union_size(boxes), 9.0 + 9.0 - 4.0);
}

TEST(RestrictedGrid, CountsIntersectingCells) {
  const CylinderUnion half{{BasicCylinder({Edge::left_anchored(0.5)})}};
  const auto c = restricted_grid_covering(half, kHalves, 0.3);  // n = 2, m = 3
  EXPECT_EQ(c.cell_count(), 6.0);
  EXPECT_NEAR(c.total_volume(), 6.0 / 9.0, 1e-15);
  EXPECT_TRUE(validate_covering(c, 4000, kHalves).pass);

  // Overlapping members share cells; each cell is counted once.
  const CylinderUnion two{{BasicCylinder({Edge::left_anchored(0.5)}), BasicCylinder({Edge::left_anchored(0.6)})}};
  EXPECT_EQ(restricted_grid_covering(two, kHalves, 0.3).cell_count(), 6.0);

  const CylinderUnion slice{{BasicCylinder({Edge::singleton(0.5)})}};
  const auto s = restricted_grid_covering(slice, kHalves, 0.3);
  EXPECT_EQ(s.cell_count(), 3.0);
  EXPECT_TRUE(validate_covering(s, 1000, kHalves).pass);
}

TEST(EfficientCovering, WorkedExample) {
  const BasicCylinder j({Edge::interior(0.2, 0.7)});
  const auto plan = plan_efficient_covering(j, 0.1);
  EXPECT_EQ(plan.count, 6.0);
  EXPECT_EQ(plan.per_axis, std::vector<std::size_t>{6});
  EXPECT_NEAR(plan.count * volume(plan.j_star), 0.6, 1e-15);
  EXPECT_THROW(plan_efficient_covering(j, 0.5), InvalidArgument);
  EXPECT_THROW(plan_efficient_covering(j, 0.0), InvalidArgument);

  const Cylinder k(j, Isometry::identity());
  const auto c = efficient_covering(k, 0.7, 0.1, kHalves);
  EXPECT_LE(c.total_volume(), 0.5 + 0.1 + 1e-12);
  EXPECT_TRUE(validate_covering(c, 10'000, kHalves).pass);

  const auto tight = efficient_covering(k, 0.7, 0.01, kHalves);
  EXPECT_LE(tight.total_volume(), 0.51 + 1e-12);
  EXPECT_GE(tight.cell_count(), c.cell_count());
  EXPECT_TRUE(validate_covering(tight, 10'000, kHalves).pass);
}

TEST(EfficientCovering, DegenerateCylinderHasZeroVolume) {
  const BasicCylinder j({Edge::left_anchored(0.4), Edge::singleton(0.3)});
  const auto c = efficient_covering(Cylinder(j, Isometry::identity()), 0.7, 0.05, kHalves);
  EXPECT_EQ(c.total_volume(), 0.0);
  for (const auto& k : cells_of(c)) EXPECT_EQ(k.volume(), 0.0);
  EXPECT_TRUE(validate_covering(c, 2000, kHalves).pass);
}

TEST(EfficientCovering, SmallDeltaIsAPreconditionFailure) {
  const Cylinder k(BasicCylinder({Edge::interior(0.2, 0.7)}), Isometry::identity());
  EXPECT_THROW(efficient_covering(k, 0.05, 0.1, kHalves), PreconditionFailed);
  EXPECT_THROW(efficient_covering(Cylinder(BasicCylinder::cube(), {}), 0.5, 0.05, kHalves), PreconditionFailed);
  EXPECT_NEAR(efficient_covering(Cylinder(BasicCylinder::cube(), {}), 0.6, 0.05, kHalves).total_volume(), 1.0, 0);
}

TEST(EfficientCovering, MonotoneInEpsilonAndFaceOverlaps) {
  const BasicCylinder j({Edge::right_anchored(0.35), Edge::interior(0.1, 0.55), Edge::left_anchored(0.8)});
  double previous = 0.0;
  for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01}) {
    const auto b = choose_b_star(j, eps);
    const auto plan = plan_efficient_covering(j, b);
    EXPECT_LE(plan.count * volume(plan.j_star), volume(j) + eps + 1e-12);
    EXPECT_GE(plan.count, previous) << "eps " << eps;
    previous = plan.count;
  }
  const auto c = efficient_covering(Cylinder(j, {}), 1.0, 0.2, kHalves);
  const auto cells = cells_of(c);
  ASSERT_LE(cells.size(), 200u);
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      // Translated cells live in their own source frame; compare boxes in J's frame.
      const Box ba = image_bounds(cells[a].map(), cells[a].source().box());
      const Box bb = image_bounds(cells[b].map(), cells[b].source().box());
      bool positive = true;
      for (std::size_t i = 0; i < std::max(ba.explicit_size(), bb.explicit_size()); ++i) {
        const double lo = std::max(ba.edge(i).lo, bb.edge(i).lo);
        const double hi = std::min(ba.edge(i).hi, bb.edge(i).hi);
        if (hi - lo <= 1e-12) positive = false;
      }
      EXPECT_FALSE(positive) << "cells " << a << " and " << b << " overlap with positive volume";
    }
  }
}

TEST(CoverImageUnion, IdentityIsPlainRefinement) {
  const CylinderUnion u{{BasicCylinder({Edge::left_anchored(0.3)}), BasicCylinder({Edge::right_anchored(0.6)})}};
  const auto c = cover_image_union(u, Isometry::identity(), 0.2, kHalves);
  EXPECT_NEAR(c.total_volume(), 0.7, 1e-12);
  EXPECT_LT(c.max_diameter(kHalves), 0.2);
  EXPECT_TRUE(validate_covering(c, 5000, kHalves).pass);
}

TEST(CoverImageUnion, NestedMembersAreNotDoubleCounted) {
  const CylinderUnion u{{BasicCylinder({Edge::left_anchored(0.6)}), BasicCylinder({Edge::interior(0.1, 0.3)})}};
  const auto c = cover_image_union(u, Isometry::identity(), 0.3, kHalves);
  EXPECT_NEAR(c.total_volume(), 0.6, 1e-12);
}

TEST(CoverImageUnion, MappingAndPullingBackPreservesVolume) {
  const Point centre = Point::constant(0.5);
  const WeightSequence w({0.5, 0.5}, 0.25, 0.5);
  const Isometry rot(centre, centre, {Rotation{0, 1, 0.6}});
  const CylinderUnion u{{BasicCylinder({Edge::interior(0.3, 0.6), Edge::interior(0.35, 0.7)})}};
  const auto direct = cover_image_union(u, Isometry::identity(), 0.1, w);
  const auto image = cover_image_union(u, rot, 0.1, w);
  const auto back = map_covering(image, inverse(rot));
  EXPECT_NEAR(image.total_volume(), direct.total_volume(), 1e-12);
  EXPECT_NEAR(back.total_volume(), direct.total_volume(), 1e-12);
  EXPECT_TRUE(validate_covering(image, 3000, w).pass);
  EXPECT_TRUE(validate_covering(back, 3000, w).pass);
  const auto cells = cells_of(image);
  for (const auto& k : cells) EXPECT_LT(k.diameter(w), 0.1);
}

TEST(CoverImageUnion, SwapWithEqualWeightsKeepsVolume) {
  const Point centre = Point::constant(0.5);
  const WeightSequence w({0.5, 0.5}, 0.25, 0.5);
  const Isometry swap(centre, centre, {Permutation{{{0, 1}, {1, 0}}}});
  const CylinderUnion u{{BasicCylinder({Edge::left_anchored(0.5)})}};
  EXPECT_NEAR(cover_image_union(u, swap, 0.2, w).total_volume(), 0.5, 1e-12);
}

TEST(Refinement, PartsReachTheDiameter) {
  const BasicCylinder j({Edge::interior(0.1, 0.9), Edge::full(), Edge::singleton(0.4)});
  for (double delta : {0.3, 0.1, 0.05}) {
    const auto parts = refinement_parts(j, kHalves, delta);
    EXPECT_EQ(parts[2], 1u);
    const auto g = detail::refinement_group(j, parts);
    EXPECT_LT(g.base.diameter(kHalves), delta);
  }
  EXPECT_THROW(refinement_parts(j, kHalves, 0.01, 100), BudgetExceeded);
}
