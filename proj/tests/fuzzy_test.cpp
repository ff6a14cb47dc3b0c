#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "osa/fuzzy.hpp"

using namespace osa;

TEST(MembershipFunction, TriangleExamples) {
  const auto tri = MembershipFunction::triangle(0, 5, 10);
  EXPECT_DOUBLE_EQ(eval_mf(tri, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_mf(tri, 2.5), 0.5);
  EXPECT_DOUBLE_EQ(eval_mf(tri, 7.5), 0.5);
  EXPECT_DOUBLE_EQ(eval_mf(tri, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_mf(tri, 10.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_mf(tri, -1.0), 0.0);
}

TEST(MembershipFunction, TrapezoidExamples) {
  const auto trap = MembershipFunction::trapezoid(0, 0, 25, 50);
  EXPECT_DOUBLE_EQ(trap(60.0), 0.0);
  EXPECT_DOUBLE_EQ(trap(25.0), 1.0);
  EXPECT_DOUBLE_EQ(trap(10.0), 1.0);
  EXPECT_DOUBLE_EQ(trap(37.5), 0.5);
  EXPECT_DOUBLE_EQ(trap(50.0), 0.0);
}

TEST(MembershipFunction, ZeroWidthEdgeTakesPlateauValue) {
  EXPECT_DOUBLE_EQ(MembershipFunction::trapezoid(0, 0, 25, 50)(0.0), 1.0);
  EXPECT_DOUBLE_EQ(MembershipFunction::trapezoid(50, 75, 100, 100)(100.0), 1.0);
  const auto spike = MembershipFunction::triangle(3, 3, 3);
  EXPECT_DOUBLE_EQ(spike(3.0), 1.0);
  EXPECT_DOUBLE_EQ(spike(3.0001), 0.0);
}

TEST(MembershipFunction, RejectsUnorderedBreakpoints) {
  EXPECT_THROW(MembershipFunction::triangle(5, 2, 8), ConfigError);
  EXPECT_THROW(MembershipFunction::trapezoid(0, 10, 5, 20), ConfigError);
  EXPECT_THROW(MembershipFunction::from_breakpoints({1, 2}), ConfigError);
  try {
    MembershipFunction::triangle(5, 2, 8);
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "breakpoints not ordered");
  }
}

TEST(MembershipFunction, PropertyBoundedAndLipschitz) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-50.0, 150.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
    std::sort(p.begin(), p.end());
    const auto mf = (trial % 2) ? MembershipFunction::trapezoid(p[0], p[1], p[2], p[3])
                                : MembershipFunction::triangle(p[0], p[1], p[3]);
    const double w = mf.min_edge_width();
    for (int i = 0; i < 20; ++i) {
      const double x = u(rng);
      const double y = mf(x);
      ASSERT_GE(y, 0.0);
      ASSERT_LE(y, 1.0);
      if (w > 0.0 && x > p[0] && x < p[3]) {
        const double eps = 1e-7;
        ASSERT_LE(std::abs(mf(x + eps) - y), eps / w * (1 + 1e-6) + 1e-15);
      }
    }
  }
}

TEST(Fuzzify, DefaultUtilizationExamples) {
  const auto var = default_utilization_variable();
  auto f = fuzzify(var, 0.0);
  EXPECT_DOUBLE_EQ(f.degree("Low"), 1.0);
  EXPECT_DOUBLE_EQ(f.degree("Moderate"), 0.0);
  EXPECT_DOUBLE_EQ(f.degree("High"), 0.0);

  f = fuzzify(var, 50.0);
  EXPECT_DOUBLE_EQ(f.degree("Low"), 0.0);
  EXPECT_DOUBLE_EQ(f.degree("Moderate"), 1.0);
  EXPECT_DOUBLE_EQ(f.degree("High"), 0.0);

  // Hand evaluation: Low = (50 - 37.5) / 25, Moderate = (37.5 - 25) / 25.
  f = fuzzify(var, 37.5);
  EXPECT_DOUBLE_EQ(f.degree("Low"), 0.5);
  EXPECT_DOUBLE_EQ(f.degree("Moderate"), 0.5);
  EXPECT_DOUBLE_EQ(f.degree("High"), 0.0);
}

TEST(Fuzzify, ClampsOutOfDomainInputs) {
  const auto var = default_distance_variable();
  EXPECT_EQ(fuzzify(var, -3.0).degrees, fuzzify(var, 0.0).degrees);
  EXPECT_EQ(fuzzify(var, 12.8).degrees, fuzzify(var, 10.0).degrees);
  EXPECT_DOUBLE_EQ(fuzzify(var, 12.8).degree("Far"), 1.0);
}

TEST(Fuzzify, LabelsMatchVariable) {
  const auto var = default_mobility_variable();
  const auto f = fuzzify(var, 3.3);
  ASSERT_EQ(f.labels.size(), var.size());
  for (std::size_t i = 0; i < var.size(); ++i) EXPECT_EQ(f.labels[i], var.levels()[i].label);
  EXPECT_THROW(f.degree("Near"), ConfigError);
}

TEST(Fuzzify, DefaultPartitionsSumToOne) {
  std::mt19937_64 rng(7);
  for (const auto& var : {default_utilization_variable(), default_mobility_variable(), default_distance_variable()}) {
    std::uniform_real_distribution<double> u(var.lo(), var.hi());
    for (int i = 0; i < 5000; ++i) {
      const auto f = fuzzify(var, u(rng));
      ASSERT_NEAR(f.sum(), 1.0, 1e-9) << var.name();
    }
    for (double x : {var.lo(), var.hi(), 0.25 * var.hi(), 0.5 * var.hi(), 0.75 * var.hi()}) {
      ASSERT_NEAR(fuzzify(var, x).sum(), 1.0, 1e-9);
    }
  }
}

TEST(LinguisticVariable, Validation) {
  const auto tri = MembershipFunction::triangle(0, 5, 10);
  EXPECT_THROW(LinguisticVariable("v", 10, 0, {{"A", tri}}), ConfigError);
  EXPECT_THROW(LinguisticVariable("v", 0, 10, {}), ConfigError);
  EXPECT_THROW(LinguisticVariable("v", 0, 10, {{"A", MembershipFunction::trapezoid(0, 0, 10, 10)}, {"A", tri}}),
               ConfigError);
  EXPECT_THROW(LinguisticVariable("v", 0, 5, {{"A", tri}}), ConfigError);  // breakpoint outside domain
  // Triangle alone leaves both domain ends uncovered.
  EXPECT_THROW(LinguisticVariable("v", 0, 10, {{"A", tri}}), ConfigError);
  // Gap between (4, 6): neither shoulder reaches it.
  EXPECT_THROW(LinguisticVariable("v", 0, 10,
                                  {{"L", MembershipFunction::trapezoid(0, 0, 2, 4)},
                                   {"H", MembershipFunction::trapezoid(6, 8, 10, 10)}}),
               ConfigError);
  // Touching at a single point where both are zero is still a gap.
  EXPECT_THROW(LinguisticVariable("v", 0, 10,
                                  {{"L", MembershipFunction::trapezoid(0, 0, 2, 5)},
                                   {"H", MembershipFunction::trapezoid(5, 8, 10, 10)}}),
               ConfigError);
  EXPECT_NO_THROW(LinguisticVariable("v", 0, 10,
                                     {{"L", MembershipFunction::trapezoid(0, 0, 2, 6)},
                                      {"H", MembershipFunction::trapezoid(5, 8, 10, 10)}}));
}

TEST(LinguisticVariable, WithLevelReplacesOneMf) {
  const auto var = default_mobility_variable();
  const auto changed = var.with_level("Moderate", MembershipFunction::triangle(2, 5, 8));
  EXPECT_EQ(changed.levels()[1].mf, MembershipFunction::triangle(2, 5, 8));
  EXPECT_EQ(changed.levels()[0].mf, var.levels()[0].mf);
  EXPECT_THROW(var.with_level("Huge", MembershipFunction::triangle(2, 5, 8)), ConfigError);
}

TEST(DiscreteCentroid, SymmetricAndSkewed) {
  EXPECT_NEAR(discrete_centroid(MembershipFunction::triangle(20, 50, 80), 0, 100), 50.0, 1e-9);
  // Continuous centroid of triangle(0, 0, 30) is 10.
  EXPECT_NEAR(discrete_centroid(MembershipFunction::triangle(0, 0, 30), 0, 100, 100001), 10.0, 1e-3);
  EXPECT_THROW(discrete_centroid(MembershipFunction::triangle(200, 210, 220), 0, 100), DomainError);
}
