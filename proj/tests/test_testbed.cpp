#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "conefp/contraction.hpp"
#include "conefp/solver.hpp"
#include "conefp/testbed.hpp"

using namespace conefp;

TEST(Testbed, BruteForceFindsFixedPoints) {
  const auto space = make_scalar_space({"a", "b", "c", "d"});
  EXPECT_EQ(brute_force_fixed_points(space, Mapping::table({0, 0, 1, 3})).size(), 2u);
  EXPECT_TRUE(brute_force_fixed_points(space, Mapping::table({1, 2, 3, 0})).empty());
  EXPECT_THROW(brute_force_fixed_points(make_scalar_line(), Mapping::affine(Matrix::Ones(1, 1), Vector::Zero(1))),
               Unsupported);
}

TEST(Testbed, PointLabelsSortNumerically) {
  EXPECT_EQ(point_label(3, 12), "p03");
  EXPECT_LT(point_label(9, 12), point_label(10, 12));
}

TEST(Testbed, WedgeNormalConstant) {
  EXPECT_DOUBLE_EQ(wedge_cone(std::numbers::pi / 3).normal_constant(), 1.0);
  EXPECT_NEAR(wedge_cone(std::numbers::pi - std::asin(0.5)).normal_constant(), 2.0, 1e-12);
  EXPECT_TRUE(validate_cone(wedge_cone(2.5)).ok());
  EXPECT_THROW(wedge_cone(0.0), ContractViolation);
}

TEST(Testbed, CertifiedInstancesPassAndHaveOneFixedPoint) {
  const Cone cones[] = {Cone::orthant(Space(2, NormKind::Infinity)), Cone::orthant(Space(3, NormKind::One)),
                        wedge_cone(2.0)};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Cone& cone = cones[seed % 3];
    const double k = cone.normal_constant();
    const auto inst = generate_certified_instance(seed, 2 + seed % 11, cone, k);
    const auto report = check_hypotheses(inst.space, inst.T, inst.coeffs, k, AllPairs{});
    EXPECT_TRUE(report.passed()) << "seed " << seed;
    EXPECT_LE(report.alpha, 0.9 / k + 1e-12);
    EXPECT_LE(report.beta, 0.9 + 1e-12);
    EXPECT_EQ(brute_force_fixed_points(inst).size(), 1u);
    EXPECT_TRUE(check_metric_axioms(inst.space, AllPairs{}).ok());
  }
}

TEST(Testbed, GeneratorIsDeterministic) {
  const Cone cone = Cone::orthant(Space(2, NormKind::Two));
  const auto a = generate_certified_instance(42, 7, cone, 1.0);
  const auto b = generate_certified_instance(42, 7, cone, 1.0);
  const auto& ta = std::get<TableMetric>(a.space.metric());
  const auto& tb = std::get<TableMetric>(b.space.metric());
  ASSERT_EQ(ta.values.size(), tb.values.size());
  for (std::size_t i = 0; i < ta.values.size(); ++i) EXPECT_EQ(ta.values[i], tb.values[i]);
  EXPECT_EQ(a.T.as_table()->image, b.T.as_table()->image);
  EXPECT_EQ(a.coeffs.as_constant()->A1, b.coeffs.as_constant()->A1);
}

TEST(Testbed, AffineInstancesConvergeToTheirFixedPoint) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_affine_instance(seed);
    EXPECT_LT(inst.lipschitz, inst.beta);
    EXPECT_LE(inst.beta, 0.9 + 1e-3);
    const auto r = picard_solve(inst.space, inst.T, inst.k, inst.beta, inst.x0, 1e-10);
    EXPECT_LE((r.point.coords() - inst.fixed_point).norm(), 1e-8 * std::max(1.0, inst.fixed_point.norm()));
  }
}

TEST(Testbed, CorollaryEquivalence) {
  const auto r = verify_corollary_equivalence(0.1, 0.2, 0.3, 0.1);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.expected_alpha, 0.8, 1e-15);
  EXPECT_NEAR(r.expected_beta, 0.4 / 0.6, 1e-15);
  EXPECT_TRUE(r.invariance_pass);
}
