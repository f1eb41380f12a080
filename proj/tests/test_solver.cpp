#include <gtest/gtest.h>

#include <cmath>

#include "conefp/solver.hpp"
#include "conefp/testbed.hpp"

using namespace conefp;

namespace {

Point at(double x) { return Point::coords(Vector::Constant(1, x)); }

Mapping half_plus_one() { return Mapping::affine(Matrix::Constant(1, 1, 0.5), Vector::Constant(1, 1.0)); }

}  // namespace

TEST(Solver, AprioriCountIsExact) {
  EXPECT_EQ(a_priori_iterations(1.0, 0.5, 1.0, 1e-6), 21u);
  EXPECT_GT(certificate_bound(1.0, 0.5, 1.0, 20), 1e-6);
  EXPECT_LE(certificate_bound(1.0, 0.5, 1.0, 21), 1e-6);
}

TEST(Solver, AprioriEdgeCases) {
  EXPECT_EQ(a_priori_iterations(1.0, 0.5, 0.0, 1e-6), 0u);
  EXPECT_EQ(a_priori_iterations(1.0, 0.0, 1.0, 1e-6), 1u);
  EXPECT_EQ(a_priori_iterations(2.0, 0.5, 1e-9, 1e-6), 0u);
  EXPECT_THROW(a_priori_iterations(1.0, 1.0, 1.0, 1e-6), HypothesisFailure);
  EXPECT_THROW(a_priori_iterations(0.5, 0.5, 1.0, 1e-6), ContractViolation);
  EXPECT_THROW(a_priori_iterations(1.0, 0.5, 1.0, 0.0), ContractViolation);
}

TEST(Solver, AprioriIsMinimalAcrossParameters) {
  for (double k : {1.0, 1.5, 3.0})
    for (double beta : {0.1, 0.5, 0.9, 0.99})
      for (double eps : {1e-3, 1e-8, 1e-12}) {
        const auto n = a_priori_iterations(k, beta, 2.0, eps);
        EXPECT_LE(certificate_bound(k, beta, 2.0, n), eps);
        if (n > 0) EXPECT_GT(certificate_bound(k, beta, 2.0, n - 1), eps);
      }
}

TEST(Solver, BanachLine) {
  const auto space = make_scalar_line();
  const auto r = picard_solve(space, half_plus_one(), 1.0, 0.5, at(0.0), 1e-8);
  EXPECT_NEAR(r.point.coords()(0), 2.0, 1e-8);
  EXPECT_LE(r.residual_norm, 1e-8);
  EXPECT_EQ(r.iterations_used, r.certificate.n_planned);
}

TEST(Solver, ResidualAtTwentyOneIterations) {
  const auto space = make_scalar_line();
  const auto r = picard_solve(space, half_plus_one(), 1.0, 0.5, at(0.0), 1e-6);
  EXPECT_EQ(r.iterations_used, 21u);
  EXPECT_LE(r.residual_norm, 1e-6);
}

TEST(Solver, ExactFixedPointStopsEarly) {
  const auto space = make_scalar_space({"a", "b", "c"});
  const auto T = Mapping::table({0, 0, 1});
  const auto r = picard_solve(space, T, 1.0, 0.5, Point::label(2), 1e-12);
  EXPECT_EQ(r.point.index(), 0u);
  EXPECT_EQ(r.residual_norm, 0.0);
  EXPECT_EQ(r.iterations_used, 2u);
}

TEST(Solver, RotationScaling) {
  const auto space = make_lifted_space(2, Cone::orthant(Space(2, NormKind::Two)), Vector::Ones(2));
  Matrix R(2, 2);
  R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  Vector c(2);
  c << 1, -2;
  const auto T = Mapping::affine(0.6 * R, c);
  Vector x0 = Vector::Zero(2);
  const auto r = picard_solve(space, T, 1.0, 0.6 + 1e-3, Point::coords(x0), 1e-10);
  EXPECT_NEAR(r.point.coords()(0), 2.9719301, 1e-6);
  EXPECT_NEAR(r.point.coords()(1), -1.57321456, 1e-6);
}

TEST(Solver, UnderstatedBetaDoesNotConverge) {
  const auto space = make_scalar_line();
  const auto T = Mapping::affine(Matrix::Constant(1, 1, 0.9), Vector::Constant(1, 1.0));
  try {
    picard_solve(space, T, 1.0, 0.1, at(0.0), 1e-8);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_GT(e.residual_norm(), 1e-8);
    EXPECT_FALSE(e.trace().step_norms.empty());
    EXPECT_EQ(e.trace().points.size(), e.trace().step_norms.size() + 1);
  }
}

TEST(Solver, MaxIterCapsTheRun) {
  const auto space = make_scalar_line();
  SolveOptions o;
  o.max_iter = 3;
  EXPECT_THROW(picard_solve(space, half_plus_one(), 1.0, 0.5, at(0.0), 1e-8, o), NonConvergence);
}

TEST(Solver, TraceAndProofBounds) {
  const auto space = make_scalar_line();
  SolveOptions o;
  o.record_trace = true;
  const auto r = picard_solve(space, half_plus_one(), 1.0, 0.5, at(-7.0), 1e-10, o);
  ASSERT_TRUE(r.trace.has_value());
  const auto audit = verify_proof_bounds(space, *r.trace, 1.0, 0.5, 10);
  EXPECT_TRUE(audit.ok());
  EXPECT_GT(audit.checks, 0u);

  // Claiming a faster rate than the map has must show up as violations.
  const auto bad = verify_proof_bounds(space, *r.trace, 1.0, 0.2, 10);
  EXPECT_FALSE(bad.ok());
  EXPECT_EQ(bad.violations.front().kind, "step");
}

TEST(Solver, UniquenessProbe) {
  const auto space = make_scalar_line();
  const auto probe = uniqueness_probe(space, half_plus_one(), 1.0, 0.5, {at(-10), at(0), at(3), at(1e3)}, 1e-9);
  EXPECT_TRUE(probe.unique);
  EXPECT_EQ(probe.runs.size(), 4u);
  EXPECT_THROW(uniqueness_probe(space, half_plus_one(), 1.0, 0.5, {at(0)}, 1e-9), ContractViolation);
}

TEST(Solver, IdentityHasManyLimits) {
  const auto space = make_scalar_space({"a", "b"});
  const auto id = Mapping::table({0, 1});
  EXPECT_EQ(brute_force_fixed_points(space, id).size(), 2u);
  const auto probe = uniqueness_probe(space, id, 1.0, 0.5, space.points(), 1e-9);
  EXPECT_FALSE(probe.unique);
}
