#include <gtest/gtest.h>

#include <cmath>

#include "conefp/linops.hpp"
#include "conefp/random.hpp"
#include "conefp/testbed.hpp"

using namespace conefp;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

Matrix random_matrix(Rng& rng, Eigen::Index p, double scale = 1.0) {
  Matrix M(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) M(i, j) = scale * rng.uniform(-1.0, 1.0);
  return M;
}

// max ||A v|| / ||v|| over random v: a lower bound for the induced norm.
double sampled_norm(const Matrix& A, const Space& s, Rng& rng, int n) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector v(A.cols());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.uniform(-1.0, 1.0);
    if (rng.coin(0.3)) v = v.array().sign().matrix();  // vertices of the max-norm ball
    if (s.norm(v) == 0.0) continue;
    best = std::max(best, s.norm((A * v).eval()) / s.norm(v));
  }
  return best;
}

}  // namespace

TEST(Linops, DiagonalNormsAgree) {
  const Matrix D = mat2(0.5, 0, 0, 0.2);
  for (auto kind : {NormKind::One, NormKind::Two, NormKind::Infinity})
    EXPECT_NEAR(operator_norm(D, Space(2, kind)), 0.5, 1e-12) << to_string(kind);
}

TEST(Linops, NilpotentShift) {
  const Matrix N = mat2(0, 1, 0, 0);
  EXPECT_DOUBLE_EQ(operator_norm(N, Space(2, NormKind::One)), 1.0);
  EXPECT_DOUBLE_EQ(operator_norm(N, Space(2, NormKind::Infinity)), 1.0);
  EXPECT_NEAR(operator_norm(N, Space(2, NormKind::Two)), 1.0, 1e-9);
}

TEST(Linops, ClosedFormsForOneAndInfinity) {
  const Matrix A = mat2(1, -2, 3, 0.5);
  EXPECT_DOUBLE_EQ(operator_norm(A, Space(2, NormKind::One)), 4.0);
  EXPECT_DOUBLE_EQ(operator_norm(A, Space(2, NormKind::Infinity)), 3.5);
}

TEST(Linops, NormsDominateSamplesAndMatchSvd) {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index p = 2 + t % 3;
    const Matrix A = random_matrix(rng, p);
    Vector w(p);
    for (Eigen::Index i = 0; i < p; ++i) w(i) = rng.uniform(0.5, 2.0);
    for (const Space& s : {Space(p, NormKind::One), Space(p, NormKind::Two), Space(p, NormKind::Infinity),
                           Space::weighted(w)}) {
      const double exact = operator_norm(A, s);
      const double sampled = sampled_norm(A, s, rng, 2000);
      EXPECT_LE(sampled, exact * (1 + 1e-9));
      EXPECT_GT(sampled, 0.5 * exact);
    }
    Eigen::JacobiSVD<Matrix> svd(A);
    EXPECT_NEAR(spectral_norm(A), svd.singularValues()(0), 1e-8 * svd.singularValues()(0));
  }
}

TEST(Linops, SpectralNormOfRotationScaling) {
  Matrix R = mat2(std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7));
  EXPECT_NEAR(spectral_norm((0.6 * R).eval()), 0.6, 1e-10);
}

TEST(Linops, ApplyChecksDimensions) {
  const Space s(2, NormKind::Two);
  Vector v(3);
  v.setOnes();
  EXPECT_THROW(apply(Matrix::Identity(2, 2), v, s), ContractViolation);
  EXPECT_THROW(operator_norm(Matrix::Identity(3, 3), s), ContractViolation);
}

TEST(Linops, InvarianceOnOrthant) {
  const Cone P = Cone::orthant(Space(2, NormKind::Two));
  EXPECT_TRUE(invariance_check(mat2(0.5, 0.1, 0.2, 0.3), P));
  const auto w = invariance_witness(mat2(0.5, 0, -0.1, 0.5), P);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->generator, 0);
  EXPECT_NEAR(w->facet_value, -0.1, 1e-15);
}

TEST(Linops, RankOneMapsPreservePolyhedralCones) {
  const Cone P = polygonal_cone(5);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto g = rng.integer(0, P.generators().cols() - 1);
    const auto f = rng.integer(0, P.facets().cols() - 1);
    const Matrix E = P.generators().col(g) * P.facets().col(f).transpose();
    EXPECT_TRUE(invariance_check(E, P));
  }
  Matrix flip = Matrix::Identity(3, 3);
  flip(0, 0) = -1;
  flip(2, 2) = 0.1;
  EXPECT_FALSE(invariance_check(flip, P));
}

TEST(Linops, ResolventMatchesInverseAndSeries) {
  Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    const Space s(3, NormKind::Infinity);
    const Matrix A3 = random_matrix(rng, 3, 0.12);
    const Matrix A4 = random_matrix(rng, 3, 0.12);
    if (operator_norm(A3, s) + operator_norm(A4, s) >= 1.0) continue;
    const Matrix M = resolvent(A3, A4, s);
    const Matrix I = Matrix::Identity(3, 3);
    EXPECT_LE(operator_norm(Matrix((I - A3 - A4) * M - I), s), 1e-10);
    // Neumann bound ||M|| <= 1 / (1 - ||A3 + A4||).
    const double q = operator_norm(Matrix(A3 + A4), s);
    EXPECT_LE(operator_norm(M, s), 1.0 / (1.0 - q) * (1 + 1e-12));
  }
}

TEST(Linops, ResolventRefusesLargeOperators) {
  const Space s(2, NormKind::Infinity);
  try {
    resolvent(Matrix(0.6 * Matrix::Identity(2, 2)), Matrix(0.5 * Matrix::Identity(2, 2)), s);
    FAIL() << "expected HypothesisFailure";
  } catch (const HypothesisFailure& e) {
    EXPECT_EQ(e.condition(), "i1");
  }
}

TEST(Linops, SOperatorOfPositiveFamilyIsPositive) {
  const Cone P = Cone::orthant(Space(2, NormKind::Infinity));
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    Matrix A[4];
    for (auto& a : A) {
      a = random_matrix(rng, 2, 0.1).cwiseAbs();
    }
    const Matrix S = s_operator(A[0], A[1], A[2], A[3], P.space());
    EXPECT_TRUE(invariance_check(S, P));
    EXPECT_TRUE(invariance_check(resolvent(A[2], A[3], P.space()), P));
  }
}

TEST(Linops, ScalarSOperator) {
  const Space s(1, NormKind::Infinity);
  auto m = [](double a) { return Matrix(Matrix::Constant(1, 1, a)); };
  const Matrix S = s_operator(m(0.1), m(0.2), m(0.3), m(0.1), s);
  EXPECT_NEAR(S(0, 0), (0.1 + 0.2 + 0.1) / (1 - 0.3 - 0.1), 1e-15);
}

TEST(Linops, NearlyDegenerateTopSingularValues) {
  // Power iteration stalls when sigma1 / sigma2 is this close to 1.
  const Matrix D = mat2(1.0, 0.0, 0.0, 1.0 - 1e-7);
  EXPECT_NEAR(spectral_norm(D), 1.0, 1e-12);
  Matrix R = mat2(std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3));
  EXPECT_NEAR(spectral_norm(Matrix(R * D)), 1.0, 1e-12);
}
