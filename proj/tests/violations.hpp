#pragma once

// Six small instances, each breaking exactly one hypothesis, plus the repaired
// operator that makes all of them pass. Orthant in R^2 with the max norm,
// three points, T constant onto "a", discrete lift metric.

#include <string>
#include <vector>

#include "conefp/contraction.hpp"
#include "conefp/space.hpp"

namespace conefp::testing {

struct ViolationCase {
  std::string condition;
  ConeMetricSpace space;
  Mapping T;
  CoefficientFamily broken;
  CoefficientFamily repaired;
  double k = 1.0;
  CheckOptions options;
};

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

inline ConeMetricSpace three_points(Vector w, double k = 1.0) {
  return ConeMetricSpace::finite(Cone::orthant(Space(2, NormKind::Infinity), k), {"a", "b", "c"},
                                 WeightedLift{BaseMetric::Discrete, std::move(w)});
}

inline Coefficients ops(Matrix A1, Matrix A2 = Matrix::Zero(2, 2), Matrix A3 = Matrix::Zero(2, 2),
                        Matrix A4 = Matrix::Zero(2, 2)) {
  return {std::move(A1), std::move(A2), std::move(A3), std::move(A4)};
}

inline std::vector<ViolationCase> violation_cases() {
  const Mapping T = Mapping::table({0, 0, 0});
  const Matrix I = Matrix::Identity(2, 2);
  const Vector ones = Vector::Ones(2);
  Vector e1(2);
  e1 << 1.0, 0.0;
  std::vector<ViolationCase> cases;

  // alpha = 0.6 >= 1/k = 0.5
  cases.push_back({"i1", three_points(ones, 2.0), T, CoefficientFamily::constant(ops(0.6 * I)),
                   CoefficientFamily::constant(ops(0.4 * I)), 2.0, {}});

  // ||S|| = 0.5 exceeds the declared beta 0.4; (i1) alone would give beta < 1.
  CheckOptions declared;
  declared.declared_beta = 0.4;
  cases.push_back({"i2", three_points(ones), T, CoefficientFamily::constant(ops(0.5 * I)),
                   CoefficientFamily::constant(ops(0.3 * I)), 1.0, declared});

  cases.push_back({"i3", three_points(ones), T, CoefficientFamily::constant(ops(mat2(0.2, 0, -0.1, 0.2))),
                   CoefficientFamily::constant(ops(0.2 * I)), 1.0, {}});

  // A1 + A2 stays positive, A2 alone does not.
  cases.push_back({"hb", three_points(ones), T,
                   CoefficientFamily::constant(ops(mat2(0.1, 0, 0.1, 0.1), mat2(0.1, 0, -0.05, 0.1))),
                   CoefficientFamily::constant(ops(mat2(0.1, 0, 0.1, 0.1), 0.1 * I)), 1.0, {}});

  cases.push_back({"i4", three_points(ones), T,
                   CoefficientFamily::constant(ops(0.1 * I, 0.1 * I, mat2(0.15, 0, 0.1, 0.15), mat2(0, 0, -0.1, 0))),
                   CoefficientFamily::constant(ops(0.1 * I, 0.1 * I, mat2(0.15, 0, 0.1, 0.15), mat2(0, 0, 0.1, 0))),
                   1.0, {}});

  // (I - A3)^-1 = [[1, -0.4], [0, 1]] leaves the orthant; the weight keeps the
  // contractive condition intact.
  cases.push_back({"i5", three_points(e1), T, CoefficientFamily::constant(ops(0.1 * I, Matrix::Zero(2, 2), mat2(0, -0.4, 0, 0))),
                   CoefficientFamily::constant(ops(0.1 * I, Matrix::Zero(2, 2), mat2(0, 0.4, 0, 0))), 1.0, {}});
  return cases;
}

}  // namespace conefp::testing
