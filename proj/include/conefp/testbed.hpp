#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "conefp/contraction.hpp"
#include "conefp/space.hpp"

namespace conefp {

/// E = R with P = [0, inf) and k = 1.
Cone scalar_cone();

/// Cone in R^2 spanned by (1, 0) and (cos angle, sin angle), 0 < angle < pi,
/// under the Euclidean norm. Its normal constant is 1 for angle <= pi/2 and
/// 1 / sin(angle) beyond; that value is declared.
Cone wedge_cone(double angle);

/// Polyhedral "ice cream" cone in R^3: the pyramid over a regular polygon with
/// `sides` vertices at height 1, generators (cos t, sin t, 1).
Cone polygonal_cone(int sides, NormKind norm = NormKind::Two, double normal_constant = 1.0);

/// Finite labelled space embedded as a classical metric space in E = R.
ConeMetricSpace make_scalar_space(std::vector<std::string> labels);

/// The real line with |x - y| as cone metric in E = R.
ConeMetricSpace make_scalar_line();

/// R^m (Euclidean base) or a discrete R^m with d(x, y) = rho(x, y) w.
ConeMetricSpace make_lifted_space(Eigen::Index m, Cone cone, Vector w, BaseMetric base = BaseMetric::Euclidean);

struct FiniteInstance {
  ConeMetricSpace space;
  Mapping T;
  CoefficientFamily coeffs;
  double k = 1.0;
};

/// Every x with T x = x, in canonical label order.
std::vector<Point> brute_force_fixed_points(const ConeMetricSpace& space, const Mapping& T);
inline std::vector<Point> brute_force_fixed_points(const FiniteInstance& instance) {
  return brute_force_fixed_points(instance.space, instance.T);
}

struct CorollaryReport {
  double alpha = 0.0;
  double beta = 0.0;
  double expected_alpha = 0.0;  // a1 + a2 + a3 + 2 a4
  double expected_beta = 0.0;   // (a1 + a2 + a4) / (1 - a3 - a4)
  bool invariance_pass = true;  // (i3), (hb), (i4), (i5)
  bool passed = false;
};

/// Runs the scalar reduction through check_hypotheses and compares the
/// witnessed alpha and beta with the closed forms to 1e-12.
CorollaryReport verify_corollary_equivalence(double a1, double a2, double a3, double a4);

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random finite instance that passes check_hypotheses exhaustively with
/// witnessed alpha <= 0.9 / k and beta <= 0.9.
///
/// T sends every point to its parent in a random tree whose root is the unique
/// fixed point. The metric is w1 rho1 + w2 rho2 with rho_j(x, y) = max(h_j(x),
/// h_j(y)) for x != y, h_j growing geometrically with depth, so T contracts
/// each rho_j. Coefficients are A_i = a_i I + s_i E_i with E_i nonnegative
/// combinations of rank-one maps g f^T (generator times facet), which keep P
/// invariant for any polyhedral cone.
FiniteInstance generate_certified_instance(std::uint64_t seed, std::size_t space_size, const Cone& cone, double k);

struct AffineInstance {
  ConeMetricSpace space;
  Mapping T;
  CoefficientFamily coeffs;
  double k = 1.0;
  double beta = 0.0;  // declared, slightly above ||B||_2
  double lipschitz = 0.0;
  Point x0 = Point::label(0);
  Vector fixed_point;  // (I - B)^-1 c
};

/// T x = B x + c on R^m with ||B||_2 <= 0.9, weighted-lift metric into an
/// orthant, Banach coefficients A1 = ||B||_2 I.
AffineInstance generate_affine_instance(std::uint64_t seed);

/// Options for building instances with alpha in a prescribed window; used by
/// the certified generator and the open-problem probe.
struct TreeInstanceSpec {
  std::size_t space_size = 5;
  std::size_t roots = 1;
  double alpha_target = 0.5;
  double contraction_factor = 0.3;  // q, with a1 = 1.01 q
  bool per_pair = false;
};

/// One construction attempt; no hypothesis checking.
FiniteInstance build_tree_instance(Rng& rng, const Cone& cone, double k, const TreeInstanceSpec& spec);

/// Canonical label for point i of an n-point generated space.
std::string point_label(std::size_t i, std::size_t n);

}  // namespace conefp
