#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conefp/cone.hpp"
#include "conefp/space.hpp"

namespace conefp {

/// Every ordered pair (finite spaces only).
struct AllPairs {};

/// `count` pseudo-random pairs. Euclidean points are drawn from [-box, box]^m.
struct SampledPairs {
  int count = 256;
  std::uint64_t seed = 0;
  double box = 10.0;
};

using PairSource = std::variant<AllPairs, SampledPairs>;

/// Canonical pair list: finite + AllPairs enumerates (i, j) row-major.
std::vector<std::pair<Point, Point>> enumerate_pairs(const ConeMetricSpace& space, const Mapping& T,
                                                     const PairSource& source);

/// r = A1 d(x,y) + A2 d(x,Tx) + A3 d(y,Ty) + A4 d(x,Ty) + A4 d(y,Tx) - d(Tx,Ty).
/// The contractive condition holds at (x, y) iff r lies in the cone.
Vector contraction_residual(const ConeMetricSpace& space, const Mapping& T, const CoefficientFamily& coeffs,
                            const Point& x, const Point& y);

/// Metric axioms (a) positivity, (b) symmetry, (c) triangle inequality in the
/// cone order. Exhaustive over triples on finite spaces with AllPairs.
ValidationReport check_metric_axioms(const ConeMetricSpace& space, const PairSource& source,
                                     double tol = kDefaultMembershipTol);

struct Witness {
  std::string condition;  // "i1", "i2", "i3", "hb", "i4", "i5", "I"
  Point x = Point::label(0);
  Point y = Point::label(0);
  double value = 0.0;     // alpha sum, ||S||, or worst facet inner product
  long generator = -1;    // cone generator that left P (invariance conditions)
  Vector residual;        // offending vector, empty for norm conditions
  std::string detail;
};

struct CheckOptions {
  double tol = kDefaultMembershipTol;
  double resolvent_tol = 1e-10;
  std::optional<double> declared_alpha;
  std::optional<double> declared_beta;
  std::size_t max_witnesses_per_condition = 4;
};

struct HypothesisReport {
  double alpha = 0.0;  // max over checked pairs of sum ||Ai|| + ||A4||
  double beta = 0.0;   // max over checked pairs of ||S(x, y)||
  double k = 1.0;
  std::optional<double> declared_alpha;
  std::optional<double> declared_beta;
  bool i1_pass = true;
  bool i2_pass = true;
  bool i3_pass = true;
  bool hb_pass = true;
  bool i4_pass = true;
  bool i5_pass = true;
  bool contraction_pass = true;
  std::vector<Witness> witnesses;
  std::size_t pairs_checked = 0;
  bool exhaustive = false;

  bool passed() const {
    return i1_pass && i2_pass && i3_pass && hb_pass && i4_pass && i5_pass && contraction_pass;
  }
  /// Flag names that failed, in the order i1 i2 i3 hb i4 i5 I.
  std::vector<std::string> failed_conditions() const;
  const Witness* first_witness(const std::string& condition) const;
};

/// Checks the contractive condition and hypotheses (i1), (i2), (i3), (hb),
/// (i4), (i5) over the pairs named by `source`.
///
/// Alpha and beta are the witnessed maxima; ties keep the first pair in
/// canonical order. A declared alpha (beta) must bound the witnessed value to
/// 1e-9 and itself satisfy the hypothesis, otherwise the flag fails.
HypothesisReport check_hypotheses(const ConeMetricSpace& space, const Mapping& T, const CoefficientFamily& coeffs,
                                  double k, const PairSource& source, const CheckOptions& options = {});

/// The scalar family A_i(x, y): t -> a_i t on E = R.
CoefficientFamily reduce_scalar(double a1, double a2, double a3, double a4);

}  // namespace conefp
