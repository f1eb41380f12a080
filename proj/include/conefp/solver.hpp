#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conefp/space.hpp"

namespace conefp {

/// x_0, x_1 = T x_0, ..., x_N together with ||d(x_n, x_{n+1})|| for n < N.
struct IterationTrace {
  std::vector<Point> points;
  std::vector<double> step_norms;
};

/// A-priori guarantee: for every p >= 1,
///   ||d(x_n, x_{n+p})|| <= k^2 beta^n / (1 - beta) ||d(x_0, x_1)||
/// and bound_at_n is that right-hand side at n = n_planned.
struct ConvergenceCertificate {
  double k = 1.0;
  double beta = 0.0;
  double d01_norm = 0.0;
  std::size_t n_planned = 0;
  double eps = 0.0;
  double bound_at_n = 0.0;
  std::string beta_source = "declared";  // or "witnessed"
};

struct FixedPointResult {
  Point point = Point::label(0);
  double residual_norm = 0.0;  // ||d(u, T u)||
  std::size_t iterations_used = 0;
  ConvergenceCertificate certificate;
  std::optional<IterationTrace> trace;
};

/// Picard iteration used up its planned steps (or max_iter) with the
/// residual still above eps. Usually a hypothesis violation or a bad beta.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, IterationTrace trace, ConvergenceCertificate certificate, double residual)
      : std::runtime_error(what), trace_(std::move(trace)), certificate_(certificate), residual_(residual) {}

  const IterationTrace& trace() const { return trace_; }
  const ConvergenceCertificate& certificate() const { return certificate_; }
  double residual_norm() const { return residual_; }

 private:
  IterationTrace trace_;
  ConvergenceCertificate certificate_;
  double residual_;
};

/// k^2 beta^n / (1 - beta) * d01_norm.
double certificate_bound(double k, double beta, double d01_norm, std::size_t n);

/// Smallest n >= 0 with certificate_bound(k, beta, d01_norm, n) <= eps.
std::size_t a_priori_iterations(double k, double beta, double d01_norm, double eps);

struct SolveOptions {
  std::optional<std::size_t> max_iter;  // default max(4 * n_planned, 64)
  bool record_trace = false;
  std::string beta_source = "declared";
};

/// Runs n_planned = a_priori_iterations(...) Picard steps from x0 (fewer if an
/// exact fixed point is hit, capped by max_iter) and requires the final
/// residual ||d(x_N, T x_N)|| <= eps. Throws NonConvergence otherwise.
FixedPointResult picard_solve(const ConeMetricSpace& space, const Mapping& T, double k, double beta, const Point& x0,
                              double eps, const SolveOptions& options = {});

struct BoundViolation {
  std::string kind;  // "step" or "gap"
  std::size_t n = 0;
  std::size_t p = 1;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundAudit {
  std::size_t checks = 0;
  std::vector<BoundViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks the two proof inequalities along a trace, with relative slack 1e-9:
///   ||d(x_n, x_{n+1})|| <= k beta^n ||d(x_0, x_1)||
///   ||d(x_n, x_{n+p})|| <= k^2 beta^n / (1 - beta) ||d(x_0, x_1)||,  1 <= p <= max_gap.
BoundAudit verify_proof_bounds(const ConeMetricSpace& space, const IterationTrace& trace, double k, double beta,
                               std::size_t max_gap);

struct UniquenessProbe {
  bool unique = true;
  double max_spread = 0.0;  // largest ||d(u_i, u_j)|| between returned points
  std::vector<FixedPointResult> runs;
};

/// Solves from every seed and reports whether all limits lie within 2 eps of
/// each other in metric norm.
UniquenessProbe uniqueness_probe(const ConeMetricSpace& space, const Mapping& T, double k, double beta,
                                 const std::vector<Point>& seeds, double eps);

}  // namespace conefp
