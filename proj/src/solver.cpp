#include "conefp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conefp/errors.hpp"

namespace conefp {

namespace {

void require_constants(double k, double beta, const char* who) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw ContractViolation(std::string(who) + ": k must be >= 1");
  if (!(beta >= 0.0)) throw ContractViolation(std::string(who) + ": beta must be >= 0");
  if (!(beta < 1.0)) throw HypothesisFailure("i2", std::string(who) + ": beta must be < 1");
}

}  // namespace

double certificate_bound(double k, double beta, double d01_norm, std::size_t n) {
  return k * k * std::pow(beta, static_cast<double>(n)) / (1.0 - beta) * d01_norm;
}

std::size_t a_priori_iterations(double k, double beta, double d01_norm, double eps) {
  require_constants(k, beta, "a_priori_iterations");
  if (!(d01_norm >= 0.0) || !std::isfinite(d01_norm))
    throw ContractViolation("a_priori_iterations: d01_norm must be finite and >= 0");
  if (!(eps > 0.0)) throw ContractViolation("a_priori_iterations: eps must be positive");
  if (d01_norm == 0.0) return 0;
  if (certificate_bound(k, beta, d01_norm, 0) <= eps) return 0;
  if (beta == 0.0) return 1;

  const double estimate = std::log(eps * (1.0 - beta) / (k * k * d01_norm)) / std::log(beta);
  if (!(estimate < 1e9)) throw NumericError("a_priori_iterations: planned iteration count is unreasonably large");
  auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(estimate)));
  // The logarithm can be off by one in either direction; settle on the exact minimum.
  while (n > 0 && certificate_bound(k, beta, d01_norm, n - 1) <= eps) --n;
  while (certificate_bound(k, beta, d01_norm, n) > eps) ++n;
  return n;
}

FixedPointResult picard_solve(const ConeMetricSpace& space, const Mapping& T, double k, double beta, const Point& x0,
                              double eps, const SolveOptions& options) {
  require_constants(k, beta, "picard_solve");
  if (!(eps > 0.0)) throw ContractViolation("picard_solve: eps must be positive");
  T.validate(space);
  space.require_point(x0, "picard_solve");

  Point current = x0;
  Point image = T(current);
  double step = space.distance_norm(current, image);

  ConvergenceCertificate cert;
  cert.k = k;
  cert.beta = beta;
  cert.d01_norm = step;
  cert.eps = eps;
  cert.n_planned = a_priori_iterations(k, beta, step, eps);
  cert.bound_at_n = certificate_bound(k, beta, step, cert.n_planned);
  cert.beta_source = options.beta_source;

  const std::size_t max_iter = options.max_iter.value_or(std::max<std::size_t>(4 * cert.n_planned, 64));
  const std::size_t budget = std::min(cert.n_planned, max_iter);

  IterationTrace trace;
  trace.points.push_back(current);
  std::size_t n = 0;
  while (n < budget && step > 0.0) {
    trace.step_norms.push_back(step);
    current = std::move(image);
    trace.points.push_back(current);
    ++n;
    image = T(current);
    step = space.distance_norm(current, image);
  }

  if (!(step <= eps)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "residual " << step << " above eps " << eps << " after " << n << " of " << cert.n_planned
        << " planned iterations";
    if (budget < cert.n_planned) msg << " (capped by max_iter " << max_iter << ")";
    throw NonConvergence(msg.str(), std::move(trace), cert, step);
  }

  FixedPointResult result;
  result.point = current;
  result.residual_norm = step;
  result.iterations_used = n;
  result.certificate = cert;
  if (options.record_trace) result.trace = std::move(trace);
  return result;
}

BoundAudit verify_proof_bounds(const ConeMetricSpace& space, const IterationTrace& trace, double k, double beta,
                               std::size_t max_gap) {
  if (trace.points.empty()) throw ContractViolation("verify_proof_bounds: trace is empty");
  if (trace.step_norms.size() + 1 != trace.points.size())
    throw ContractViolation("verify_proof_bounds: trace needs one step norm per consecutive pair");
  require_constants(k, beta, "verify_proof_bounds");

  constexpr double slack = 1.0 + 1e-9;
  BoundAudit audit;
  const std::size_t last = trace.points.size() - 1;
  if (last == 0) return audit;
  const double d01 = space.distance_norm(trace.points[0], trace.points[1]);

  for (std::size_t n = 0; n < last; ++n) {
    const double lhs = trace.step_norms[n];
    const double rhs = k * std::pow(beta, static_cast<double>(n)) * d01 * slack;
    ++audit.checks;
    if (lhs > rhs) audit.violations.push_back({"step", n, 1, lhs, rhs});
  }
  for (std::size_t n = 0; n < last; ++n) {
    const double rhs = certificate_bound(k, beta, d01, n) * slack;
    for (std::size_t p = 1; p <= max_gap && n + p <= last; ++p) {
      const double lhs = space.distance_norm(trace.points[n], trace.points[n + p]);
      ++audit.checks;
      if (lhs > rhs) audit.violations.push_back({"gap", n, p, lhs, rhs});
    }
  }
  return audit;
}

UniquenessProbe uniqueness_probe(const ConeMetricSpace& space, const Mapping& T, double k, double beta,
                                 const std::vector<Point>& seeds, double eps) {
  if (seeds.size() < 2) throw ContractViolation("uniqueness_probe: at least two seeds are required");
  UniquenessProbe probe;
  probe.runs.reserve(seeds.size());
  for (const auto& seed : seeds) probe.runs.push_back(picard_solve(space, T, k, beta, seed, eps));
  for (std::size_t i = 0; i < probe.runs.size(); ++i) {
    for (std::size_t j = i + 1; j < probe.runs.size(); ++j) {
      const double spread = space.distance_norm(probe.runs[i].point, probe.runs[j].point);
      probe.max_spread = std::max(probe.max_spread, spread);
    }
  }
  probe.unique = probe.max_spread <= 2.0 * eps;
  return probe;
}

}  // namespace conefp
