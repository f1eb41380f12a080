#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

// Experimental sweep over instances whose alpha lies in [1/k, 1) for k > 1,
// outside the range where uniqueness is proved. Nothing here is a theorem:
// rows only record what the solver and the brute-force oracle observed.

namespace conefp {

inline constexpr const char* kExperimentalLabel = "EXPERIMENTAL";

struct ProbeRow {
  std::size_t instance = 0;
  std::string label = kExperimentalLabel;
  bool generated = false;
  std::string design;          // "single-root" or "two-root"
  std::size_t rejected_two_root = 0;  // two-root candidates rejected before acceptance
  std::size_t points = 0;
  double k = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool converged = false;       // every start reached a residual <= eps
  std::size_t max_iterations = 0;
  std::size_t fixed_points = 0;  // brute-force count
  std::size_t distinct_limits = 0;
  std::string note;

  friend bool operator==(const ProbeRow&, const ProbeRow&) = default;
};

struct ProbeReport {
  std::string label = kExperimentalLabel;
  std::uint64_t seed = 0;
  double k_min = 0.0, k_max = 0.0;
  double alpha_min = 0.0, alpha_max = 0.0;
  double eps = 0.0;
  std::vector<ProbeRow> rows;

  friend bool operator==(const ProbeReport&, const ProbeReport&) = default;

  /// Flat key=value lines, numbers with 17 significant digits.
  std::string to_text() const;
  static ProbeReport parse(const std::string& text);
};

/// Generates `n_instances` finite instances on wedge cones with normal
/// constant k in `k_range`, witnessed alpha in `alpha_range`, satisfying (I)
/// and (i2)-(i5). Each is solved from every point. An empty alpha range gives
/// an empty report.
ProbeReport probe_open_problem(std::uint64_t seed, std::pair<double, double> k_range,
                               std::pair<double, double> alpha_range, std::size_t n_instances, double eps);

}  // namespace conefp
