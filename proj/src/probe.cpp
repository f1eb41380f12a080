#include "conefp/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>

#include "conefp/contraction.hpp"
#include "conefp/format.hpp"
#include "conefp/solver.hpp"
#include "conefp/testbed.hpp"

namespace conefp {

namespace {

constexpr int kAttemptsPerInstance = 64;

bool accepted(const HypothesisReport& r, double lo, double hi) {
  return r.contraction_pass && r.i2_pass && r.i3_pass && r.hb_pass && r.i4_pass && r.i5_pass &&
         r.alpha >= lo - 1e-12 && r.alpha <= hi + 1e-12;
}

ProbeRow run_instance(std::uint64_t seed, std::size_t index, std::pair<double, double> k_range,
                      std::pair<double, double> alpha_range, double eps) {
  ProbeRow row;
  row.instance = index;
  Rng rng = Rng::substream(seed, index);
  const double k_draw = rng.uniform(k_range.first, k_range.second);
  const Cone cone = wedge_cone(std::numbers::pi - std::asin(1.0 / k_draw));
  const double k = cone.normal_constant();
  row.k = k;

  const double lo = std::max(alpha_range.first, 1.0 / k);
  const double hi = alpha_range.second;
  if (lo > hi) {
    row.note = "empty cell: alpha range lies below 1/k";
    return row;
  }
  const auto size = static_cast<std::size_t>(rng.integer(3, 8));

  for (int attempt = 0; attempt < kAttemptsPerInstance; ++attempt) {
    const bool two_root = attempt % 2 == 0;
    TreeInstanceSpec spec;
    spec.space_size = size;
    spec.roots = two_root ? 2 : 1;
    spec.alpha_target = lo + rng.uniform() * (hi - lo);
    spec.contraction_factor = rng.uniform(0.2, 0.6) * spec.alpha_target;
    spec.per_pair = false;
    FiniteInstance instance = build_tree_instance(rng, cone, k, spec);
    const HypothesisReport report = check_hypotheses(instance.space, instance.T, instance.coeffs, k, AllPairs{});
    if (!accepted(report, lo, hi)) {
      if (two_root) ++row.rejected_two_root;
      continue;
    }

    row.generated = true;
    row.design = two_root ? "two-root" : "single-root";
    row.points = size;
    row.alpha = report.alpha;
    row.beta = report.beta;
    row.fixed_points = brute_force_fixed_points(instance).size();

    row.converged = true;
    std::vector<Point> limits;
    for (const auto& x0 : instance.space.points()) {
      try {
        const auto result = picard_solve(instance.space, instance.T, k, report.beta, x0, eps);
        row.max_iterations = std::max(row.max_iterations, result.iterations_used);
        if (std::find(limits.begin(), limits.end(), result.point) == limits.end()) limits.push_back(result.point);
      } catch (const NonConvergence&) {
        row.converged = false;
      }
    }
    row.distinct_limits = limits.size();
    return row;
  }
  row.note = "generation failed after 64 attempts";
  return row;
}

}  // namespace

ProbeReport probe_open_problem(std::uint64_t seed, std::pair<double, double> k_range,
                               std::pair<double, double> alpha_range, std::size_t n_instances, double eps) {
  if (!(k_range.first > 1.0) || !(k_range.first <= k_range.second) || !std::isfinite(k_range.second))
    throw ContractViolation("probe_open_problem: k range must be nonempty with k > 1");
  if (!(eps > 0.0)) throw ContractViolation("probe_open_problem: eps must be positive");
  if (alpha_range.second >= 1.0 || alpha_range.first < 0.0)
    throw ContractViolation("probe_open_problem: alpha range must lie in [1/k, 1)");

  ProbeReport report;
  report.seed = seed;
  report.k_min = k_range.first;
  report.k_max = k_range.second;
  report.alpha_min = alpha_range.first;
  report.alpha_max = alpha_range.second;
  report.eps = eps;
  if (alpha_range.first > alpha_range.second) return report;
  for (std::size_t i = 0; i < n_instances; ++i) report.rows.push_back(run_instance(seed, i, k_range, alpha_range, eps));
  return report;
}

std::string ProbeReport::to_text() const {
  std::ostringstream out;
  out << "report=probe\n";
  out << "label=" << label << "\n";
  out << "seed=" << seed << "\n";
  out << "k_min=" << format_exact(k_min) << "\n";
  out << "k_max=" << format_exact(k_max) << "\n";
  out << "alpha_min=" << format_exact(alpha_min) << "\n";
  out << "alpha_max=" << format_exact(alpha_max) << "\n";
  out << "eps=" << format_exact(eps) << "\n";
  out << "rows=" << rows.size() << "\n";
  std::size_t generated = 0, converged = 0, multiple = 0;
  for (const auto& r : rows) {
    const std::string key = "row." + std::to_string(r.instance) + ".";
    out << key << "label=" << r.label << "\n";
    out << key << "generated=" << format_bool(r.generated) << "\n";
    out << key << "design=" << r.design << "\n";
    out << key << "rejected_two_root=" << r.rejected_two_root << "\n";
    out << key << "points=" << r.points << "\n";
    out << key << "k=" << format_exact(r.k) << "\n";
    out << key << "alpha=" << format_exact(r.alpha) << "\n";
    out << key << "beta=" << format_exact(r.beta) << "\n";
    out << key << "converged=" << format_bool(r.converged) << "\n";
    out << key << "max_iterations=" << r.max_iterations << "\n";
    out << key << "fixed_points=" << r.fixed_points << "\n";
    out << key << "distinct_limits=" << r.distinct_limits << "\n";
    out << key << "note=" << r.note << "\n";
    generated += r.generated;
    converged += r.generated && r.converged;
    multiple += r.fixed_points > 1;
  }
  out << "summary.generated=" << generated << "\n";
  out << "summary.converged=" << converged << "\n";
  out << "summary.multiple_fixed_points=" << multiple << "\n";
  return out.str();
}

ProbeReport ProbeReport::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractViolation("probe report: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ContractViolation("probe report: missing key " + key);
    return it->second;
  };
  auto num = [&](const std::string& key) { return std::strtod(get(key).c_str(), nullptr); };
  auto count = [&](const std::string& key) { return static_cast<std::size_t>(std::stoull(get(key))); };
  auto flag = [&](const std::string& key) {
    const auto& v = get(key);
    if (v != "true" && v != "false") throw ContractViolation("probe report: bad boolean for " + key);
    return v == "true";
  };

  if (get("report") != "probe") throw ContractViolation("probe report: wrong report kind");
  ProbeReport r;
  r.label = get("label");
  r.seed = std::stoull(get("seed"));
  r.k_min = num("k_min");
  r.k_max = num("k_max");
  r.alpha_min = num("alpha_min");
  r.alpha_max = num("alpha_max");
  r.eps = num("eps");
  const std::size_t n = count("rows");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "row." + std::to_string(i) + ".";
    ProbeRow row;
    row.instance = i;
    row.label = get(key + "label");
    row.generated = flag(key + "generated");
    row.design = get(key + "design");
    row.rejected_two_root = count(key + "rejected_two_root");
    row.points = count(key + "points");
    row.k = num(key + "k");
    row.alpha = num(key + "alpha");
    row.beta = num(key + "beta");
    row.converged = flag(key + "converged");
    row.max_iterations = count(key + "max_iterations");
    row.fixed_points = count(key + "fixed_points");
    row.distinct_limits = count(key + "distinct_limits");
    row.note = get(key + "note");
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace conefp
