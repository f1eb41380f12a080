// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "conefp/cli.hpp"
#include "conefp/contraction.hpp"
#include "conefp/probe.hpp"
#include "conefp/solver.hpp"
#include "conefp/testbed.hpp"
#include "violations.hpp"

using namespace conefp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct Certified {
  FiniteInstance instance;
  HypothesisReport report;
};

// Criteria 1, 2 and 5 share the 200 instances.
std::vector<Certified> g_instances;
double g_solve_seconds = 0.0;

Cone instance_cone(std::uint64_t seed) {
  switch (seed % 3) {
    case 0: return Cone::orthant(Space(2, NormKind::Infinity));
    case 1: return Cone::orthant(Space(3, NormKind::One));
    default: return wedge_cone(2.0);  // skewed, k = 1 / sin 2
  }
}

Outcome theorem_reproduction() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Cone cone = instance_cone(seed);
    const double k = cone.normal_constant();
    const std::size_t size = 2 + seed % 11;
    FiniteInstance inst = generate_certified_instance(seed, size, cone, k);
    HypothesisReport report = check_hypotheses(inst.space, inst.T, inst.coeffs, k, AllPairs{});
    if (!report.passed()) o.fail("seed " + std::to_string(seed) + " not certified");
    const auto oracle = brute_force_fixed_points(inst);
    if (oracle.size() != 1) {
      o.fail("seed " + std::to_string(seed) + " has " + std::to_string(oracle.size()) + " fixed points");
      continue;
    }
    for (const auto& x0 : inst.space.points()) {
      const auto r = picard_solve(inst.space, inst.T, k, report.beta, x0, 1e-10);
      if (!(inst.space.distance_norm(r.point, oracle[0]) <= 1e-8)) o.fail("seed " + std::to_string(seed) + " missed");
      ++checked;
    }
    g_instances.push_back({std::move(inst), std::move(report)});
  }
  g_solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (g_solve_seconds >= 10.0) o.fail("took " + std::to_string(g_solve_seconds) + " s");
  if (o.pass) {
    std::ostringstream d;
    d << "200 instances, " << checked << " solves agree with the oracle in " << g_solve_seconds << " s";
    o.detail = d.str();
  }
  return o;
}

Outcome proof_bound_audit() {
  Outcome o;
  std::size_t checks = 0, violations = 0;
  SolveOptions traced;
  traced.record_trace = true;
  for (const auto& c : g_instances) {
    const auto& inst = c.instance;
    const auto r = picard_solve(inst.space, inst.T, inst.k, c.report.beta, inst.space.points().back(), 1e-10, traced);
    const auto audit = verify_proof_bounds(inst.space, *r.trace, inst.k, c.report.beta, 10);
    checks += audit.checks;
    violations += audit.violations.size();
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto inst = generate_affine_instance(seed);
    const auto r = picard_solve(inst.space, inst.T, inst.k, inst.beta, inst.x0, 1e-10, traced);
    const auto audit = verify_proof_bounds(inst.space, *r.trace, inst.k, inst.beta, 10);
    checks += audit.checks;
    violations += audit.violations.size();
  }
  if (violations > 0) o.fail(std::to_string(violations) + " violations");
  if (checks == 0) o.fail("no checks ran");
  if (o.pass) o.detail = std::to_string(checks) + " inequalities over 250 traces, 0 violations";
  return o;
}

Outcome certificate_sharpness() {
  Outcome o;
  const std::size_t n = a_priori_iterations(1.0, 0.5, 1.0, 1e-6);
  if (n != 21) o.fail("a_priori_iterations returned " + std::to_string(n));
  const auto line = make_scalar_line();
  const auto T = Mapping::affine(Matrix::Constant(1, 1, 0.5), Vector::Constant(1, 1.0));
  const auto r = picard_solve(line, T, 1.0, 0.5, Point::coords(Vector::Zero(1)), 1e-6);
  if (r.certificate.d01_norm != 1.0) o.fail("Banach instance has d(x0, x1) != 1");
  if (r.iterations_used != 21 || !(r.residual_norm <= 1e-6)) o.fail("residual at 21 is " + std::to_string(r.residual_norm));
  if (o.pass) {
    std::ostringstream d;
    d << "n = 21, residual " << r.residual_norm;
    o.detail = d.str();
  }
  return o;
}

Outcome corollary_equivalence() {
  Outcome o;
  Rng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a3 = rng.uniform(0.0, 0.95);
    const double a4 = rng.uniform(0.0, 0.95 - a3);
    const double a1 = rng.uniform(0.0, 1.0), a2 = rng.uniform(0.0, 1.0);
    const auto r = verify_corollary_equivalence(a1, a2, a3, a4);
    worst = std::max({worst, std::abs(r.alpha - r.expected_alpha), std::abs(r.beta - r.expected_beta)});
    if (!r.passed) o.fail("quadruple " + std::to_string(t) + " differs");
  }
  if (o.pass) {
    std::ostringstream d;
    d << "1000 quadruples, worst deviation " << worst;
    o.detail = d.str();
  }
  return o;
}

Outcome uniqueness() {
  Outcome o;
  for (std::size_t i = 0; i < g_instances.size(); ++i) {
    const auto& c = g_instances[i];
    const auto points = c.instance.space.points();
    Rng rng = Rng::substream(99, i);
    std::vector<Point> seeds;
    for (int s = 0; s < 5; ++s) seeds.push_back(points[static_cast<std::size_t>(rng.integer(0, points.size() - 1))]);
    if (!uniqueness_probe(c.instance.space, c.instance.T, c.instance.k, c.report.beta, seeds, 1e-10).unique)
      o.fail("instance " + std::to_string(i + 1) + " disagrees");
  }
  const auto two = make_scalar_space({"a", "b"});
  const auto id = Mapping::table({0, 1});
  if (brute_force_fixed_points(two, id).size() != 2) o.fail("identity should have two fixed points");
  if (uniqueness_probe(two, id, 1.0, 0.5, two.points(), 1e-9).unique) o.fail("identity probe reported unique");
  if (o.pass) o.detail = "5 seeds agree on 200 instances; identity on 2 points gives 2 fixed points and a failing probe";
  return o;
}

Outcome checker_soundness() {
  Outcome o;
  for (const auto& c : testing::violation_cases()) {
    const auto broken = check_hypotheses(c.space, c.T, c.broken, c.k, AllPairs{}, c.options);
    const auto failed = broken.failed_conditions();
    if (failed != std::vector<std::string>{c.condition}) {
      std::string got;
      for (const auto& f : failed) got += " " + f;
      o.fail(c.condition + " case failed:" + got);
    }
    if (broken.first_witness(c.condition) == nullptr) o.fail(c.condition + " case has no witness");
    if (!check_hypotheses(c.space, c.T, c.repaired, c.k, AllPairs{}, c.options).passed())
      o.fail(c.condition + " repair still fails");
  }
  if (o.pass) o.detail = "i1 i2 i3 hb i4 i5 each fail alone with a witness and pass once repaired";
  return o;
}

Outcome normal_constant_audit() {
  Outcome o;
  for (auto kind : {NormKind::One, NormKind::Two, NormKind::Infinity}) {
    for (Eigen::Index p : {2, 3}) {
      const Cone P = Cone::orthant(Space(p, kind));
      const auto audit = audit_normal_constant(P);
      if (std::abs(audit.lower_bound - 1.0) > 1e-12 || !audit.consistent)
        o.fail(std::string("orthant under ") + to_string(kind) + " gives " + std::to_string(audit.lower_bound));
    }
  }
  try {
    Cone::orthant(Space(2, NormKind::Two), 0.5);
    o.fail("k = 0.5 accepted");
  } catch (const ContractViolation&) {
  }
  if (audit_normal_constant(wedge_cone(2.5).with_normal_constant(1.0)).consistent)
    o.fail("understated k on an obtuse wedge passed the audit");
  if (o.pass) o.detail = "orthant lower bounds are 1 under one/two/infinity norms; k = 0.5 rejected";
  return o;
}

std::string run_cli(const std::vector<std::string>& args, int& code) {
  std::vector<const char*> argv{"conefp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome o;
  const std::string problems = CONEFP_PROBLEM_DIR;
  const std::string golden = CONEFP_GOLDEN_DIR;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"check", "banach_line"},        {"solve", "banach_line"},   {"check", "certified_finite"},
      {"solve", "certified_finite"},   {"check", "i4_violation"},  {"solve", "i4_violation"},
      {"check", "low_normal_constant"}};
  for (const auto& [cmd, stem] : runs) {
    int c1 = 0, c2 = 0;
    const std::vector<std::string> args{"--output", "machine", cmd, problems + "/" + stem + ".json"};
    const std::string a = run_cli(args, c1);
    const std::string b = run_cli(args, c2);
    if (a != b || c1 != c2) o.fail(cmd + " " + stem + " differs between runs");
    const std::string expected = read_file(golden + "/" + cmd + "_" + stem + ".txt");
    if (expected.empty()) o.fail("missing golden file for " + cmd + " " + stem);
    else if (a != expected) o.fail(cmd + " " + stem + " differs from its golden file");
  }
  if (o.pass) o.detail = std::to_string(runs.size()) + " reports byte-identical across runs and to golden files";
  return o;
}

Outcome experimental_probe() {
  Outcome o;
  const std::vector<std::string> args{"--output", "machine", "probe", "--k",         "2", "--alpha-min",
                                      "0.5",      "--alpha-max", "0.9", "--instances", "25", "--seed", "3"};
  int c1 = 0, c2 = 0;
  const std::string a = run_cli(args, c1);
  const std::string b = run_cli(args, c2);
  if (c1 != 0) o.fail("exit code " + std::to_string(c1));
  if (a != b) o.fail("two runs differ");
  const auto body = a.find("report=probe\n");
  if (body == std::string::npos) {
    o.fail("no probe report");
    return o;
  }
  try {
    const ProbeReport report = ProbeReport::parse(a.substr(body));
    if (report.rows.size() != 25) o.fail(std::to_string(report.rows.size()) + " rows");
    if (report.label != kExperimentalLabel) o.fail("report not labelled");
    for (const auto& row : report.rows)
      if (row.label != kExperimentalLabel) o.fail("row " + std::to_string(row.instance) + " not labelled");
  } catch (const std::exception& e) {
    o.fail(std::string("schema: ") + e.what());
  }
  if (o.pass) o.detail = "25 rows, deterministic, every row EXPERIMENTAL";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"theorem reproduction on finite spaces", theorem_reproduction},
      {"proof-bound audit", proof_bound_audit},
      {"a-priori certificate sharpness", certificate_sharpness},
      {"scalar corollary equivalence", corollary_equivalence},
      {"uniqueness", uniqueness},
      {"hypothesis checker soundness", checker_soundness},
      {"normal-constant audit", normal_constant_audit},
      {"CLI determinism", cli_determinism},
      {"experimental probe", experimental_probe},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    failures += !o.pass;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
