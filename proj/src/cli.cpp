#include "conefp/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "conefp/format.hpp"

namespace conefp::cli {

namespace {

constexpr std::size_t kTraceTail = 5;

RunReport input_error(std::string command, const std::string& message) {
  RunReport r;
  r.command = std::move(command);
  r.exit_status = ExitStatus::InputError;
  r.error = message;
  return r;
}

Problem with_globals(Problem problem, const GlobalOptions& options) {
  if (options.tol) problem.check.tol = *options.tol;
  if (options.seed) {
    problem.check.seed = *options.seed;
    if (auto* sp = std::get_if<SampledPairs>(&problem.check.pair_source)) sp->seed = *options.seed;
  }
  return problem;
}

// Normal-constant audit, cone and metric axioms. Returns false on input error.
bool run_validation(const Problem& p, RunReport& r) {
  r.space = p.space;
  const Cone& cone = p.space.cone();
  r.normal_constant = audit_normal_constant(cone, p.check.normal_samples, p.check.seed);
  if (!r.normal_constant->consistent) {
    r.exit_status = ExitStatus::InputError;
    r.error = "normal constant: declared k = " + format_exact(r.normal_constant->declared) +
              " is below the sampled lower bound " + format_exact(r.normal_constant->lower_bound) +
              "; k must be at least the audit value";
    return false;
  }
  r.cone_checks = validate_cone(cone, p.check.tol);
  r.metric_checks = check_metric_axioms(p.space, p.check.pair_source, p.check.tol);
  return true;
}

bool validation_ok(const RunReport& r) { return r.cone_checks->ok() && r.metric_checks->ok(); }

std::vector<std::string> validation_failures(const RunReport& r) {
  std::vector<std::string> out;
  for (const auto& c : r.cone_checks->checks)
    if (!c.pass) out.push_back("cone: " + c.name);
  for (const auto& c : r.metric_checks->checks)
    if (!c.pass) out.push_back("metric: " + c.name);
  return out;
}

HypothesisReport run_hypotheses(const Problem& p, std::optional<double> declared_beta) {
  CheckOptions options;
  options.tol = p.check.tol;
  options.resolvent_tol = p.check.resolvent_tol;
  options.declared_alpha = p.check.alpha;
  options.declared_beta = p.check.beta ? p.check.beta : declared_beta;
  return check_hypotheses(p.space, *p.mapping, *p.coefficients, p.space.cone().normal_constant(), p.check.pair_source,
                          options);
}

void write_trace(const std::string& path, const ConeMetricSpace& space, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw InputError(path, "cannot write trace file");
  for (std::size_t n = 0; n < trace.points.size(); ++n) {
    const Point& x = trace.points[n];
    out << n;
    if (x.is_label()) {
      out << ' ' << x.index();
    } else {
      for (Eigen::Index i = 0; i < x.coords().size(); ++i) out << ' ' << format_exact(x.coords()(i));
    }
    out << ' ' << (n < trace.step_norms.size() ? format_exact(trace.step_norms[n]) : std::string("nan")) << '\n';
  }
  (void)space;
}

void keep_tail(RunReport& r, const IterationTrace& trace) {
  const std::size_t n = trace.step_norms.size();
  for (std::size_t i = n > kTraceTail ? n - kTraceTail : 0; i < n; ++i) r.trace_tail.emplace_back(i, trace.step_norms[i]);
}

// Machine keys: lowercase, runs of other characters become one underscore.
std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string point_text(const ConeMetricSpace& space, const Point& x, bool exact) {
  if (x.is_label()) return space.labels()[x.index()];
  std::string out;
  for (Eigen::Index i = 0; i < x.coords().size(); ++i) {
    if (i > 0) out += ' ';
    out += exact ? format_exact(x.coords()(i)) : format_short(x.coords()(i));
  }
  return out;
}

std::string vector_text(const Vector& v, bool exact) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += exact ? format_exact(v(i)) : format_short(v(i));
  }
  return out;
}

const char* verdict(const HypothesisReport& h) {
  if (!h.passed()) return "failed";
  return h.exhaustive ? "verified" : "not falsified";
}

class Lines {
 public:
  void put(const std::string& key, const std::string& value) { out_ << key << '=' << value << '\n'; }
  void put(const std::string& key, const char* value) { out_ << key << '=' << value << '\n'; }
  void put(const std::string& key, double value) { put(key, format_exact(value)); }
  void put(const std::string& key, std::size_t value) { out_ << key << '=' << value << '\n'; }
  void put(const std::string& key, bool value) { put(key, format_bool(value)); }
  void put_pass(const std::string& key, bool pass) { put(key, pass ? "pass" : "fail"); }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace

const char* to_string(ExitStatus s) {
  switch (s) {
    case ExitStatus::Ok: return "ok";
    case ExitStatus::InputError: return "input-error";
    case ExitStatus::HypothesisFailed: return "hypothesis-failed";
    case ExitStatus::NonConvergence: return "non-convergence";
  }
  return "?";
}

RunReport cmd_validate(const Problem& problem, const GlobalOptions& options) {
  const Problem p = with_globals(problem, options);
  RunReport r;
  r.command = "validate";
  if (!run_validation(p, r)) return r;
  if (!validation_ok(r)) r.exit_status = ExitStatus::HypothesisFailed;
  return r;
}

RunReport cmd_check(const Problem& problem, const GlobalOptions& options) {
  const Problem p = with_globals(problem, options);
  if (!p.mapping) return input_error("check", "mapping: missing section");
  if (!p.coefficients) return input_error("check", "coefficients: missing section");
  RunReport r;
  r.command = "check";
  if (!run_validation(p, r)) return r;
  if (!validation_ok(r)) {
    r.exit_status = ExitStatus::HypothesisFailed;
    return r;
  }
  r.hypothesis_report = run_hypotheses(p, std::nullopt);
  if (!r.hypothesis_report->passed()) r.exit_status = ExitStatus::HypothesisFailed;
  return r;
}

RunReport cmd_solve(const Problem& problem, const GlobalOptions& options, const SolveFlags& flags) {
  const Problem p = with_globals(problem, options);
  if (!p.mapping) return input_error("solve", "mapping: missing section");
  if (!p.solve || !p.solve->x0) return input_error("solve", "solve: missing section");
  RunReport r;
  r.command = "solve";
  r.forced = flags.force;
  if (!flags.force && !p.coefficients)
    return input_error("solve", "coefficients: missing section (use --force with solve.beta to skip certification)");
  if (!run_validation(p, r)) return r;

  std::vector<std::string> failures = validation_failures(r);
  if (p.coefficients && failures.empty()) {
    r.hypothesis_report = run_hypotheses(p, p.solve->beta);
    for (const auto& c : r.hypothesis_report->failed_conditions()) failures.push_back("hypothesis: " + c);
  } else if (!p.coefficients) {
    failures.push_back("coefficients: missing");
  }
  if (!failures.empty()) {
    if (!flags.force) {
      r.exit_status = ExitStatus::HypothesisFailed;
      return r;
    }
    r.skipped_failures = failures;
  }

  double beta = 0.0;
  std::string source;
  if (p.solve->beta) {
    beta = *p.solve->beta;
    source = "declared";
  } else if (r.hypothesis_report && r.hypothesis_report->beta < 1.0) {
    beta = r.hypothesis_report->beta;
    source = "witnessed";
  } else {
    r.exit_status = ExitStatus::InputError;
    r.error = "solve.beta: no usable beta (the witnessed value is not below 1); declare one to force a run";
    return r;
  }

  const double k = p.space.cone().normal_constant();
  SolveOptions so;
  so.max_iter = p.solve->max_iter;
  so.record_trace = flags.trace_path.has_value() || flags.audit_gap.has_value();
  so.beta_source = source;
  try {
    FixedPointResult result = picard_solve(p.space, *p.mapping, k, beta, *p.solve->x0, p.solve->eps, so);
    r.certificate = result.certificate;
    if (result.trace) {
      if (flags.trace_path) write_trace(*flags.trace_path, p.space, *result.trace);
      if (flags.audit_gap) {
        r.audit_gap = flags.audit_gap;
        r.bound_audit = verify_proof_bounds(p.space, *result.trace, k, beta, *flags.audit_gap);
      }
      result.trace.reset();
    }
    r.result = std::move(result);
  } catch (const NonConvergence& e) {
    r.exit_status = ExitStatus::NonConvergence;
    r.certificate = e.certificate();
    r.nonconvergence_residual = e.residual_norm();
    r.error = e.what();
    keep_tail(r, e.trace());
    if (flags.trace_path) write_trace(*flags.trace_path, p.space, e.trace());
    return r;
  } catch (const HypothesisFailure& e) {
    r.exit_status = ExitStatus::HypothesisFailed;
    r.error = e.what();
    return r;
  } catch (const InputError& e) {
    return input_error("solve", e.what());
  }

  if (!p.solve->seeds.empty()) {
    std::vector<Point> seeds{*p.solve->x0};
    seeds.insert(seeds.end(), p.solve->seeds.begin(), p.solve->seeds.end());
    try {
      UniquenessProbe probe = uniqueness_probe(p.space, *p.mapping, k, beta, seeds, p.solve->eps);
      for (auto& run : probe.runs) run.trace.reset();
      r.uniqueness = std::move(probe);
    } catch (const NonConvergence& e) {
      r.exit_status = ExitStatus::NonConvergence;
      r.error = std::string("uniqueness probe: ") + e.what();
    }
  }
  return r;
}

RunReport cmd_probe(const ProbeFlags& flags, const GlobalOptions& options) {
  if (!(flags.k > 1.0) || !std::isfinite(flags.k)) return input_error("probe", "--k: must be greater than 1");
  if (flags.alpha_min < 1.0 / flags.k - 1e-12)
    return input_error("probe", "--alpha-min: must be at least 1/k = " + format_exact(1.0 / flags.k));
  if (!(flags.alpha_max < 1.0)) return input_error("probe", "--alpha-max: must be below 1");
  if (flags.alpha_min > flags.alpha_max) return input_error("probe", "--alpha-min: exceeds --alpha-max");
  RunReport r;
  r.command = "probe";
  r.probe = probe_open_problem(options.seed.value_or(0), {flags.k, flags.k}, {flags.alpha_min, flags.alpha_max},
                               flags.instances, flags.eps);
  return r;
}

RunReport run_file_command(const std::string& command, const std::string& path, const GlobalOptions& options,
                           const SolveFlags& flags) {
  try {
    const Problem problem = load_problem(path);
    if (command == "validate") return cmd_validate(problem, options);
    if (command == "check") return cmd_check(problem, options);
    if (command == "solve") return cmd_solve(problem, options, flags);
    return input_error(command, "unknown command");
  } catch (const InputError& e) {
    return input_error(command, e.what());
  } catch (const ContractViolation& e) {
    return input_error(command, e.what());
  } catch (const Unsupported& e) {
    return input_error(command, e.what());
  }
}

std::string render_machine(const RunReport& r) {
  if (r.probe) {
    Lines l;
    l.put("command", r.command);
    l.put("exit_status", to_string(r.exit_status));
    return l.str() + r.probe->to_text();
  }
  Lines l;
  l.put("command", r.command);
  l.put("exit_status", to_string(r.exit_status));
  if (!r.error.empty()) l.put("error", r.error);
  if (r.normal_constant) {
    l.put("normal_constant.declared", r.normal_constant->declared);
    l.put("normal_constant.lower_bound", r.normal_constant->lower_bound);
    l.put("normal_constant.consistent", r.normal_constant->consistent);
  }
  if (r.cone_checks) {
    for (const auto& c : r.cone_checks->checks) {
      l.put_pass("cone." + slug(c.name), c.pass);
      if (!c.pass) l.put("cone." + slug(c.name) + ".detail", c.detail);
    }
  }
  if (r.metric_checks) {
    for (const auto& c : r.metric_checks->checks) {
      l.put_pass("metric." + slug(c.name), c.pass);
      if (!c.pass) l.put("metric." + slug(c.name) + ".detail", c.detail);
    }
  }
  if (const auto& h = r.hypothesis_report) {
    l.put("hypotheses.mode", h->exhaustive ? "exhaustive" : "sampled");
    l.put("hypotheses.pairs_checked", h->pairs_checked);
    l.put("hypotheses.k", h->k);
    l.put("hypotheses.alpha", h->alpha);
    l.put("hypotheses.beta", h->beta);
    if (h->declared_alpha) l.put("hypotheses.declared_alpha", *h->declared_alpha);
    if (h->declared_beta) l.put("hypotheses.declared_beta", *h->declared_beta);
    l.put_pass("hypotheses.I", h->contraction_pass);
    l.put_pass("hypotheses.i1", h->i1_pass);
    l.put_pass("hypotheses.i2", h->i2_pass);
    l.put_pass("hypotheses.i3", h->i3_pass);
    l.put_pass("hypotheses.hb", h->hb_pass);
    l.put_pass("hypotheses.i4", h->i4_pass);
    l.put_pass("hypotheses.i5", h->i5_pass);
    l.put("hypotheses.verdict", verdict(*h));
    l.put("hypotheses.witnesses", h->witnesses.size());
    for (std::size_t i = 0; i < h->witnesses.size(); ++i) {
      const Witness& w = h->witnesses[i];
      const std::string key = "hypotheses.witness." + std::to_string(i) + ".";
      l.put(key + "condition", w.condition);
      l.put(key + "x", point_text(*r.space, w.x, true));
      l.put(key + "y", point_text(*r.space, w.y, true));
      l.put(key + "value", w.value);
      if (w.generator >= 0) l.put(key + "generator", static_cast<std::size_t>(w.generator));
      if (w.residual.size() > 0) l.put(key + "residual", vector_text(w.residual, true));
      l.put(key + "detail", w.detail);
    }
  }
  if (r.command == "solve" && r.exit_status != ExitStatus::InputError) {
    l.put("solve.forced", r.forced);
    for (std::size_t i = 0; i < r.skipped_failures.size(); ++i)
      l.put("solve.skipped." + std::to_string(i), r.skipped_failures[i]);
  }
  if (const auto& c = r.certificate) {
    l.put("certificate.k", c->k);
    l.put("certificate.beta", c->beta);
    l.put("certificate.beta_source", c->beta_source);
    l.put("certificate.d01_norm", c->d01_norm);
    l.put("certificate.n_planned", c->n_planned);
    l.put("certificate.eps", c->eps);
    l.put("certificate.bound_at_n", c->bound_at_n);
  }
  if (const auto& res = r.result) {
    l.put("result.point", point_text(*r.space, res->point, true));
    l.put("result.residual_norm", res->residual_norm);
    l.put("result.iterations_used", res->iterations_used);
  }
  if (r.nonconvergence_residual) {
    l.put("nonconvergence.residual_norm", *r.nonconvergence_residual);
    for (const auto& [n, s] : r.trace_tail) l.put("nonconvergence.trace." + std::to_string(n), s);
  }
  if (const auto& a = r.bound_audit) {
    l.put("audit.max_gap", *r.audit_gap);
    l.put("audit.checks", a->checks);
    l.put("audit.violations", a->violations.size());
    for (std::size_t i = 0; i < a->violations.size(); ++i) {
      const BoundViolation& v = a->violations[i];
      const std::string key = "audit.violation." + std::to_string(i) + ".";
      l.put(key + "kind", v.kind);
      l.put(key + "n", v.n);
      l.put(key + "p", v.p);
      l.put(key + "lhs", v.lhs);
      l.put(key + "rhs", v.rhs);
    }
  }
  if (const auto& u = r.uniqueness) {
    l.put("uniqueness.runs", u->runs.size());
    l.put("uniqueness.unique", u->unique);
    l.put("uniqueness.max_spread", u->max_spread);
  }
  return l.str();
}

std::string render_human(const RunReport& r) {
  std::ostringstream out;
  out << r.command << ": " << to_string(r.exit_status) << '\n';
  if (!r.error.empty()) out << "  error: " << r.error << '\n';
  if (r.normal_constant && r.normal_constant->consistent)
    out << "  normal constant k = " << format_short(r.normal_constant->declared) << " (sampled lower bound "
        << format_short(r.normal_constant->lower_bound) << ")\n";
  auto checks = [&](const char* what, const std::optional<ValidationReport>& rep) {
    if (!rep) return;
    std::size_t failed = 0;
    for (const auto& c : rep->checks) failed += !c.pass;
    if (failed == 0) {
      out << "  " << what << " axioms: all " << rep->checks.size() << " hold\n";
      return;
    }
    for (const auto& c : rep->checks)
      if (!c.pass) out << "  " << what << " axiom " << c.name << " fails: " << c.detail << '\n';
  };
  checks("cone", r.cone_checks);
  checks("metric", r.metric_checks);
  if (const auto& h = r.hypothesis_report) {
    out << "  hypotheses " << verdict(*h) << " over " << h->pairs_checked << (h->exhaustive ? " pairs" : " sampled pairs")
        << ": alpha = " << format_short(h->alpha) << ", beta = " << format_short(h->beta)
        << ", k = " << format_short(h->k) << '\n';
    const auto failed = h->failed_conditions();
    if (!failed.empty()) {
      out << "  failing:";
      for (const auto& f : failed) out << ' ' << f;
      out << '\n';
      for (const auto& w : h->witnesses) {
        out << "    " << w.condition << " at (" << point_text(*r.space, w.x, false) << ", "
            << point_text(*r.space, w.y, false) << "), value " << format_short(w.value);
        if (!w.detail.empty()) out << ": " << w.detail;
        out << '\n';
      }
    }
  }
  if (r.forced) {
    out << "  certification skipped (--force)";
    if (!r.skipped_failures.empty()) {
      out << ":";
      for (const auto& f : r.skipped_failures) out << " [" << f << "]";
    }
    out << '\n';
  }
  if (const auto& res = r.result) {
    out << "  fixed point " << point_text(*r.space, res->point, false) << " after " << res->iterations_used
        << " iterations, residual " << format_short(res->residual_norm) << '\n';
  }
  if (const auto& c = r.certificate) {
    out << "  certificate: beta = " << format_short(c->beta) << " (" << c->beta_source << "), n = " << c->n_planned
        << ", bound " << format_short(c->bound_at_n) << " <= eps " << format_short(c->eps) << '\n';
  }
  if (r.nonconvergence_residual) {
    out << "  residual " << format_short(*r.nonconvergence_residual) << "; last steps:";
    for (const auto& [n, s] : r.trace_tail) out << ' ' << n << ':' << format_short(s);
    out << '\n';
  }
  if (const auto& a = r.bound_audit) {
    out << "  proof-bound audit (gap " << *r.audit_gap << "): " << a->checks << " checks, " << a->violations.size()
        << " violations\n";
  }
  if (const auto& u = r.uniqueness) {
    out << "  uniqueness over " << u->runs.size() << " starts: " << (u->unique ? "agree" : "disagree")
        << " (spread " << format_short(u->max_spread) << ")\n";
  }
  if (const auto& p = r.probe) {
    out << "  " << kExperimentalLabel << ": observations only, no theorem covers alpha in [1/k, 1)\n";
    out << "  instance  k          alpha      design       conv  iters  fixed  limits\n";
    std::size_t generated = 0, converged = 0, multiple = 0;
    for (const auto& row : p->rows) {
      char buf[160];
      if (row.generated) {
        std::snprintf(buf, sizeof buf, "  %-8zu  %-9s  %-9s  %-11s  %-4s  %-5zu  %-5zu  %zu", row.instance,
                      format_short(row.k).c_str(), format_short(row.alpha).c_str(), row.design.c_str(),
                      row.converged ? "yes" : "no", row.max_iterations, row.fixed_points, row.distinct_limits);
      } else {
        std::snprintf(buf, sizeof buf, "  %-8zu  %-9s  %s", row.instance, format_short(row.k).c_str(), row.note.c_str());
      }
      out << buf << '\n';
      generated += row.generated;
      converged += row.generated && row.converged;
      multiple += row.fixed_points > 1;
    }
    out << "  summary: " << p->rows.size() << " rows, " << generated << " generated, " << converged << " converged, "
        << multiple << " with several fixed points [" << kExperimentalLabel << "]\n";
  }
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed points on cone metric spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions options;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string output = "human";
  auto* tol_opt = app.add_option("--tol", tol, "Membership tolerance")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampled checks and the probe");
  app.add_option("--output", output, "Report format")->check(CLI::IsMember({"human", "machine"}));

  std::string file;
  SolveFlags solve_flags;
  std::string trace_path;
  std::size_t audit_gap = 0;
  ProbeFlags probe_flags;

  auto* validate = app.add_subcommand("validate", "Check cone and metric axioms");
  validate->add_option("file", file, "Problem file")->required();
  auto* check = app.add_subcommand("check", "Check the contraction hypotheses");
  check->add_option("file", file, "Problem file")->required();
  auto* solve = app.add_subcommand("solve", "Run Picard iteration with a certificate");
  solve->add_option("file", file, "Problem file")->required();
  auto* trace_opt = solve->add_option("--trace", trace_path, "Write the iteration trace to FILE");
  auto* gap_opt = solve->add_option("--audit-gap", audit_gap, "Audit the proof bounds up to gap N")
                      ->check(CLI::PositiveNumber);
  solve->add_flag("--force", solve_flags.force, "Solve even when certification fails");
  auto* probe = app.add_subcommand("probe", "Experimental sweep with alpha in [1/k, 1)");
  probe->add_option("--k", probe_flags.k, "Normal constant (> 1)");
  probe->add_option("--alpha-min", probe_flags.alpha_min, "Lower end of the alpha range");
  probe->add_option("--alpha-max", probe_flags.alpha_max, "Upper end of the alpha range");
  probe->add_option("--instances", probe_flags.instances, "Number of instances");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ExitStatus::InputError);
  }

  if (*tol_opt) options.tol = tol;
  if (*seed_opt) options.seed = seed;
  options.output = output == "machine" ? OutputFormat::Machine : OutputFormat::Human;
  if (*trace_opt) solve_flags.trace_path = trace_path;
  if (*gap_opt) solve_flags.audit_gap = audit_gap;

  RunReport report;
  if (probe->parsed()) {
    report = cmd_probe(probe_flags, options);
  } else {
    const std::string command = validate->parsed() ? "validate" : check->parsed() ? "check" : "solve";
    report = run_file_command(command, file, options, solve_flags);
  }
  out << (options.output == OutputFormat::Machine ? render_machine(report) : render_human(report));
  if (report.exit_status == ExitStatus::InputError && options.output == OutputFormat::Machine)
    err << "error: " << report.error << '\n';
  return exit_code(report.exit_status);
}

}  // namespace conefp::cli
