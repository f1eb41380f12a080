#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conefp/contraction.hpp"
#include "conefp/probe.hpp"
#include "conefp/problem_io.hpp"
#include "conefp/solver.hpp"

namespace conefp::cli {

enum class ExitStatus { Ok = 0, InputError = 2, HypothesisFailed = 3, NonConvergence = 4 };

const char* to_string(ExitStatus s);
inline int exit_code(ExitStatus s) { return static_cast<int>(s); }

enum class OutputFormat { Human, Machine };

struct GlobalOptions {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  OutputFormat output = OutputFormat::Human;
};

struct SolveFlags {
  std::optional<std::string> trace_path;
  std::optional<std::size_t> audit_gap;
  bool force = false;
};

struct ProbeFlags {
  double k = 2.0;
  double alpha_min = 0.5;
  double alpha_max = 0.9;
  std::size_t instances = 10;
  double eps = 1e-8;
};

struct RunReport {
  std::string command;
  ExitStatus exit_status = ExitStatus::Ok;
  std::string error;  // input errors only

  std::optional<NormalConstantAudit> normal_constant;
  std::optional<ValidationReport> cone_checks;
  std::optional<ValidationReport> metric_checks;
  std::optional<HypothesisReport> hypothesis_report;

  bool forced = false;                       // solve ran without certification
  std::vector<std::string> skipped_failures;  // what --force skipped over
  std::optional<FixedPointResult> result;
  std::optional<ConvergenceCertificate> certificate;
  std::optional<double> nonconvergence_residual;
  std::vector<std::pair<std::size_t, double>> trace_tail;  // (n, step norm)
  std::optional<BoundAudit> bound_audit;
  std::optional<std::size_t> audit_gap;
  std::optional<UniquenessProbe> uniqueness;
  std::optional<ProbeReport> probe;

  std::optional<ConeMetricSpace> space;  // for printing points
};

RunReport cmd_validate(const Problem& problem, const GlobalOptions& options);
RunReport cmd_check(const Problem& problem, const GlobalOptions& options);
RunReport cmd_solve(const Problem& problem, const GlobalOptions& options, const SolveFlags& flags);
RunReport cmd_probe(const ProbeFlags& flags, const GlobalOptions& options);

/// Loads `path` and runs the command; parse errors become input-error reports.
RunReport run_file_command(const std::string& command, const std::string& path, const GlobalOptions& options,
                           const SolveFlags& flags = {});

/// Flat key=value block, 17 significant digits.
std::string render_machine(const RunReport& report);
/// Summary for people, 6 significant digits.
std::string render_human(const RunReport& report);

/// Full command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conefp::cli
