#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conefp/contraction.hpp"
#include "conefp/space.hpp"

// Problem files are UTF-8 JSON documents with the top-level sections
// `space`, `mapping`, `coefficients`, `solve` and `check`. Parsing is strict:
// an unknown key anywhere is an input error.

namespace conefp {

/// Malformed or inconsistent problem file. `where` is a section path such as
/// "space.cone.generators[2]" (or "line 3, column 7" for JSON syntax errors).
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct SolveSection {
  std::optional<Point> x0;
  double eps = 1e-8;
  std::optional<std::size_t> max_iter;
  std::optional<double> beta;
  std::vector<Point> seeds;  // extra starts for the uniqueness probe
};

struct CheckSection {
  PairSource pair_source = AllPairs{};
  double tol = kDefaultMembershipTol;
  double resolvent_tol = 1e-10;
  std::optional<double> alpha;
  std::optional<double> beta;
  int normal_samples = 4096;
  std::uint64_t seed = 0;  // normal-constant audit and sampled metric checks
};

struct Problem {
  ConeMetricSpace space;
  std::optional<Mapping> mapping;
  std::optional<CoefficientFamily> coefficients;
  std::optional<SolveSection> solve;
  CheckSection check;
};

Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

/// Problem-file text for a space, mapping and coefficients (plus optional
/// solve/check sections). Numbers are written in shortest round-trip form.
std::string serialize_problem(const Problem& problem);

}  // namespace conefp
