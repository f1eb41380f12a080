#include "conefp/contraction.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "conefp/linops.hpp"
#include "conefp/random.hpp"

namespace conefp {

namespace {

Vector random_coords(Rng& rng, Eigen::Index m, double box) {
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = rng.uniform(-box, box);
  return v;
}

Point random_point(const ConeMetricSpace& space, Rng& rng, double box) {
  if (space.is_finite()) return Point::label(static_cast<std::size_t>(rng.integer(0, std::int64_t(space.size()) - 1)));
  return Point::coords(random_coords(rng, space.point_dim(), box));
}

double worst_facet(const Cone& cone, const Vector& v) {
  if (cone.facets().cols() == 0) return 0.0;
  return facet_values(cone, v).minCoeff();
}

std::string pair_text(const ConeMetricSpace& space, const Point& x, const Point& y) {
  return "(" + space.format_point(x) + ", " + space.format_point(y) + ")";
}

// Everything in the hypothesis list that depends only on the coefficients.
struct CoefficientFacts {
  double alpha_sum = 0.0;
  double s_norm = 0.0;
  std::optional<InvarianceWitness<double>> i3, hb, i4, i5;
  std::string resolvent_error;
};

CoefficientFacts derive_facts(const Coefficients& c, const Cone& cone, const CheckOptions& options) {
  const auto& E = cone.space();
  CoefficientFacts facts;
  const double n1 = operator_norm(c.A1, E);
  const double n2 = operator_norm(c.A2, E);
  const double n3 = operator_norm(c.A3, E);
  const double n4 = operator_norm(c.A4, E);
  facts.alpha_sum = n1 + n2 + n3 + n4 + n4;
  const Matrix sum12 = c.A1 + c.A2;
  facts.i3 = invariance_witness(sum12, cone, options.tol);
  facts.hb = invariance_witness(c.A2, cone, options.tol);
  facts.i4 = invariance_witness(c.A4, cone, options.tol);
  try {
    const Matrix M = resolvent(c.A3, c.A4, E, options.resolvent_tol);
    facts.i5 = invariance_witness(M, cone, options.tol);
    const Matrix S = M * (c.A1 + c.A2 + c.A4);
    facts.s_norm = operator_norm(S, E);
  } catch (const HypothesisFailure& e) {
    facts.resolvent_error = e.what();
  } catch (const NumericError& e) {
    facts.resolvent_error = e.what();
  }
  if (!facts.resolvent_error.empty()) facts.s_norm = std::numeric_limits<double>::infinity();
  return facts;
}

class WitnessSink {
 public:
  WitnessSink(HypothesisReport& report, std::size_t cap) : report_(report), cap_(cap) {}

  void add(Witness w) {
    auto& n = counts_[w.condition];
    if (n++ < cap_) report_.witnesses.push_back(std::move(w));
  }

 private:
  HypothesisReport& report_;
  std::size_t cap_;
  std::map<std::string, std::size_t> counts_;
};

}  // namespace

std::vector<std::pair<Point, Point>> enumerate_pairs(const ConeMetricSpace& space, const Mapping& T,
                                                     const PairSource& source) {
  std::vector<std::pair<Point, Point>> pairs;
  if (std::holds_alternative<AllPairs>(source)) {
    if (!space.is_finite()) throw Unsupported("all pairs can only be enumerated on a finite space");
    pairs.reserve(space.size() * space.size());
    for (std::size_t i = 0; i < space.size(); ++i)
      for (std::size_t j = 0; j < space.size(); ++j) pairs.emplace_back(Point::label(i), Point::label(j));
    return pairs;
  }
  const auto& sampled = std::get<SampledPairs>(source);
  if (sampled.count < 0) throw ContractViolation("sampled pairs: count must be >= 0");
  Rng rng(sampled.seed);
  pairs.reserve(static_cast<std::size_t>(sampled.count));
  for (int s = 0; s < sampled.count; ++s) {
    Point x = random_point(space, rng, sampled.box);
    if (space.is_finite()) {
      pairs.emplace_back(x, random_point(space, rng, sampled.box));
      continue;
    }
    // Mix independent pairs with pairs along the orbit, close pairs and the diagonal.
    switch (s % 4) {
      case 0: pairs.emplace_back(x, random_point(space, rng, sampled.box)); break;
      case 1: {
        Point y = T(x);
        pairs.emplace_back(std::move(x), std::move(y));
        break;
      }
      case 2: {
        Vector near = x.coords() + random_coords(rng, space.point_dim(), 1e-2);
        pairs.emplace_back(std::move(x), Point::coords(std::move(near)));
        break;
      }
      default: pairs.emplace_back(x, x); break;
    }
  }
  return pairs;
}

Vector contraction_residual(const ConeMetricSpace& space, const Mapping& T, const CoefficientFamily& coeffs,
                            const Point& x, const Point& y) {
  space.require_point(x, "contraction_residual");
  space.require_point(y, "contraction_residual");
  const Point tx = T(x);
  const Point ty = T(y);
  const Coefficients c = coeffs.at(x, y);
  return c.A1 * space.distance(x, y) + c.A2 * space.distance(x, tx) + c.A3 * space.distance(y, ty) +
         c.A4 * space.distance(x, ty) + c.A4 * space.distance(y, tx) - space.distance(tx, ty);
}

ValidationReport check_metric_axioms(const ConeMetricSpace& space, const PairSource& source, double tol) {
  const Cone& cone = space.cone();
  ValidationCheck positivity{"positivity (a)", true, ""};
  ValidationCheck symmetry{"symmetry (b)", true, ""};
  ValidationCheck triangle{"triangle (c)", true, ""};

  auto check_pair = [&](const Point& x, const Point& y) {
    if (!positivity.pass && !symmetry.pass) return;
    const Vector dxy = space.distance(x, y);
    const bool same = space.same_point(x, y);
    if (positivity.pass) {
      if (!cone_contains(cone, dxy, tol)) {
        positivity.pass = false;
        positivity.detail = "d" + pair_text(space, x, y) + " is not in P";
      } else if (same && space.normed_space().norm(dxy) > tol) {
        positivity.pass = false;
        positivity.detail = "d" + pair_text(space, x, y) + " is nonzero on the diagonal";
      } else if (!same && space.normed_space().norm(dxy) <= tol) {
        positivity.pass = false;
        positivity.detail = "d" + pair_text(space, x, y) + " vanishes for distinct points";
      }
    }
    if (symmetry.pass && !(dxy == space.distance(y, x))) {
      symmetry.pass = false;
      symmetry.detail = "d" + pair_text(space, x, y) + " != d" + pair_text(space, y, x);
    }
  };
  auto check_triple = [&](const Point& x, const Point& y, const Point& z) {
    if (!triangle.pass) return;
    const Vector slack = space.distance(x, z) + space.distance(z, y) - space.distance(x, y);
    if (!cone_contains(cone, slack, tol)) {
      triangle.pass = false;
      triangle.detail = "d(x,y) > d(x,z) + d(z,y) at x=" + space.format_point(x) + ", y=" + space.format_point(y) +
                        ", z=" + space.format_point(z);
    }
  };

  if (std::holds_alternative<AllPairs>(source)) {
    const auto pts = space.points();
    for (const auto& x : pts)
      for (const auto& y : pts) check_pair(x, y);
    for (const auto& x : pts)
      for (const auto& y : pts)
        for (const auto& z : pts) check_triple(x, y, z);
  } else {
    const auto& sampled = std::get<SampledPairs>(source);
    Rng rng(sampled.seed);
    for (int s = 0; s < sampled.count; ++s) {
      const Point x = random_point(space, rng, sampled.box);
      const Point y = random_point(space, rng, sampled.box);
      const Point z = random_point(space, rng, sampled.box);
      check_pair(x, y);
      check_pair(x, x);
      check_triple(x, y, z);
    }
  }

  ValidationReport report;
  report.checks = {positivity, symmetry, triangle};
  return report;
}

std::vector<std::string> HypothesisReport::failed_conditions() const {
  std::vector<std::string> out;
  if (!i1_pass) out.emplace_back("i1");
  if (!i2_pass) out.emplace_back("i2");
  if (!i3_pass) out.emplace_back("i3");
  if (!hb_pass) out.emplace_back("hb");
  if (!i4_pass) out.emplace_back("i4");
  if (!i5_pass) out.emplace_back("i5");
  if (!contraction_pass) out.emplace_back("I");
  return out;
}

const Witness* HypothesisReport::first_witness(const std::string& condition) const {
  for (const auto& w : witnesses)
    if (w.condition == condition) return &w;
  return nullptr;
}

HypothesisReport check_hypotheses(const ConeMetricSpace& space, const Mapping& T, const CoefficientFamily& coeffs,
                                  double k, const PairSource& source, const CheckOptions& options) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw ContractViolation("check_hypotheses: normal constant k must be >= 1");
  T.validate(space);
  coeffs.validate(space);
  const Cone& cone = space.cone();

  HypothesisReport report;
  report.k = k;
  report.declared_alpha = options.declared_alpha;
  report.declared_beta = options.declared_beta;
  report.exhaustive = space.is_finite() && std::holds_alternative<AllPairs>(source);

  const auto pairs = enumerate_pairs(space, T, source);
  report.pairs_checked = pairs.size();
  WitnessSink sink(report, options.max_witnesses_per_condition);

  std::optional<CoefficientFacts> constant_facts;
  if (const auto* c = coeffs.as_constant()) constant_facts = derive_facts(*c, cone, options);

  std::optional<std::pair<Point, Point>> alpha_pair, beta_pair;
  std::string beta_detail;

  auto invariance = [&](const char* name, bool& flag, const std::optional<InvarianceWitness<double>>& w,
                        const Point& x, const Point& y, const char* what) {
    if (!w) return;
    flag = false;
    std::ostringstream msg;
    msg << what << " maps generator " << w->generator << " outside P";
    sink.add(Witness{name, x, y, w->facet_value, static_cast<long>(w->generator), w->image, msg.str()});
  };

  for (const auto& [x, y] : pairs) {
    CoefficientFacts local;
    if (!constant_facts) local = derive_facts(coeffs.at(x, y), cone, options);
    const CoefficientFacts& facts = constant_facts ? *constant_facts : local;

    if (!alpha_pair || facts.alpha_sum > report.alpha || (!std::isfinite(facts.alpha_sum) && std::isfinite(report.alpha))) {
      report.alpha = facts.alpha_sum;
      alpha_pair = {x, y};
    }
    if (!beta_pair || facts.s_norm > report.beta || (!std::isfinite(facts.s_norm) && std::isfinite(report.beta))) {
      report.beta = facts.s_norm;
      beta_pair = {x, y};
      beta_detail = facts.resolvent_error;
    }

    invariance("i3", report.i3_pass, facts.i3, x, y, "A1 + A2");
    invariance("hb", report.hb_pass, facts.hb, x, y, "A2");
    invariance("i4", report.i4_pass, facts.i4, x, y, "A4");
    if (!facts.resolvent_error.empty()) {
      report.i5_pass = false;
      sink.add(Witness{"i5", x, y, std::numeric_limits<double>::infinity(), -1, Vector(), facts.resolvent_error});
    } else {
      invariance("i5", report.i5_pass, facts.i5, x, y, "(I - A3 - A4)^-1");
    }

    Vector r = contraction_residual(space, T, coeffs, x, y);
    if (!cone_contains(cone, r, options.tol)) {
      report.contraction_pass = false;
      const double worst = worst_facet(cone, r);
      sink.add(Witness{"I", x, y, worst, -1, std::move(r), "contractive condition residual leaves P"});
    }
  }

  // Joins failure reasons for one condition into a single witness detail.
  struct Reasons {
    std::ostringstream text;
    bool any = false;
    Reasons() { text.precision(17); }
    std::ostream& next() {
      if (any) text << "; ";
      any = true;
      return text;
    }
  };

  const double alpha_limit = 1.0 / k;
  if (alpha_pair) {
    Reasons why;
    if (!std::isfinite(report.alpha)) {
      why.next() << "coefficient norms are unbounded";
    } else if (report.alpha >= alpha_limit) {
      why.next() << "sum ||Ai|| + ||A4|| = " << report.alpha << " >= 1/k = " << alpha_limit;
    }
    if (options.declared_alpha) {
      const double declared = *options.declared_alpha;
      if (!(declared >= 0.0 && declared < alpha_limit)) {
        why.next() << "declared alpha " << declared << " outside [0, 1/k)";
      } else if (report.alpha > declared + 1e-9) {
        why.next() << "witnessed alpha " << report.alpha << " exceeds declared " << declared;
      }
    }
    if (why.any) {
      report.i1_pass = false;
      sink.add(Witness{"i1", alpha_pair->first, alpha_pair->second, report.alpha, -1, Vector(), why.text.str()});
    }
  }
  if (beta_pair) {
    Reasons why;
    if (!std::isfinite(report.beta)) {
      why.next() << "S(x, y) undefined: " << beta_detail;
    } else if (report.beta >= 1.0) {
      why.next() << "||S(x, y)|| = " << report.beta << " >= 1";
    }
    if (options.declared_beta) {
      const double declared = *options.declared_beta;
      if (!(declared >= 0.0 && declared < 1.0)) {
        why.next() << "declared beta " << declared << " outside [0, 1)";
      } else if (report.beta > declared + 1e-9) {
        why.next() << "witnessed beta " << report.beta << " exceeds declared " << declared;
      }
    }
    if (why.any) {
      report.i2_pass = false;
      sink.add(Witness{"i2", beta_pair->first, beta_pair->second, report.beta, -1, Vector(), why.text.str()});
    }
  }
  return report;
}

CoefficientFamily reduce_scalar(double a1, double a2, double a3, double a4) {
  for (double a : {a1, a2, a3, a4}) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ContractViolation("reduce_scalar: coefficients must be finite and >= 0");
  }
  auto scalar = [](double a) { return Matrix::Constant(1, 1, a); };
  return CoefficientFamily::constant(Coefficients{scalar(a1), scalar(a2), scalar(a3), scalar(a4)});
}

}  // namespace conefp
