#include "conefp/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conefp/linops.hpp"

namespace conefp {

Cone scalar_cone() {
  return Cone::orthant(Space(1, NormKind::Infinity));
}

Cone wedge_cone(double angle) {
  if (!(angle > 0.0 && angle < std::numbers::pi)) throw ContractViolation("wedge_cone: angle must lie in (0, pi)");
  Matrix G(2, 2), F(2, 2);
  G << 1.0, std::cos(angle), 0.0, std::sin(angle);
  // Inward normals of the two boundary rays.
  F << 0.0, std::sin(angle), 1.0, -std::cos(angle);
  const double k = angle <= std::numbers::pi / 2 ? 1.0 : 1.0 / std::sin(angle);
  return Cone(Space(2, NormKind::Two), G, F, std::max(1.0, k));
}

Cone polygonal_cone(int sides, NormKind norm, double normal_constant) {
  if (sides < 3) throw ContractViolation("polygonal_cone: need at least 3 sides");
  Matrix G(3, sides), F(3, sides);
  for (int j = 0; j < sides; ++j) {
    const double t = 2.0 * std::numbers::pi * j / sides;
    G.col(j) << std::cos(t), std::sin(t), 1.0;
  }
  for (int j = 0; j < sides; ++j) {
    const Eigen::Vector3d a = G.col(j);
    const Eigen::Vector3d b = G.col((j + 1) % sides);
    Eigen::Vector3d f = a.cross(b);
    if (f.z() < 0) f = -f;
    F.col(j) = f;
  }
  const Space space = norm == NormKind::Weighted ? Space::weighted(Vector::Ones(3)) : Space(3, norm);
  return Cone(space, G, F, normal_constant);
}

ConeMetricSpace make_scalar_space(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  return ConeMetricSpace::finite(scalar_cone(), std::move(labels), WeightedLift{BaseMetric::Discrete, Vector::Ones(1)});
}

ConeMetricSpace make_scalar_line() {
  return ConeMetricSpace::euclidean(scalar_cone(), 1, WeightedLift{BaseMetric::Euclidean, Vector::Ones(1)});
}

ConeMetricSpace make_lifted_space(Eigen::Index m, Cone cone, Vector w, BaseMetric base) {
  return ConeMetricSpace::euclidean(std::move(cone), m, WeightedLift{base, std::move(w)});
}

std::vector<Point> brute_force_fixed_points(const ConeMetricSpace& space, const Mapping& T) {
  if (!space.is_finite()) throw Unsupported("brute_force_fixed_points: space must be finite");
  T.validate(space);
  std::vector<Point> fixed;
  for (const auto& x : space.points())
    if (T(x) == x) fixed.push_back(x);
  return fixed;
}

CorollaryReport verify_corollary_equivalence(double a1, double a2, double a3, double a4) {
  if (!(a3 + a4 < 1.0)) throw ContractViolation("verify_corollary_equivalence: requires a3 + a4 < 1");
  const CoefficientFamily coeffs = reduce_scalar(a1, a2, a3, a4);
  const ConeMetricSpace space = make_scalar_space({"a", "b"});
  const Mapping T = Mapping::table({0, 0});
  const HypothesisReport hyp = check_hypotheses(space, T, coeffs, 1.0, AllPairs{});

  CorollaryReport report;
  report.alpha = hyp.alpha;
  report.beta = hyp.beta;
  report.expected_alpha = a1 + a2 + a3 + 2.0 * a4;
  report.expected_beta = (a1 + a2 + a4) / (1.0 - a3 - a4);
  report.invariance_pass = hyp.i3_pass && hyp.hb_pass && hyp.i4_pass && hyp.i5_pass;
  report.passed = std::abs(report.alpha - report.expected_alpha) <= 1e-12 &&
                  std::abs(report.beta - report.expected_beta) <= 1e-12 && report.invariance_pass;
  return report;
}

std::string point_label(std::size_t i, std::size_t n) {
  std::size_t width = 1;
  for (std::size_t m = n > 0 ? n - 1 : 0; m >= 10; m /= 10) ++width;
  std::string digits = std::to_string(i);
  return "p" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

namespace {

// Nonnegative combination of rank-one maps v -> g <f, v>, scaled to unit norm.
Matrix random_invariant_operator(Rng& rng, const Cone& cone) {
  const auto& G = cone.generators();
  const auto& F = cone.facets();
  const auto p = cone.dim();
  Matrix E = Matrix::Zero(p, p);
  for (Eigen::Index a = 0; a < G.cols(); ++a)
    for (Eigen::Index b = 0; b < F.cols(); ++b)
      if (rng.coin()) E += rng.uniform() * G.col(a) * F.col(b).transpose();
  const double n = operator_norm(E, cone.space());
  if (n > 0.0) E /= n;
  return E;
}

Vector interior_weight(Rng& rng, const Cone& cone) {
  const auto& G = cone.generators();
  Vector lambda(G.cols());
  for (Eigen::Index j = 0; j < G.cols(); ++j) lambda[j] = rng.uniform(0.2, 1.0);
  return G * lambda;
}

double alpha_of(const Coefficients& c, const Space& E) {
  const double n4 = operator_norm(c.A4, E);
  return operator_norm(c.A1, E) + operator_norm(c.A2, E) + operator_norm(c.A3, E) + 2.0 * n4;
}

}  // namespace

FiniteInstance build_tree_instance(Rng& rng, const Cone& cone, double k, const TreeInstanceSpec& spec) {
  const std::size_t n = spec.space_size;
  if (n < 1) throw ContractViolation("build_tree_instance: space_size must be >= 1");
  if (!(spec.contraction_factor > 0.0 && spec.contraction_factor < 1.0))
    throw ContractViolation("build_tree_instance: contraction factor must lie in (0, 1)");
  const std::size_t roots = std::clamp<std::size_t>(spec.roots, 1, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.integer(0, std::int64_t(i) - 1))]);

  std::vector<std::size_t> parent(n), depth(n, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t node = order[idx];
    if (idx < roots) {
      parent[node] = node;
    } else {
      parent[node] = order[static_cast<std::size_t>(rng.integer(0, std::int64_t(idx) - 1))];
      depth[node] = depth[parent[node]] + 1;
    }
  }
  const double max_depth = static_cast<double>(*std::max_element(depth.begin(), depth.end()));

  const double q = spec.contraction_factor;
  const double growth[2] = {1.0 / q, (1.0 / q) * rng.uniform(1.0, 1.5)};
  const double scale[2] = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
  const Vector w[2] = {interior_weight(rng, cone), interior_weight(rng, cone)};
  auto height = [&](int j, std::size_t x) {
    return scale[j] * std::pow(growth[j], static_cast<double>(depth[x]) - max_depth);
  };

  TableMetric table{n, std::vector<Vector>(n * n, Vector::Zero(cone.dim()))};
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      for (int j = 0; j < 2; ++j) table.at(x, y) += std::max(height(j, x), height(j, y)) * w[j];
    }
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(point_label(i, n));
  ConeMetricSpace space = ConeMetricSpace::finite(cone, std::move(labels), std::move(table));

  const auto p = cone.dim();
  const Matrix id = Matrix::Identity(p, p);
  const double a1 = 1.01 * q;
  Matrix E[4];
  double t[4], b[4];
  for (int i = 0; i < 4; ++i) {
    E[i] = random_invariant_operator(rng, cone);
    t[i] = rng.uniform();
    b[i] = i == 0 ? 0.0 : rng.uniform();
  }
  auto family_at = [&](double s) {
    return Coefficients{a1 * id + s * t[0] * E[0], s * (b[1] * id + t[1] * E[1]), s * (b[2] * id + t[2] * E[2]),
                        s * (b[3] * id + t[3] * E[3])};
  };

  // Scale the non-identity part until alpha reaches the target.
  double s = 0.0;
  if (alpha_of(family_at(0.0), cone.space()) < spec.alpha_target) {
    double hi = 1.0;
    while (alpha_of(family_at(hi), cone.space()) < spec.alpha_target && hi < 1e6) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (alpha_of(family_at(mid), cone.space()) < spec.alpha_target ? lo : hi) = mid;
    }
    s = lo;
  }

  CoefficientFamily coeffs = CoefficientFamily::constant(family_at(s));
  if (spec.per_pair) {
    std::vector<Coefficients> per(n * n);
    for (auto& c : per) c = family_at(s * rng.uniform(0.5, 1.0));
    coeffs = CoefficientFamily::per_pair(n, std::move(per));
  }
  return FiniteInstance{std::move(space), Mapping::table(std::move(parent)), std::move(coeffs), k};
}

FiniteInstance generate_certified_instance(std::uint64_t seed, std::size_t space_size, const Cone& cone, double k) {
  if (!(k >= 1.0)) throw ContractViolation("generate_certified_instance: k must be >= 1");
  if (!validate_cone(cone).ok()) throw ContractViolation("generate_certified_instance: cone fails validation");
  if (!cone.solid()) throw ContractViolation("generate_certified_instance: cone must have nonempty interior");
  const double limit = 0.9 / k;
  for (std::uint64_t attempt = 0; attempt < 32; ++attempt) {
    Rng rng = Rng::substream(seed, attempt);
    TreeInstanceSpec spec;
    spec.space_size = space_size;
    spec.roots = 1;
    spec.contraction_factor = rng.uniform(0.3, 0.7) * limit;
    const double a1 = 1.01 * spec.contraction_factor;
    spec.alpha_target = a1 + rng.uniform() * 0.999 * (limit - a1);
    spec.per_pair = rng.coin();
    FiniteInstance instance = build_tree_instance(rng, cone, k, spec);
    const HypothesisReport report = check_hypotheses(instance.space, instance.T, instance.coeffs, k, AllPairs{});
    if (report.passed() && report.alpha <= limit && report.beta <= 0.9) return instance;
  }
  throw GenerationFailure("generate_certified_instance: no certified instance after 32 attempts (seed " +
                          std::to_string(seed) + ")");
}

AffineInstance generate_affine_instance(std::uint64_t seed) {
  Rng rng = Rng::substream(seed, 0);
  const auto m = static_cast<Eigen::Index>(rng.integer(1, 3));
  const auto p = static_cast<Eigen::Index>(rng.integer(1, 3));
  const NormKind kinds[3] = {NormKind::One, NormKind::Two, NormKind::Infinity};
  const Space E(p, kinds[rng.integer(0, 2)]);

  Vector w(p);
  for (Eigen::Index i = 0; i < p; ++i) w[i] = rng.uniform(0.2, 2.0);

  Matrix B(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) B(i, j) = rng.uniform(-1.0, 1.0);
  const double target = rng.uniform(0.2, 0.9);
  Eigen::JacobiSVD<Matrix> svd(B);
  const double sigma = svd.singularValues()[0];
  B *= sigma > 0.0 ? target / sigma : 0.0;
  if (sigma == 0.0) B = target * Matrix::Identity(m, m);
  const double lipschitz = Eigen::JacobiSVD<Matrix>(B).singularValues()[0];

  Vector c(m), x0(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    c[i] = rng.uniform(-3.0, 3.0);
    x0[i] = rng.uniform(-5.0, 5.0);
  }
  const Vector fixed = (Matrix::Identity(m, m) - B).fullPivLu().solve(c);

  const Matrix A1 = lipschitz * Matrix::Identity(p, p);
  const Matrix zero = Matrix::Zero(p, p);
  return AffineInstance{make_lifted_space(m, Cone::orthant(E), w),
                        Mapping::affine(B, c),
                        CoefficientFamily::constant(Coefficients{A1, zero, zero, zero}),
                        1.0,
                        lipschitz + 1e-3,
                        lipschitz,
                        Point::coords(x0),
                        fixed};
}

}  // namespace conefp
