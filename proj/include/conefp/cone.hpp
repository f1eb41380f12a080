#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "conefp/errors.hpp"
#include "conefp/random.hpp"

namespace conefp {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

/// Absolute tolerance on facet inner products used when none is given.
inline constexpr double kDefaultMembershipTol = 1e-9;

enum class NormKind { One, Two, Infinity, Weighted };

inline const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::One: return "one";
    case NormKind::Two: return "two";
    case NormKind::Infinity: return "infinity";
    case NormKind::Weighted: return "weighted";
  }
  return "?";
}

/// The coordinate space E = R^p with one of the supported norms.
///
/// `Weighted` is the weighted max-norm ||v|| = max_i w_i |v_i|. It is monotone
/// on the nonnegative orthant and its induced operator norm has a closed form.
template <typename Scalar>
class NormedSpace {
 public:
  NormedSpace(Eigen::Index dim, NormKind kind) : dim_(dim), kind_(kind) {
    if (dim < 1) throw ContractViolation("NormedSpace: dim must be >= 1");
    if (kind == NormKind::Weighted)
      throw ContractViolation("NormedSpace: weighted norm needs weights, use NormedSpace::weighted");
  }

  static NormedSpace weighted(VectorX<Scalar> weights) {
    if (weights.size() < 1) throw ContractViolation("NormedSpace: dim must be >= 1");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (!(weights[i] > Scalar(0)) || !std::isfinite(static_cast<double>(weights[i])))
        throw ContractViolation("NormedSpace: weights must be finite and strictly positive");
    }
    NormedSpace space(weights.size(), NormKind::One);
    space.kind_ = NormKind::Weighted;
    space.weights_ = std::move(weights);
    return space;
  }

  Eigen::Index dim() const { return dim_; }
  NormKind kind() const { return kind_; }
  const VectorX<Scalar>& weights() const { return weights_; }

  template <typename Derived>
  Scalar norm(const Eigen::MatrixBase<Derived>& v) const {
    require_dim(v.size(), "norm");
    switch (kind_) {
      case NormKind::One: return v.template lpNorm<1>();
      case NormKind::Two: return v.norm();
      case NormKind::Infinity: return v.template lpNorm<Eigen::Infinity>();
      case NormKind::Weighted: return (weights_.array() * v.array().abs()).maxCoeff();
    }
    return Scalar(0);
  }

  void require_dim(Eigen::Index n, const char* who) const {
    if (n != dim_) {
      std::ostringstream msg;
      msg << who << ": dimension mismatch (expected " << dim_ << ", got " << n << ")";
      throw ContractViolation(msg.str());
    }
  }

  friend bool operator==(const NormedSpace& a, const NormedSpace& b) {
    return a.dim_ == b.dim_ && a.kind_ == b.kind_ && a.weights_ == b.weights_;
  }

 private:
  Eigen::Index dim_;
  NormKind kind_;
  VectorX<Scalar> weights_;
};

/// Closed convex cone P = cone(generators) = {v : <f_i, v> >= 0 for all facets f_i}.
///
/// Generators and facets are stored as matrix columns. Both descriptions are
/// supplied by the caller; validate_cone() checks that they agree and that the
/// cone axioms hold. The constructor only rejects malformed input.
template <typename Scalar>
class PolyhedralCone {
 public:
  PolyhedralCone(NormedSpace<Scalar> space, MatrixX<Scalar> generators, MatrixX<Scalar> facets,
                 Scalar normal_constant = Scalar(1))
      : space_(std::move(space)),
        generators_(std::move(generators)),
        facets_(std::move(facets)),
        normal_constant_(normal_constant) {
    const auto p = space_.dim();
    if (generators_.rows() != p || generators_.cols() < 1)
      throw ContractViolation("PolyhedralCone: generators must be a non-empty list of length-dim vectors");
    if (facets_.rows() != p)
      throw ContractViolation("PolyhedralCone: facet vectors must have length dim");
    if (!generators_.allFinite() || !facets_.allFinite())
      throw ContractViolation("PolyhedralCone: non-finite generator or facet entry");
    if (!std::isfinite(static_cast<double>(normal_constant_)) || normal_constant_ < Scalar(1))
      throw ContractViolation("PolyhedralCone: normal constant must be >= 1 (no normal cone has k < 1)");
    Eigen::FullPivLU<MatrixX<Scalar>> lu(generators_);
    lu.setThreshold(Scalar(1e-12));
    solid_ = lu.rank() == p;
  }

  /// The nonnegative orthant of `space`, k = 1 unless stated otherwise.
  static PolyhedralCone orthant(NormedSpace<Scalar> space, Scalar normal_constant = Scalar(1)) {
    const auto p = space.dim();
    MatrixX<Scalar> id = MatrixX<Scalar>::Identity(p, p);
    return PolyhedralCone(std::move(space), id, id, normal_constant);
  }

  const NormedSpace<Scalar>& space() const { return space_; }
  Eigen::Index dim() const { return space_.dim(); }
  const MatrixX<Scalar>& generators() const { return generators_; }
  const MatrixX<Scalar>& facets() const { return facets_; }
  Scalar normal_constant() const { return normal_constant_; }
  bool solid() const { return solid_; }

  PolyhedralCone with_normal_constant(Scalar k) const {
    return PolyhedralCone(space_, generators_, facets_, k);
  }

  bool is_orthant() const {
    const auto p = dim();
    const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(p, p);
    return generators_.cols() == p && facets_.cols() == p && generators_ == id && facets_ == id;
  }

 private:
  NormedSpace<Scalar> space_;
  MatrixX<Scalar> generators_;
  MatrixX<Scalar> facets_;
  Scalar normal_constant_;
  bool solid_ = false;
};

using Space = NormedSpace<double>;
using Cone = PolyhedralCone<double>;

template <typename Scalar, typename Derived>
VectorX<Scalar> facet_values(const PolyhedralCone<Scalar>& cone, const Eigen::MatrixBase<Derived>& v) {
  cone.space().require_dim(v.size(), "facet_values");
  return cone.facets().transpose() * v;
}

template <typename Scalar, typename Derived>
bool cone_contains(const PolyhedralCone<Scalar>& cone, const Eigen::MatrixBase<Derived>& v,
                   Scalar tol = Scalar(kDefaultMembershipTol)) {
  cone.space().require_dim(v.size(), "cone_contains");
  if (cone.facets().cols() == 0) return true;
  return (cone.facets().transpose() * v).minCoeff() >= -tol;
}

/// x <= y in the order induced by the cone.
template <typename Scalar, typename DX, typename DY>
bool leq(const PolyhedralCone<Scalar>& cone, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
         Scalar tol = Scalar(kDefaultMembershipTol)) {
  cone.space().require_dim(x.size(), "leq");
  cone.space().require_dim(y.size(), "leq");
  return cone_contains(cone, (y - x).eval(), tol);
}

/// Decidable stand-in for v in int P: every facet value is at least
/// margin * ||v||. The origin is never interior.
template <typename Scalar, typename Derived>
bool strictly_interior(const PolyhedralCone<Scalar>& cone, const Eigen::MatrixBase<Derived>& v, Scalar margin) {
  if (!cone.solid()) throw Unsupported("strictly_interior: cone has empty interior");
  if (!(margin > Scalar(0))) throw ContractViolation("strictly_interior: margin must be positive");
  cone.space().require_dim(v.size(), "strictly_interior");
  const Scalar n = cone.space().norm(v);
  if (n == Scalar(0)) return false;
  if (cone.facets().cols() == 0) return true;
  return (cone.facets().transpose() * v).minCoeff() >= margin * n;
}

struct ValidationCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Checks the cone axioms: (i) P != {0}, consistency of generators with the
/// facet description, (ii) closure under sampled nonnegative combinations,
/// (iii) pointedness.
template <typename Scalar>
ValidationReport validate_cone(const PolyhedralCone<Scalar>& cone, Scalar tol = Scalar(kDefaultMembershipTol),
                               int n_samples = 256, std::uint64_t seed = 0) {
  ValidationReport report;
  const auto& G = cone.generators();
  const auto& F = cone.facets();
  const auto p = cone.dim();

  {
    ValidationCheck c{"nonzero (i)", false, ""};
    for (Eigen::Index j = 0; j < G.cols(); ++j)
      if (G.col(j).norm() > tol) c.pass = true;
    if (!c.pass) c.detail = "every generator is zero, so P = {0}";
    report.checks.push_back(c);
  }

  {
    ValidationCheck c{"generators in facets", true, ""};
    for (Eigen::Index j = 0; j < G.cols() && c.pass; ++j) {
      if (F.cols() == 0) break;
      const VectorX<Scalar> values = F.transpose() * G.col(j);
      Eigen::Index worst = 0;
      const Scalar m = values.minCoeff(&worst);
      if (m < -tol) {
        c.pass = false;
        std::ostringstream msg;
        msg.precision(17);
        msg << "generator " << j << " has facet " << worst << " inner product " << m;
        c.detail = msg.str();
      }
    }
    report.checks.push_back(c);
  }

  {
    ValidationCheck c{"conic closure (ii)", true, ""};
    Rng rng(seed);
    for (int s = 0; s < n_samples && c.pass; ++s) {
      VectorX<Scalar> a(G.cols()), b(G.cols());
      for (Eigen::Index j = 0; j < G.cols(); ++j) {
        a[j] = Scalar(rng.uniform(0.0, 4.0));
        b[j] = Scalar(rng.uniform(0.0, 4.0));
      }
      const VectorX<Scalar> x = G * a;
      const VectorX<Scalar> y = G * b;
      const Scalar s1 = Scalar(rng.uniform(0.0, 10.0));
      const Scalar s2 = Scalar(rng.uniform(0.0, 10.0));
      const VectorX<Scalar> z = s1 * x + s2 * y;
      const Scalar scale = std::max<Scalar>(Scalar(1), z.norm());
      if (!cone_contains(cone, z, tol * scale)) {
        c.pass = false;
        c.detail = "sampled nonnegative combination of generators leaves P (sample " + std::to_string(s) + ")";
      }
    }
    report.checks.push_back(c);
  }

  {
    ValidationCheck c{"pointed (iii)", true, ""};
    for (Eigen::Index i = 0; i < G.cols() && c.pass; ++i) {
      for (Eigen::Index j = i + 1; j < G.cols() && c.pass; ++j) {
        const Scalar ni = G.col(i).norm();
        const Scalar nj = G.col(j).norm();
        if (ni <= tol || nj <= tol) continue;
        if (G.col(i).dot(G.col(j)) + ni * nj <= tol * ni * nj) {
          c.pass = false;
          c.detail = "generators " + std::to_string(i) + " and " + std::to_string(j) +
                     " are opposite, so P contains a line";
        }
      }
    }
    // v in P and -v in P  <=>  F^T v = 0, which has a nonzero solution iff rank F < p.
    if (c.pass) {
      Eigen::FullPivLU<MatrixX<Scalar>> lu(F.transpose());
      lu.setThreshold(Scalar(1e-12));
      const auto rank = F.cols() == 0 ? Eigen::Index(0) : lu.rank();
      if (rank < p) {
        c.pass = false;
        std::ostringstream msg;
        msg << "facet normals span only " << rank << " of " << p << " dimensions, so P contains a line";
        c.detail = msg.str();
      }
    }
    report.checks.push_back(c);
  }

  return report;
}

/// Sampled lower bound on the normal constant: the largest ||x|| / ||y|| seen
/// over ordered pairs 0 <= x <= y drawn from the generators. The first sample
/// is x = y, so the result is at least 1.
template <typename Scalar>
Scalar normal_constant_lower_bound(const PolyhedralCone<Scalar>& cone, const NormedSpace<Scalar>& norm,
                                   int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ContractViolation("normal_constant_lower_bound: n_samples must be >= 1");
  norm.require_dim(cone.dim(), "normal_constant_lower_bound");
  const auto& G = cone.generators();
  const auto m = G.cols();
  Rng rng(seed);

  auto draw_combination = [&]() {
    VectorX<Scalar> lambda = VectorX<Scalar>::Zero(m);
    if (rng.coin()) {
      lambda[rng.integer(0, m - 1)] = Scalar(1);
    } else {
      for (Eigen::Index j = 0; j < m; ++j) lambda[j] = Scalar(-std::log(1.0 - rng.uniform()));
    }
    return VectorX<Scalar>(G * lambda);
  };

  Scalar best = Scalar(0);
  Eigen::Index first = 0;
  while (first < m && G.col(first).norm() == Scalar(0)) ++first;
  if (first == m) return Scalar(1);
  best = Scalar(1);  // x = y = first nonzero generator

  for (int s = 1; s < n_samples; ++s) {
    const VectorX<Scalar> x = draw_combination();
    const VectorX<Scalar> gap = draw_combination();
    const Scalar t = Scalar(std::exp(rng.uniform(-4.0, 4.0)));
    const VectorX<Scalar> y = x + t * gap;
    const Scalar ny = norm.norm(y);
    if (ny == Scalar(0)) continue;
    best = std::max(best, norm.norm(x) / ny);
  }
  return best;
}

struct NormalConstantAudit {
  double declared = 1.0;
  double lower_bound = 1.0;
  bool consistent = true;
};

/// A declared normal constant is rejected when the sampled lower bound exceeds
/// it by more than 1e-9 relative.
template <typename Scalar>
NormalConstantAudit audit_normal_constant(const PolyhedralCone<Scalar>& cone, int n_samples = 4096,
                                          std::uint64_t seed = 0) {
  NormalConstantAudit audit;
  audit.declared = static_cast<double>(cone.normal_constant());
  audit.lower_bound = static_cast<double>(normal_constant_lower_bound(cone, cone.space(), n_samples, seed));
  audit.consistent = audit.lower_bound <= audit.declared * (1.0 + 1e-9);
  return audit;
}

}  // namespace conefp
