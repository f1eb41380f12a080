#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "conefp/cone.hpp"
#include "conefp/errors.hpp"

// Linear operators on E = R^p are plain dense Eigen matrices; everything here
// is a free function taking the ambient space (for dimension checks and the
// induced norm) explicitly.

namespace conefp {

inline constexpr int kPowerIterationCap = 10000;
inline constexpr double kPowerIterationRelTol = 1e-10;
inline constexpr double kResolventAgreementTol = 1e-8;

template <typename Scalar, typename Derived>
void check_operator(const Eigen::MatrixBase<Derived>& A, const NormedSpace<Scalar>& space, const char* who) {
  if (A.rows() != A.cols()) throw ContractViolation(std::string(who) + ": operator matrix must be square");
  space.require_dim(A.rows(), who);
  if (!A.allFinite()) throw ContractViolation(std::string(who) + ": operator has non-finite entries");
}

template <typename Scalar, typename DA, typename DV>
VectorX<Scalar> apply(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DV>& v,
                      const NormedSpace<Scalar>& space) {
  check_operator(A, space, "apply");
  space.require_dim(v.size(), "apply");
  return A * v;
}

namespace detail {

// Largest eigenvalue of the PSD matrix gram by power iteration from `start`.
// nullopt when the eigen-residual is still above tolerance at the cap, which
// happens when the top two eigenvalues nearly coincide. `rayleigh` keeps the
// last Rayleigh quotient, a lower bound for the top eigenvalue.
template <typename Scalar>
std::optional<Scalar> power_iteration_top(const MatrixX<Scalar>& gram, VectorX<Scalar> x, Scalar& rayleigh) {
  rayleigh = Scalar(0);
  Scalar nx = x.norm();
  if (nx == Scalar(0)) return Scalar(0);
  x /= nx;
  for (int it = 0; it < kPowerIterationCap; ++it) {
    const VectorX<Scalar> y = gram * x;
    rayleigh = x.dot(y);
    const Scalar ny = y.norm();
    if (ny == Scalar(0)) return Scalar(0);
    const Scalar residual = (y - rayleigh * x).norm();
    if (residual <= Scalar(kPowerIterationRelTol) * std::abs(rayleigh)) return rayleigh;
    x = y / ny;
  }
  return std::nullopt;
}

}  // namespace detail

/// Largest singular value by power iteration on A^T A. Runs from the all-ones
/// vector and from a fixed alternating vector and keeps the larger value, so a
/// start orthogonal to the dominant singular subspace is caught.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  if (A.size() == 0 || A.isZero(0)) return Scalar(0);
  const MatrixX<Scalar> gram = A.transpose() * A;
  const auto n = gram.rows();
  VectorX<Scalar> ones = VectorX<Scalar>::Ones(n);
  VectorX<Scalar> alt(n);
  for (Eigen::Index i = 0; i < n; ++i) alt[i] = Scalar((i % 2 == 0 ? 1.0 : -1.0) / (1.0 + 0.37 * double(i)));
  Scalar r1, r2;
  const auto t1 = detail::power_iteration_top<Scalar>(gram, ones, r1);
  const auto t2 = detail::power_iteration_top<Scalar>(gram, alt, r2);
  if (t1 && t2) return std::sqrt(std::max({*t1, *t2, Scalar(0)}));

  // Stalled on a near-degenerate top pair: take the SVD value, which must
  // dominate the Rayleigh lower bounds seen so far.
  const Scalar sigma = Eigen::JacobiSVD<MatrixX<Scalar>>(A.derived()).singularValues()(0);
  const Scalar lower = std::max(r1, r2);
  if (lower > sigma * sigma * (Scalar(1) + Scalar(kPowerIterationRelTol)))
    throw NumericError("operator_norm: power iteration did not converge in 10000 steps");
  return sigma;
}

/// Operator norm induced by the space's norm.
template <typename Scalar, typename Derived>
Scalar operator_norm(const Eigen::MatrixBase<Derived>& A, const NormedSpace<Scalar>& space) {
  check_operator(A, space, "operator_norm");
  switch (space.kind()) {
    case NormKind::One: return A.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::Infinity: return A.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::Two: return spectral_norm(A);
    case NormKind::Weighted: {
      // ||A|| = ||W A W^-1||_inf with W = diag(w).
      const auto& w = space.weights();
      const MatrixX<Scalar> scaled = w.asDiagonal() * A.cwiseAbs() * w.cwiseInverse().asDiagonal();
      return scaled.rowwise().sum().maxCoeff();
    }
  }
  return Scalar(0);
}

template <typename Scalar>
struct InvarianceWitness {
  Eigen::Index generator = 0;
  VectorX<Scalar> image;
  Scalar facet_value = Scalar(0);
};

/// First generator g with A g outside the cone, if any. For a polyhedral cone
/// A(P) is contained in P iff every generator maps into P.
template <typename Scalar, typename Derived>
std::optional<InvarianceWitness<Scalar>> invariance_witness(const Eigen::MatrixBase<Derived>& A,
                                                            const PolyhedralCone<Scalar>& cone,
                                                            Scalar tol = Scalar(kDefaultMembershipTol)) {
  check_operator(A, cone.space(), "invariance_check");
  const auto& G = cone.generators();
  for (Eigen::Index j = 0; j < G.cols(); ++j) {
    VectorX<Scalar> image = A * G.col(j);
    if (cone.facets().cols() == 0) continue;
    const Scalar worst = (cone.facets().transpose() * image).minCoeff();
    if (worst < -tol) return InvarianceWitness<Scalar>{j, std::move(image), worst};
  }
  return std::nullopt;
}

template <typename Scalar, typename Derived>
bool invariance_check(const Eigen::MatrixBase<Derived>& A, const PolyhedralCone<Scalar>& cone,
                      Scalar tol = Scalar(kDefaultMembershipTol)) {
  return !invariance_witness(A, cone, tol).has_value();
}

/// (I - A3 - A4)^-1, certified two ways.
///
/// Requires ||A3|| + ||A4|| < 1 so the Neumann series converges. The inverse
/// from an LU solve must agree with the summed series to 1e-8 (relative to
/// max(1, ||M||)) and satisfy both residual checks to `tol`.
template <typename Scalar>
MatrixX<Scalar> resolvent(const MatrixX<Scalar>& A3, const MatrixX<Scalar>& A4, const NormedSpace<Scalar>& space,
                          Scalar tol = Scalar(1e-10)) {
  check_operator(A3, space, "resolvent");
  check_operator(A4, space, "resolvent");
  const Scalar n3 = operator_norm(A3, space);
  const Scalar n4 = operator_norm(A4, space);
  if (!(n3 + n4 < Scalar(1))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "||A3|| + ||A4|| = " << n3 + n4 << " >= 1, invertibility of I - A3 - A4 not certified";
    throw HypothesisFailure("i1", msg.str());
  }
  const auto p = space.dim();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(p, p);
  const MatrixX<Scalar> B = A3 + A4;
  const MatrixX<Scalar> lhs = id - B;

  Eigen::FullPivLU<MatrixX<Scalar>> lu(lhs);
  if (!lu.isInvertible()) throw NumericError("resolvent: I - A3 - A4 is numerically singular");
  const MatrixX<Scalar> direct = lu.inverse();

  // Neumann series; tail after term j is bounded by ||B^j|| q / (1 - q).
  const Scalar q = n3 + n4;
  MatrixX<Scalar> series = id;
  MatrixX<Scalar> term = id;
  bool converged = false;
  for (int j = 1; j <= 1000000; ++j) {
    term = term * B;
    series += term;
    const Scalar tail = operator_norm(term, space) * q / (Scalar(1) - q);
    if (tail <= Scalar(1e-13) * std::max(Scalar(1), operator_norm(series, space)) || term.isZero(0)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("resolvent: Neumann series did not converge");

  const Scalar direct_norm = operator_norm(direct, space);
  const Scalar disagreement = operator_norm(MatrixX<Scalar>(direct - series), space);
  if (disagreement > Scalar(kResolventAgreementTol) * std::max(Scalar(1), direct_norm)) {
    std::ostringstream msg;
    msg << "resolvent: LU inverse and Neumann series disagree by " << disagreement;
    throw NumericError(msg.str());
  }
  const Scalar right = operator_norm(MatrixX<Scalar>(lhs * direct - id), space);
  const Scalar left = operator_norm(MatrixX<Scalar>(direct * lhs - id), space);
  if (right > tol || left > tol) {
    std::ostringstream msg;
    msg << "resolvent: residual " << std::max(left, right) << " exceeds tolerance " << tol;
    throw NumericError(msg.str());
  }
  return direct;
}

/// S = (I - A3 - A4)^-1 (A1 + A2 + A4).
template <typename Scalar>
MatrixX<Scalar> s_operator(const MatrixX<Scalar>& A1, const MatrixX<Scalar>& A2, const MatrixX<Scalar>& A3,
                           const MatrixX<Scalar>& A4, const NormedSpace<Scalar>& space, Scalar tol = Scalar(1e-10)) {
  check_operator(A1, space, "s_operator");
  check_operator(A2, space, "s_operator");
  return resolvent(A3, A4, space, tol) * (A1 + A2 + A4);
}

}  // namespace conefp
