#include "conefp/space.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "conefp/linops.hpp"

namespace conefp {

namespace {

void check_weight(const Cone& cone, const Vector& w) {
  cone.space().require_dim(w.size(), "weighted_lift weight");
  if (!w.allFinite()) throw ContractViolation("weighted_lift: weight has non-finite entries");
  if (w.isZero(0)) throw ContractViolation("weighted_lift: weight must be nonzero");
  if (!cone_contains(cone, w)) throw ContractViolation("weighted_lift: weight must lie in the cone");
}

}  // namespace

ConeMetricSpace ConeMetricSpace::finite(Cone cone, std::vector<std::string> labels, MetricDef metric) {
  if (labels.empty()) throw ContractViolation("finite space: at least one point is required");
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (!(labels[i - 1] < labels[i]))
      throw ContractViolation("finite space: labels must be distinct and in lexicographic order");
  }
  ConeMetricSpace space(std::move(cone), std::move(metric));
  space.finite_ = true;
  space.labels_ = std::move(labels);
  const auto n = space.labels_.size();
  if (const auto* lift = std::get_if<WeightedLift>(&space.metric_)) {
    if (lift->base != BaseMetric::Discrete)
      throw ContractViolation("finite space: weighted_lift needs the discrete base metric (use a table otherwise)");
    check_weight(space.cone_, lift->weight);
  } else {
    const auto& table = std::get<TableMetric>(space.metric_);
    if (table.n != n || table.values.size() != n * n)
      throw ContractViolation("finite space: metric table must be n x n");
    for (const auto& v : table.values) {
      space.cone_.space().require_dim(v.size(), "metric table entry");
      if (!v.allFinite()) throw ContractViolation("finite space: metric table has non-finite entries");
    }
  }
  return space;
}

ConeMetricSpace ConeMetricSpace::euclidean(Cone cone, Eigen::Index m, WeightedLift metric) {
  if (m < 1) throw ContractViolation("euclidean space: m must be >= 1");
  check_weight(cone, metric.weight);
  ConeMetricSpace space(std::move(cone), std::move(metric));
  space.finite_ = false;
  space.point_dim_ = m;
  return space;
}

std::optional<std::size_t> ConeMetricSpace::index_of(std::string_view label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<Point> ConeMetricSpace::points() const {
  if (!finite_) throw Unsupported("points(): only finite spaces can be enumerated");
  std::vector<Point> out;
  out.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) out.push_back(Point::label(i));
  return out;
}

void ConeMetricSpace::require_point(const Point& x, const char* who) const {
  if (finite_) {
    if (!x.is_label() || x.index() >= labels_.size())
      throw ContractViolation(std::string(who) + ": point is not in the finite space");
  } else {
    if (x.is_label() || x.coords().size() != point_dim_)
      throw ContractViolation(std::string(who) + ": point must have " + std::to_string(point_dim_) + " coordinates");
  }
}

Vector ConeMetricSpace::distance(const Point& x, const Point& y) const {
  require_point(x, "distance");
  require_point(y, "distance");
  if (const auto* table = std::get_if<TableMetric>(&metric_)) return table->at(x.index(), y.index());
  const auto& lift = std::get<WeightedLift>(metric_);
  double rho = 0.0;
  if (lift.base == BaseMetric::Discrete) {
    rho = x == y ? 0.0 : 1.0;
  } else {
    rho = (x.coords() - y.coords()).norm();
  }
  return rho * lift.weight;
}

std::string ConeMetricSpace::format_point(const Point& x) const {
  if (x.is_label()) return x.index() < labels_.size() ? labels_[x.index()] : "?";
  std::string out = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < x.coords().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", x.coords()[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  return out + ")";
}

Point Mapping::operator()(const Point& x) const {
  if (const auto* t = std::get_if<TableMapping>(&kind_)) {
    if (!x.is_label() || x.index() >= t->image.size()) throw ContractViolation("table mapping: point out of range");
    return Point::label(t->image[x.index()]);
  }
  if (const auto* a = std::get_if<AffineMapping>(&kind_)) {
    if (x.is_label() || x.coords().size() != a->c.size())
      throw ContractViolation("affine mapping: point dimension mismatch");
    return Point::coords(a->B * x.coords() + a->c);
  }
  return std::get<Callback>(kind_)(x);
}

void Mapping::validate(const ConeMetricSpace& space) const {
  if (const auto* t = std::get_if<TableMapping>(&kind_)) {
    if (!space.is_finite()) throw ContractViolation("table mapping needs a finite space");
    if (t->image.size() != space.size()) throw ContractViolation("table mapping must be total over the point set");
    for (auto j : t->image)
      if (j >= space.size()) throw ContractViolation("table mapping image outside the point set");
  } else if (const auto* a = std::get_if<AffineMapping>(&kind_)) {
    if (space.is_finite()) throw ContractViolation("affine mapping needs a euclidean space");
    const auto m = space.point_dim();
    if (a->B.rows() != m || a->B.cols() != m || a->c.size() != m)
      throw ContractViolation("affine mapping: B must be m x m and c of length m");
    if (!a->B.allFinite() || !a->c.allFinite()) throw ContractViolation("affine mapping: non-finite entries");
  } else if (!std::get<Callback>(kind_)) {
    throw ContractViolation("callback mapping is empty");
  }
}

Coefficients CoefficientFamily::at(const Point& x, const Point& y) const {
  if (const auto* c = std::get_if<Coefficients>(&kind_)) return *c;
  if (const auto* t = std::get_if<PerPair>(&kind_)) {
    if (!x.is_label() || !y.is_label() || x.index() >= t->n || y.index() >= t->n)
      throw ContractViolation("per-pair coefficients: pair outside the table");
    return t->table[x.index() * t->n + y.index()];
  }
  return std::get<Callback>(kind_)(x, y);
}

void CoefficientFamily::validate(const ConeMetricSpace& space) const {
  const auto& E = space.normed_space();
  auto check = [&](const Coefficients& c) {
    check_operator(c.A1, E, "A1");
    check_operator(c.A2, E, "A2");
    check_operator(c.A3, E, "A3");
    check_operator(c.A4, E, "A4");
  };
  if (const auto* c = std::get_if<Coefficients>(&kind_)) {
    check(*c);
  } else if (const auto* t = std::get_if<PerPair>(&kind_)) {
    if (!space.is_finite()) throw ContractViolation("per-pair coefficients need a finite space");
    if (t->n != space.size() || t->table.size() != t->n * t->n)
      throw ContractViolation("per-pair coefficients must cover every ordered pair");
    for (const auto& c : t->table) check(c);
  } else if (!std::get<Callback>(kind_)) {
    throw ContractViolation("callback coefficient family is empty");
  }
}

}  // namespace conefp
