#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "conefp/cone.hpp"

namespace conefp {

/// A point of X: a label index in a finite space, or coordinates in R^m.
class Point {
 public:
  static Point label(std::size_t index) { return Point(index); }
  static Point coords(Vector v) { return Point(std::move(v)); }

  bool is_label() const { return std::holds_alternative<std::size_t>(value_); }
  std::size_t index() const { return std::get<std::size_t>(value_); }
  const Vector& coords() const { return std::get<Vector>(value_); }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.is_label() != b.is_label()) return false;
    if (a.is_label()) return a.index() == b.index();
    return a.coords().size() == b.coords().size() && a.coords() == b.coords();
  }

 private:
  explicit Point(std::size_t i) : value_(i) {}
  explicit Point(Vector v) : value_(std::move(v)) {}
  std::variant<std::size_t, Vector> value_;
};

enum class BaseMetric { Euclidean, Discrete };

inline const char* to_string(BaseMetric base) { return base == BaseMetric::Euclidean ? "euclidean" : "discrete"; }

/// d(x, y) = rho(x, y) * weight, rho the Euclidean or discrete scalar metric.
struct WeightedLift {
  BaseMetric base = BaseMetric::Euclidean;
  Vector weight;
};

/// Explicit n x n table of cone-valued distances, row-major.
struct TableMetric {
  std::size_t n = 0;
  std::vector<Vector> values;

  const Vector& at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  Vector& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

using MetricDef = std::variant<WeightedLift, TableMetric>;

/// (X, d) with d valued in a polyhedral cone. Finite spaces keep their labels
/// in canonical (lexicographic) order; indices refer to that order.
class ConeMetricSpace {
 public:
  static ConeMetricSpace finite(Cone cone, std::vector<std::string> labels, MetricDef metric);
  static ConeMetricSpace euclidean(Cone cone, Eigen::Index m, WeightedLift metric);

  const Cone& cone() const { return cone_; }
  const Space& normed_space() const { return cone_.space(); }
  const MetricDef& metric() const { return metric_; }

  bool is_finite() const { return finite_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  Eigen::Index point_dim() const { return point_dim_; }

  std::optional<std::size_t> index_of(std::string_view label) const;
  std::vector<Point> points() const;

  void require_point(const Point& x, const char* who) const;

  Vector distance(const Point& x, const Point& y) const;
  double distance_norm(const Point& x, const Point& y) const { return normed_space().norm(distance(x, y)); }

  /// Label equality on finite spaces, exact coordinate equality otherwise.
  bool same_point(const Point& x, const Point& y) const { return x == y; }

  std::string format_point(const Point& x) const;

 private:
  ConeMetricSpace(Cone cone, MetricDef metric) : cone_(std::move(cone)), metric_(std::move(metric)) {}

  Cone cone_;
  MetricDef metric_;
  bool finite_ = true;
  std::vector<std::string> labels_;
  Eigen::Index point_dim_ = 0;
};

struct TableMapping {
  std::vector<std::size_t> image;
};

/// x -> B x + c on R^m.
struct AffineMapping {
  Matrix B;
  Vector c;
};

/// T: X -> X.
class Mapping {
 public:
  using Callback = std::function<Point(const Point&)>;

  static Mapping table(std::vector<std::size_t> image) { return Mapping(TableMapping{std::move(image)}); }
  static Mapping affine(Matrix B, Vector c) { return Mapping(AffineMapping{std::move(B), std::move(c)}); }
  static Mapping callback(Callback fn) { return Mapping(std::move(fn)); }

  Point operator()(const Point& x) const;

  /// Throws ContractViolation unless the mapping is well-formed on `space`.
  void validate(const ConeMetricSpace& space) const;

  const TableMapping* as_table() const { return std::get_if<TableMapping>(&kind_); }
  const AffineMapping* as_affine() const { return std::get_if<AffineMapping>(&kind_); }

 private:
  template <typename K>
  explicit Mapping(K kind) : kind_(std::move(kind)) {}
  std::variant<TableMapping, AffineMapping, Callback> kind_;
};

/// The four operators A1..A4 at one pair (x, y).
struct Coefficients {
  Matrix A1, A2, A3, A4;
};

/// (x, y) -> (A1, A2, A3, A4).
class CoefficientFamily {
 public:
  using Callback = std::function<Coefficients(const Point&, const Point&)>;

  struct PerPair {
    std::size_t n = 0;
    std::vector<Coefficients> table;  // row-major over ordered pairs
  };

  static CoefficientFamily constant(Coefficients c) { return CoefficientFamily(std::move(c)); }
  static CoefficientFamily per_pair(std::size_t n, std::vector<Coefficients> table) {
    return CoefficientFamily(PerPair{n, std::move(table)});
  }
  static CoefficientFamily callback(Callback fn) { return CoefficientFamily(std::move(fn)); }

  bool is_constant() const { return std::holds_alternative<Coefficients>(kind_); }
  const Coefficients* as_constant() const { return std::get_if<Coefficients>(&kind_); }
  const PerPair* as_per_pair() const { return std::get_if<PerPair>(&kind_); }

  Coefficients at(const Point& x, const Point& y) const;

  void validate(const ConeMetricSpace& space) const;

 private:
  template <typename K>
  explicit CoefficientFamily(K kind) : kind_(std::move(kind)) {}
  std::variant<Coefficients, PerPair, Callback> kind_;
};

}  // namespace conefp
