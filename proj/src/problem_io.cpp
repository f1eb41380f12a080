#include "conefp/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace conefp {

namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Rejects keys outside `allowed` and missing `required` keys.
void keys(const json& j, const std::string& path, std::initializer_list<const char*> required,
          std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) allowed.insert(k);
  for (const char* k : optional) allowed.insert(k);
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw InputError(child(path, k), "unknown key");
  }
  for (const char* k : required) {
    if (!j.contains(k)) throw InputError(child(path, k), "missing required key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw InputError(path, "expected a positive number");
  return v;
}

std::uint64_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
    throw InputError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw InputError(path, "expected a string");
  return j.get<std::string>();
}

Vector vector(const json& j, const std::string& path, Eigen::Index dim) {
  if (!j.is_array()) throw InputError(path, "expected an array of numbers");
  if (dim >= 0 && static_cast<Eigen::Index>(j.size()) != dim)
    throw InputError(path, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], item(path, i));
  return v;
}

// Row-major rows x cols.
Matrix matrix(const json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw InputError(path, "expected an array of rows");
  if (static_cast<Eigen::Index>(j.size()) != rows)
    throw InputError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  Matrix M(rows, cols);
  for (std::size_t r = 0; r < j.size(); ++r) M.row(static_cast<Eigen::Index>(r)) = vector(j[r], item(path, r), cols).transpose();
  return M;
}

// Array of vectors stored as matrix columns.
Matrix columns(const json& j, const std::string& path, Eigen::Index dim) {
  if (!j.is_array()) throw InputError(path, "expected an array of vectors");
  Matrix M(dim, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) M.col(static_cast<Eigen::Index>(c)) = vector(j[c], item(path, c), dim);
  return M;
}

Space parse_norm(const json& s, const std::string& path, Eigen::Index dim) {
  const std::string kind = text(s.at("norm"), child(path, "norm"));
  if (kind == "weighted") {
    if (!s.contains("norm_weights")) throw InputError(child(path, "norm_weights"), "required for the weighted norm");
    const Vector w = vector(s.at("norm_weights"), child(path, "norm_weights"), dim);
    try {
      return Space::weighted(w);
    } catch (const ContractViolation& e) {
      throw InputError(child(path, "norm_weights"), e.what());
    }
  }
  if (s.contains("norm_weights")) throw InputError(child(path, "norm_weights"), "only valid with norm \"weighted\"");
  if (kind == "one") return Space(dim, NormKind::One);
  if (kind == "two") return Space(dim, NormKind::Two);
  if (kind == "infinity") return Space(dim, NormKind::Infinity);
  throw InputError(child(path, "norm"), "expected one of one, two, infinity, weighted");
}

Cone parse_cone(const json& c, const std::string& path, const Space& space) {
  keys(c, path, {}, {"generators", "facets", "normal_constant"});
  const bool has_g = c.contains("generators"), has_f = c.contains("facets");
  if (has_g != has_f) throw InputError(path, "generators and facets must be given together (omit both for the orthant)");
  std::optional<double> k;
  if (c.contains("normal_constant")) k = number(c.at("normal_constant"), child(path, "normal_constant"));
  try {
    if (!has_g) return Cone::orthant(space, k.value_or(1.0));
    Cone cone(space, columns(c.at("generators"), child(path, "generators"), space.dim()),
              columns(c.at("facets"), child(path, "facets"), space.dim()), k.value_or(1.0));
    if (!k && !cone.is_orthant())
      throw InputError(child(path, "normal_constant"), "required for cones other than the orthant");
    return cone;
  } catch (const ContractViolation& e) {
    throw InputError(path, e.what());
  }
}

ConeMetricSpace parse_space(const json& s) {
  const std::string path = "space";
  keys(s, path, {"dim", "norm", "points", "metric"}, {"norm_weights", "cone"});
  const auto dim = static_cast<Eigen::Index>(count(s.at("dim"), "space.dim"));
  if (dim < 1) throw InputError("space.dim", "must be >= 1");
  const Space norm = parse_norm(s, path, dim);
  Cone cone = s.contains("cone") ? parse_cone(s.at("cone"), "space.cone", norm) : Cone::orthant(norm);

  const json& pts = s.at("points");
  keys(pts, "space.points", {"kind"}, {"labels", "m"});
  const std::string kind = text(pts.at("kind"), "space.points.kind");
  const json& met = s.at("metric");
  keys(met, "space.metric", {"kind"}, {"base", "weight", "entries"});
  const std::string mkind = text(met.at("kind"), "space.metric.kind");

  auto lift = [&]() {
    keys(met, "space.metric", {"kind", "base", "weight"});
    const std::string base = text(met.at("base"), "space.metric.base");
    WeightedLift l;
    if (base == "euclidean") l.base = BaseMetric::Euclidean;
    else if (base == "discrete") l.base = BaseMetric::Discrete;
    else throw InputError("space.metric.base", "expected euclidean or discrete");
    l.weight = vector(met.at("weight"), "space.metric.weight", dim);
    return l;
  };

  try {
    if (kind == "euclidean") {
      keys(pts, "space.points", {"kind", "m"});
      const auto m = static_cast<Eigen::Index>(count(pts.at("m"), "space.points.m"));
      if (mkind != "weighted_lift") throw InputError("space.metric.kind", "euclidean points need a weighted_lift metric");
      const WeightedLift l = lift();
      if (l.base != BaseMetric::Euclidean) throw InputError("space.metric.base", "euclidean points need the euclidean base");
      return ConeMetricSpace::euclidean(std::move(cone), m, l);
    }
    if (kind != "finite") throw InputError("space.points.kind", "expected finite or euclidean");
    keys(pts, "space.points", {"kind", "labels"});
    const json& lj = pts.at("labels");
    if (!lj.is_array()) throw InputError("space.points.labels", "expected an array of strings");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < lj.size(); ++i) labels.push_back(text(lj[i], item("space.points.labels", i)));
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InputError("space.points.labels", "labels must be distinct");
    if (sorted.empty()) throw InputError("space.points.labels", "at least one point is required");

    if (mkind == "weighted_lift") return ConeMetricSpace::finite(std::move(cone), sorted, lift());
    if (mkind != "table") throw InputError("space.metric.kind", "expected weighted_lift or table");
    keys(met, "space.metric", {"kind", "entries"});

    // Ordered entries; a pair given one way only is mirrored, the diagonal defaults to 0.
    const std::size_t n = sorted.size();
    auto index = [&](const json& j, const std::string& p) {
      const std::string l = text(j, p);
      const auto it = std::lower_bound(sorted.begin(), sorted.end(), l);
      if (it == sorted.end() || *it != l) throw InputError(p, "unknown point label '" + l + "'");
      return static_cast<std::size_t>(it - sorted.begin());
    };
    std::vector<std::optional<Vector>> given(n * n);
    const json& ej = met.at("entries");
    if (!ej.is_array()) throw InputError("space.metric.entries", "expected an array");
    for (std::size_t e = 0; e < ej.size(); ++e) {
      const std::string p = item("space.metric.entries", e);
      keys(ej[e], p, {"x", "y", "d"});
      const std::size_t i = index(ej[e].at("x"), child(p, "x")), j = index(ej[e].at("y"), child(p, "y"));
      if (given[i * n + j]) throw InputError(p, "duplicate entry for this ordered pair");
      given[i * n + j] = vector(ej[e].at("d"), child(p, "d"), dim);
    }
    TableMetric table{n, std::vector<Vector>(n * n, Vector::Zero(dim))};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (given[i * n + j]) table.at(i, j) = *given[i * n + j];
        else if (given[j * n + i]) table.at(i, j) = *given[j * n + i];
        else if (i != j)
          throw InputError("space.metric.entries", "no distance for (" + sorted[i] + ", " + sorted[j] + ")");
      }
    }
    return ConeMetricSpace::finite(std::move(cone), sorted, std::move(table));
  } catch (const ContractViolation& e) {
    throw InputError("space", e.what());
  }
}

Point parse_point(const json& j, const std::string& path, const ConeMetricSpace& space) {
  if (space.is_finite()) {
    const std::string l = text(j, path);
    const auto idx = space.index_of(l);
    if (!idx) throw InputError(path, "unknown point label '" + l + "'");
    return Point::label(*idx);
  }
  return Point::coords(vector(j, path, space.point_dim()));
}

Mapping parse_mapping(const json& m, const ConeMetricSpace& space) {
  keys(m, "mapping", {"kind"}, {"table", "B", "c"});
  const std::string kind = text(m.at("kind"), "mapping.kind");
  if (kind == "table") {
    keys(m, "mapping", {"kind", "table"});
    if (!space.is_finite()) throw InputError("mapping.kind", "a table mapping needs finite points");
    const json& t = m.at("table");
    if (!t.is_object()) throw InputError("mapping.table", "expected an object label -> label");
    std::vector<std::optional<std::size_t>> image(space.size());
    for (const auto& [from, to] : t.items()) {
      const std::string p = child("mapping.table", from);
      const auto i = space.index_of(from);
      if (!i) throw InputError(p, "unknown point label '" + from + "'");
      image[*i] = parse_point(to, p, space).index();
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < image.size(); ++i) {
      if (!image[i]) throw InputError("mapping.table", "no image for '" + space.labels()[i] + "'");
      out.push_back(*image[i]);
    }
    return Mapping::table(std::move(out));
  }
  if (kind != "affine") throw InputError("mapping.kind", "expected table or affine");
  keys(m, "mapping", {"kind", "B", "c"});
  if (space.is_finite()) throw InputError("mapping.kind", "an affine mapping needs euclidean points");
  const auto d = space.point_dim();
  return Mapping::affine(matrix(m.at("B"), "mapping.B", d, d), vector(m.at("c"), "mapping.c", d));
}

Coefficients parse_operators(const json& j, const std::string& path, Eigen::Index p,
                             std::initializer_list<const char*> extra = {}) {
  std::vector<const char*> req = {"A1", "A2", "A3", "A4"};
  req.insert(req.end(), extra.begin(), extra.end());
  if (!j.is_object()) throw InputError(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(req.begin(), req.end(), [&](const char* r) { return k == r; }) == req.end())
      throw InputError(child(path, k), "unknown key");
  }
  for (const char* r : req) {
    if (!j.contains(r)) throw InputError(child(path, r), "missing required key");
  }
  return {matrix(j.at("A1"), child(path, "A1"), p, p), matrix(j.at("A2"), child(path, "A2"), p, p),
          matrix(j.at("A3"), child(path, "A3"), p, p), matrix(j.at("A4"), child(path, "A4"), p, p)};
}

CoefficientFamily parse_coefficients(const json& c, const ConeMetricSpace& space) {
  if (!c.is_object() || !c.contains("kind")) throw InputError("coefficients.kind", "missing required key");
  const std::string kind = text(c.at("kind"), "coefficients.kind");
  const auto p = space.cone().dim();
  if (kind == "constant") {
    json ops = c;
    ops.erase("kind");
    return CoefficientFamily::constant(parse_operators(ops, "coefficients", p));
  }
  if (kind != "per_pair") throw InputError("coefficients.kind", "expected constant or per_pair");
  keys(c, "coefficients", {"kind", "entries"}, {"default"});
  if (!space.is_finite()) throw InputError("coefficients.kind", "per_pair coefficients need finite points");
  const std::size_t n = space.size();
  std::vector<std::optional<Coefficients>> table(n * n);
  const json& ej = c.at("entries");
  if (!ej.is_array()) throw InputError("coefficients.entries", "expected an array");
  for (std::size_t e = 0; e < ej.size(); ++e) {
    const std::string path = item("coefficients.entries", e);
    Coefficients op = parse_operators(ej[e], path, p, {"x", "y"});
    const std::size_t i = parse_point(ej[e].at("x"), child(path, "x"), space).index();
    const std::size_t j = parse_point(ej[e].at("y"), child(path, "y"), space).index();
    if (table[i * n + j]) throw InputError(path, "duplicate entry for this ordered pair");
    table[i * n + j] = std::move(op);
  }
  std::optional<Coefficients> fallback;
  if (c.contains("default")) fallback = parse_operators(c.at("default"), "coefficients.default", p);
  std::vector<Coefficients> out;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (table[k]) out.push_back(*table[k]);
    else if (fallback) out.push_back(*fallback);
    else
      throw InputError("coefficients.entries", "no operators for (" + space.labels()[k / n] + ", " +
                                                   space.labels()[k % n] + ") and no default");
  }
  return CoefficientFamily::per_pair(n, std::move(out));
}

SolveSection parse_solve(const json& s, const ConeMetricSpace& space) {
  keys(s, "solve", {"x0"}, {"eps", "max_iter", "beta", "seeds"});
  SolveSection out;
  out.x0 = parse_point(s.at("x0"), "solve.x0", space);
  if (s.contains("eps")) out.eps = positive(s.at("eps"), "solve.eps");
  if (s.contains("max_iter")) out.max_iter = count(s.at("max_iter"), "solve.max_iter");
  if (s.contains("beta")) {
    out.beta = number(s.at("beta"), "solve.beta");
    if (*out.beta < 0.0 || *out.beta >= 1.0) throw InputError("solve.beta", "must lie in [0, 1)");
  }
  if (s.contains("seeds")) {
    const json& sj = s.at("seeds");
    if (!sj.is_array()) throw InputError("solve.seeds", "expected an array of points");
    for (std::size_t i = 0; i < sj.size(); ++i) out.seeds.push_back(parse_point(sj[i], item("solve.seeds", i), space));
  }
  return out;
}

CheckSection parse_check(const json& c, const ConeMetricSpace& space) {
  keys(c, "check", {}, {"pair_source", "tol", "resolvent_tol", "alpha", "beta", "normal_samples", "seed"});
  CheckSection out;
  if (c.contains("seed")) out.seed = count(c.at("seed"), "check.seed");
  if (!space.is_finite()) out.pair_source = SampledPairs{256, out.seed, 10.0};
  if (c.contains("pair_source")) {
    const json& ps = c.at("pair_source");
    if (ps.is_string() && ps.get<std::string>() == "all") {
      if (!space.is_finite()) throw InputError("check.pair_source", "\"all\" needs finite points");
      out.pair_source = AllPairs{};
    } else {
      keys(ps, "check.pair_source", {"sampled"}, {"seed", "box"});
      SampledPairs sp;
      sp.count = static_cast<int>(count(ps.at("sampled"), "check.pair_source.sampled"));
      if (sp.count < 1) throw InputError("check.pair_source.sampled", "must be >= 1");
      sp.seed = ps.contains("seed") ? count(ps.at("seed"), "check.pair_source.seed") : out.seed;
      if (ps.contains("box")) sp.box = positive(ps.at("box"), "check.pair_source.box");
      out.pair_source = sp;
    }
  }
  if (c.contains("tol")) out.tol = positive(c.at("tol"), "check.tol");
  if (c.contains("resolvent_tol")) out.resolvent_tol = positive(c.at("resolvent_tol"), "check.resolvent_tol");
  if (c.contains("alpha")) out.alpha = number(c.at("alpha"), "check.alpha");
  if (c.contains("beta")) out.beta = number(c.at("beta"), "check.beta");
  if (c.contains("normal_samples")) {
    out.normal_samples = static_cast<int>(count(c.at("normal_samples"), "check.normal_samples"));
    if (out.normal_samples < 1) throw InputError("check.normal_samples", "must be >= 1");
  }
  return out;
}

// --- serialization ---

ordered vec_json(const Vector& v) {
  ordered a = ordered::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered mat_json(const Matrix& M) {
  ordered a = ordered::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) a.push_back(vec_json(M.row(r).transpose()));
  return a;
}

ordered cols_json(const Matrix& M) {
  ordered a = ordered::array();
  for (Eigen::Index c = 0; c < M.cols(); ++c) a.push_back(vec_json(M.col(c)));
  return a;
}

ordered point_json(const Point& x, const ConeMetricSpace& space) {
  if (space.is_finite()) return space.labels()[x.index()];
  return vec_json(x.coords());
}

void ops_json(ordered& o, const Coefficients& c) {
  o["A1"] = mat_json(c.A1);
  o["A2"] = mat_json(c.A2);
  o["A3"] = mat_json(c.A3);
  o["A4"] = mat_json(c.A4);
}

}  // namespace

Problem parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() already carries "line L, column C".
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    throw InputError("", pos == std::string::npos ? msg : msg.substr(pos));
  }
  keys(root, "", {"space"}, {"mapping", "coefficients", "solve", "check"});
  Problem problem{parse_space(root.at("space")), std::nullopt, std::nullopt, std::nullopt, {}};
  if (root.contains("mapping")) problem.mapping = parse_mapping(root.at("mapping"), problem.space);
  if (root.contains("coefficients")) problem.coefficients = parse_coefficients(root.at("coefficients"), problem.space);
  if (root.contains("solve")) problem.solve = parse_solve(root.at("solve"), problem.space);
  problem.check = parse_check(root.contains("check") ? root.at("check") : json::object(), problem.space);
  try {
    if (problem.mapping) problem.mapping->validate(problem.space);
    if (problem.coefficients) problem.coefficients->validate(problem.space);
  } catch (const ContractViolation& e) {
    throw InputError("", e.what());
  }
  return problem;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const Problem& problem) {
  const ConeMetricSpace& space = problem.space;
  const Cone& cone = space.cone();
  const Space& ns = cone.space();
  ordered root;

  ordered s;
  s["dim"] = ns.dim();
  s["norm"] = to_string(ns.kind());
  if (ns.kind() == NormKind::Weighted) s["norm_weights"] = vec_json(ns.weights());
  ordered c;
  c["generators"] = cols_json(cone.generators());
  c["facets"] = cols_json(cone.facets());
  c["normal_constant"] = cone.normal_constant();
  s["cone"] = c;
  ordered pts;
  if (space.is_finite()) {
    pts["kind"] = "finite";
    pts["labels"] = space.labels();
  } else {
    pts["kind"] = "euclidean";
    pts["m"] = space.point_dim();
  }
  s["points"] = pts;
  ordered met;
  if (const auto* lift = std::get_if<WeightedLift>(&space.metric())) {
    met["kind"] = "weighted_lift";
    met["base"] = to_string(lift->base);
    met["weight"] = vec_json(lift->weight);
  } else {
    const auto& table = std::get<TableMetric>(space.metric());
    met["kind"] = "table";
    ordered entries = ordered::array();
    for (std::size_t i = 0; i < table.n; ++i) {
      for (std::size_t j = 0; j < table.n; ++j) {
        if (i == j && table.at(i, j).isZero(0)) continue;
        ordered e;
        e["x"] = space.labels()[i];
        e["y"] = space.labels()[j];
        e["d"] = vec_json(table.at(i, j));
        entries.push_back(e);
      }
    }
    met["entries"] = entries;
  }
  s["metric"] = met;
  root["space"] = s;

  if (problem.mapping) {
    ordered m;
    if (const auto* t = problem.mapping->as_table()) {
      m["kind"] = "table";
      ordered tab = ordered::object();
      for (std::size_t i = 0; i < t->image.size(); ++i) tab[space.labels()[i]] = space.labels()[t->image[i]];
      m["table"] = tab;
    } else if (const auto* a = problem.mapping->as_affine()) {
      m["kind"] = "affine";
      m["B"] = mat_json(a->B);
      m["c"] = vec_json(a->c);
    } else {
      throw Unsupported("serialize_problem: callback mappings have no file form");
    }
    root["mapping"] = m;
  }

  if (problem.coefficients) {
    ordered co;
    if (const auto* c0 = problem.coefficients->as_constant()) {
      co["kind"] = "constant";
      ops_json(co, *c0);
    } else if (const auto* pp = problem.coefficients->as_per_pair()) {
      co["kind"] = "per_pair";
      ordered entries = ordered::array();
      for (std::size_t k = 0; k < pp->table.size(); ++k) {
        ordered e;
        e["x"] = space.labels()[k / pp->n];
        e["y"] = space.labels()[k % pp->n];
        ops_json(e, pp->table[k]);
        entries.push_back(e);
      }
      co["entries"] = entries;
    } else {
      throw Unsupported("serialize_problem: callback coefficients have no file form");
    }
    root["coefficients"] = co;
  }

  if (problem.solve) {
    const SolveSection& sv = *problem.solve;
    ordered so;
    if (sv.x0) so["x0"] = point_json(*sv.x0, space);
    so["eps"] = sv.eps;
    if (sv.max_iter) so["max_iter"] = *sv.max_iter;
    if (sv.beta) so["beta"] = *sv.beta;
    if (!sv.seeds.empty()) {
      ordered seeds = ordered::array();
      for (const auto& x : sv.seeds) seeds.push_back(point_json(x, space));
      so["seeds"] = seeds;
    }
    root["solve"] = so;
  }

  const CheckSection& ck = problem.check;
  ordered ch;
  if (std::holds_alternative<AllPairs>(ck.pair_source)) {
    ch["pair_source"] = "all";
  } else {
    const auto& sp = std::get<SampledPairs>(ck.pair_source);
    ordered ps;
    ps["sampled"] = sp.count;
    ps["seed"] = sp.seed;
    ps["box"] = sp.box;
    ch["pair_source"] = ps;
  }
  ch["tol"] = ck.tol;
  ch["resolvent_tol"] = ck.resolvent_tol;
  if (ck.alpha) ch["alpha"] = *ck.alpha;
  if (ck.beta) ch["beta"] = *ck.beta;
  ch["normal_samples"] = ck.normal_samples;
  ch["seed"] = ck.seed;
  root["check"] = ch;

  return root.dump(2) + "\n";
}

}  // namespace conefp
