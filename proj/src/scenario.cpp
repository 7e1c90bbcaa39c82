#include "blq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "blq/discrete.hpp"
#include "blq/entropy.hpp"
#include "blq/error.hpp"
#include "blq/gaussian.hpp"
#include "blq/gowers.hpp"
#include "blq/grid.hpp"
#include "blq/parallel.hpp"
#include "blq/perturbation.hpp"
#include "blq/tomography.hpp"

#ifndef BLQ_SCENARIO_DIR
#define BLQ_SCENARIO_DIR "scenarios"
#endif

namespace blq {
namespace {

using std::numbers::pi;

const std::set<std::string> kTasks = {"gaussian-bl", "adjoint-gaussian", "identity-ai", "adjoint-verify",
                                      "discrete",    "tomography",       "gowers",      "entropy",
                                      "perturbation"};
const std::set<std::string> kStochastic = {"identity-ai", "adjoint-gaussian", "adjoint-verify", "discrete",
                                           "tomography",  "gowers",           "entropy"};

struct Ctx {
  const Json& s;
  RunOverrides ov;
  RunReport& r;

  std::uint64_t seed() const {
    if (ov.seed) return *ov.seed;
    return s.value("seed", std::uint64_t{0});
  }
  double tol(const Json& j, double fallback) const {
    if (ov.tol) return *ov.tol;
    return j.value("tol", fallback);
  }
};

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t count(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned()) throw SchemaError(std::string("field '") + key + "' must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return j.at(key);
}

bool all_exact(const Json& arr) {
  return std::all_of(arr.begin(), arr.end(), [](const Json& v) { return v.is_string() || v.is_number_integer(); });
}

Rational to_rational(const Json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw SchemaError("expected an exact rational (string or integer)");
}

double to_double(const Json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>()).to_double();
  if (v.is_number()) return v.get<double>();
  throw SchemaError("expected a number or rational string");
}

std::vector<double> doubles(const Json& arr) {
  if (!arr.is_array()) throw SchemaError("expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(to_double(v));
  return out;
}

Matrix parse_matrix(const Json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw SchemaError("matrix must be a non-empty array of rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw SchemaError("matrix rows have different lengths");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(rows[r][c]);
  }
  return m;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json datum_json(const BLDatum& d) {
  Json maps = Json::array();
  for (const auto& m : d.maps()) maps.push_back(matrix_json(m));
  return {{"maps", maps}, {"c", d.c()}};
}

GridSpec parse_grid(const Json& j, std::size_t d) {
  double lo = j.value("lo", -1.0), hi = j.value("hi", 1.0);
  std::size_t n = 0;
  if (j.contains("n")) {
    n = count(j, "n", 0);
  } else if (j.contains("n_by_dim")) {
    const Json& by = j.at("n_by_dim");
    std::string key = std::to_string(d);
    if (!by.contains(key)) throw SchemaError("grid has no resolution for dimension " + key);
    n = by.at(key).get<std::size_t>();
  }
  if (n == 0) throw SchemaError("grid needs a positive resolution 'n'");
  return GridSpec::cube(d, lo, hi, n);
}

// Draws theta with positive entries summing to 1 and p uniform in [lo, hi].
AdjointParams draw_params(const BLDatum& datum, Rng& rng, double lo, double hi) {
  std::vector<double> theta(datum.k());
  double sum = 0.0;
  for (auto& t : theta) sum += t = -std::log1p(-rng.uniform()) + 1e-3;
  for (auto& t : theta) t /= sum;
  double p = rng.uniform(lo, hi);
  return derive_adjoint_exponents(datum, theta, p);
}

std::vector<BLDatum> data_list(const Json& s, std::vector<std::string>* labels) {
  std::vector<BLDatum> out;
  if (s.contains("random_data")) {
    const Json& rd = s.at("random_data");
    std::uint64_t seed = rd.value("seed", std::uint64_t{7});
    std::size_t n = count(rd, "count", 20);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(random_feasible_datum(seed, i));
      if (labels) labels->push_back("random-" + std::to_string(seed) + "-" + std::to_string(i));
    }
  }
  if (s.contains("data")) {
    for (const auto& d : s.at("data")) {
      out.push_back(parse_datum(d.contains("datum") ? d.at("datum") : d));
      if (labels) labels->push_back(d.value("label", "datum-" + std::to_string(out.size() - 1)));
    }
  }
  if (out.empty()) throw SchemaError("scenario needs 'data' or 'random_data'");
  return out;
}

Json params_json(const AdjointParams& p) {
  Json j{{"theta", p.theta}, {"p_i", p.p_i}};
  j["p"] = p.p;
  return j;
}

// ---------------------------------------------------------------- gaussian

void task_gaussian_bl(Ctx& c) {
  Json cases = c.s.contains("cases") ? c.s.at("cases") : Json::array({c.s});
  Json out = Json::array();
  for (const auto& cs : cases) {
    BLDatum datum = parse_datum(field(cs, "datum"));
    std::string label = cs.value("label", "datum");
    GaussianOptResult g = bl_gaussian_constant(datum);
    FeasibilityReport feas = validate_datum(datum);
    Json row{{"label", label},         {"datum", datum_json(datum)}, {"value", g.value},         {"log_value", g.log_value},
             {"method", g.method},     {"iterations", g.iterations}, {"converged", g.converged},
             {"verdict", to_string(feas.verdict)}};
    out.push_back(row);
    c.r.results["cases"] = out;
    if (cs.contains("expect")) {
      double expect = to_double(cs.at("expect"));
      c.r.check(label + ": |value - expected|", std::abs(g.value - expect), "<=", c.tol(cs, 1e-6));
    }
  }
}

void task_identity_ai(Ctx& c) {
  std::vector<std::string> labels;
  auto data = data_list(c.s, &labels);
  const double tol = c.tol(c.s, 1e-4);
  std::vector<IdentityResidual> res(data.size());
  std::vector<Verdict> verdicts(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    res[i] = identity_ai_residual(data[i]);
    verdicts[i] = validate_datum(data[i]).verdict;
  });
  Json rows = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    rows.push_back({{"label", labels[i]},
                    {"ambient_dim", data[i].ambient_dim()},
                    {"maps", data[i].k()},
                    {"verdict", to_string(verdicts[i])},
                    {"log_left", res[i].log_left},
                    {"log_right", res[i].log_right},
                    {"residual", res[i].residual}});
    worst = std::max(worst, res[i].residual);
    c.r.check(labels[i] + ": |log L - log R|", res[i].residual, "<=", tol);
    c.r.check_true(labels[i] + ": feasible with d <= 4, k <= 4",
                   verdicts[i] == Verdict::feasible_heuristic && data[i].ambient_dim() <= 4 && data[i].k() <= 4);
  }
  c.r.results["data"] = rows;
  c.r.results["worst_residual"] = worst;
}

void grid_check(Ctx& c, const std::vector<BLDatum>& data, const std::vector<std::string>& labels,
                const std::vector<std::vector<AdjointParams>>& params, const std::vector<double>& bl,
                const Json& cfg) {
  const std::size_t per = count(cfg, "functions_per_datum", 200);
  const std::size_t blocks = count(cfg, "blocks", 4);
  const double zero_prob = cfg.value("zero_prob", 0.2);
  Rng base(c.seed(), 0x6d);
  Json rows = Json::array();
  std::size_t total_violations = 0;
  double worst_rel = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    GridSpec grid = parse_grid(field(cfg, "grid"), data[i].ambient_dim());
    std::vector<InequalityMargin> m(per);
    parallel_for(per, [&](std::size_t j) {
      Rng rng = base.fork(i * 100003 + j);
      GridFunction f = random_piecewise_constant(grid, blocks, rng, zero_prob);
      if (f.mass() == 0.0) f = GridFunction(grid, std::vector<double>(grid.size(), 1.0));
      const AdjointParams& p = params[i][j % params[i].size()];
      m[j] = adjoint_margin(f, data[i], p, bl[i], AdjointMode::forward);
    });
    std::size_t violations = 0;
    double datum_worst = std::numeric_limits<double>::infinity();
    for (const auto& x : m) {
      if (!x.holds()) ++violations;
      datum_worst = std::min(datum_worst, x.relative_margin);
    }
    total_violations += violations;
    worst_rel = std::min(worst_rel, datum_worst);
    rows.push_back({{"label", labels[i]}, {"functions", per}, {"violations", violations},
                    {"worst_relative_margin", datum_worst}});
  }
  c.r.results["grid_check"] = {{"data", rows}, {"worst_relative_margin", worst_rel}};
  c.r.check("grid margins below -quadrature estimate", static_cast<double>(total_violations), "<=", 0.0);
}

void task_adjoint_gaussian(Ctx& c) {
  std::vector<std::string> labels;
  auto data = data_list(c.s, &labels);
  const std::size_t draws = count(c.s, "draws_per_datum", 5);
  std::vector<double> prange = c.s.contains("p_range") ? doubles(c.s.at("p_range")) : std::vector<double>{0.2, 0.95};
  if (prange.size() != 2 || !(prange[0] > 0.0 && prange[1] < 1.0 && prange[0] <= prange[1]))
    throw SchemaError("'p_range' must be [lo, hi] inside (0, 1)");
  const double tol = c.tol(c.s, 1e-4);
  Rng rng(c.seed(), 0xab);
  std::vector<std::vector<AdjointParams>> params(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    Rng local = rng.fork(i);
    for (std::size_t j = 0; j < draws; ++j) params[i].push_back(draw_params(data[i], local, prange[0], prange[1]));
  }
  std::vector<double> bl(data.size());
  std::vector<std::vector<double>> abl(data.size(), std::vector<double>(draws)), formula = abl;
  parallel_for(data.size(), [&](std::size_t i) {
    bl[i] = bl_gaussian_constant(data[i]).value;
    for (std::size_t j = 0; j < draws; ++j) {
      const AdjointParams& p = params[i][j];
      abl[i][j] = abl_gaussian_constant(data[i], p).value;
      formula[i][j] = adjoint_gaussian_prefactor(p, data[i].dims(), data[i].ambient_dim()) * std::pow(bl[i], 1.0 / p.p - 1.0);
    }
  });
  Json rows = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Json dr = Json::array();
    for (std::size_t j = 0; j < draws; ++j) {
      double rel = std::abs(abl[i][j] - formula[i][j]) / std::abs(formula[i][j]);
      worst = std::max(worst, rel);
      Json pj = params_json(params[i][j]);
      pj["abl_gaussian"] = abl[i][j];
      pj["prefactor_formula"] = formula[i][j];
      pj["relative_error"] = rel;
      dr.push_back(pj);
      c.r.check(labels[i] + " draw " + std::to_string(j) + ": relative error", rel, "<=", tol);
    }
    rows.push_back({{"label", labels[i]}, {"bl_gaussian", bl[i]}, {"draws", dr}});
  }
  c.r.results["data"] = rows;
  c.r.results["worst_relative_error"] = worst;
  if (c.s.contains("grid_check")) grid_check(c, data, labels, params, bl, c.s.at("grid_check"));
}

// ---------------------------------------------------------- adjoint-verify

GridFunction build_function(const Json& fj, const GridSpec& grid) {
  std::string kind = field(fj, "kind").get<std::string>();
  const std::size_t d = grid.dim();
  auto in_box = [](const Vector& x, const Json& box) {
    for (std::size_t a = 0; a < box.size(); ++a) {
      double lo = box[a][0].get<double>(), hi = box[a][1].get<double>();
      if (!(x(static_cast<Eigen::Index>(a)) >= lo && x(static_cast<Eigen::Index>(a)) < hi)) return false;
    }
    return true;
  };
  if (kind == "product-indicator" || kind == "perturbed-product") {
    const Json& iv = field(fj, "intervals");
    if (iv.size() != d) throw SchemaError("'intervals' needs one [lo, hi] per axis");
    double amp = kind == "perturbed-product" ? number(fj, "amplitude") : 0.0;
    Json bump = kind == "perturbed-product" ? field(fj, "bump") : Json::array();
    return GridFunction::sample(grid, [&](const Vector& x) {
      double v = in_box(x, iv) ? 1.0 : 0.0;
      if (amp != 0.0 && in_box(x, bump)) v *= 1.0 + amp;
      return v;
    });
  }
  if (kind == "box-union") {
    const Json& boxes = field(fj, "boxes");
    return GridFunction::sample(grid, [&](const Vector& x) {
      for (const auto& b : boxes)
        if (in_box(x, b)) return 1.0;
      return 0.0;
    });
  }
  if (kind == "gaussian") {
    Matrix cov = parse_matrix(field(fj, "covariance"));
    Matrix prec = cov.inverse();
    return GridFunction::sample(grid, [&](const Vector& x) { return std::exp(-0.5 * x.dot(prec * x)); });
  }
  throw SchemaError("unknown function kind '" + kind + "'");
}

// Coordinate-projection targets identical to the source axes, so that cells
// map onto cells without any redistribution.
std::vector<GridSpec> axis_targets(const BLDatum& datum, const GridSpec& grid) {
  std::vector<GridSpec> out;
  for (const auto& b : datum.maps()) {
    std::vector<double> lo, hi;
    std::vector<std::size_t> n;
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      Eigen::Index axis = -1;
      for (Eigen::Index a = 0; a < b.cols(); ++a) {
        if (b(r, a) == 1.0 && axis < 0)
          axis = a;
        else if (b(r, a) != 0.0)
          throw DomainError("axis targets need coordinate projections");
      }
      if (axis < 0) throw DomainError("axis targets need coordinate projections");
      auto ua = static_cast<std::size_t>(axis);
      lo.push_back(grid.lo[ua]);
      hi.push_back(grid.hi[ua]);
      n.push_back(grid.n[ua]);
    }
    out.emplace_back(lo, hi, n);
  }
  return out;
}

Json verify_case(Ctx& c, const Json& cs, const std::string& prefix, std::size_t case_index) {
  BLDatum datum = parse_datum(field(cs, "datum"));
  std::vector<double> theta = doubles(field(cs, "theta"));
  double p = to_double(field(cs, "p"));
  AdjointParams params = derive_adjoint_exponents(datum, theta, p);
  double bl = cs.contains("bl_value") ? number(c.s, "bl_value") : bl_gaussian_constant(datum).value;
  GridSpec grid = parse_grid(field(cs, "grid"), datum.ambient_dim());
  MarginOptions opts;
  if (cs.value("targets", std::string("matched")) == "axis") opts.targets = axis_targets(datum, grid);
  const double strict_factor = cs.value("strict_factor", 3.0);
  Json rows = Json::array();
  Rng rng = Rng(c.seed(), 0x7e).fork(case_index);
  std::size_t fn_index = 0;
  for (const auto& fj : field(cs, "functions")) {
    std::string expect = fj.value("expect", std::string("inequality"));
    std::vector<std::pair<std::string, GridFunction>> fs;
    if (fj.value("kind", std::string()) == "random") {
      std::size_t n = count(fj, "count", 10);
      for (std::size_t j = 0; j < n; ++j) {
        Rng local = rng.fork(fn_index * 7919 + j);
        fs.emplace_back("random-" + std::to_string(j),
                        random_piecewise_constant(grid, count(fj, "blocks", 4), local, fj.value("zero_prob", 0.2)));
      }
    } else {
      fs.emplace_back(fj.value("label", fj.at("kind").get<std::string>()), build_function(fj, grid));
    }
    ++fn_index;
    for (auto& [label, f] : fs) {
      if (f.mass() == 0.0) continue;
      InequalityMargin m = adjoint_margin(f, datum, params, bl, params.mode, opts);
      rows.push_back({{"label", label},
                      {"expect", expect},
                      {"lhs", m.lhs},
                      {"rhs", m.rhs},
                      {"margin", m.margin},
                      {"quadrature_estimate", m.quadrature_estimate},
                      {"tensor_distance", f.dim() == 2 ? tensor_distance(f) : -1.0}});
      if (expect == "equality")
        c.r.check(prefix + label + ": |margin| - estimate", std::abs(m.margin) - m.quadrature_estimate, "<=", 0.0);
      else if (expect == "strict")
        c.r.check(prefix + label + ": margin - " + format_number(strict_factor) + " x estimate",
                  m.margin - strict_factor * m.quadrature_estimate, ">=", 0.0);
      else
        c.r.check(prefix + label + ": margin + estimate", m.margin + m.quadrature_estimate, ">=", 0.0);
    }
  }
  return {{"label", cs.value("label", "case")}, {"params", params_json(params)}, {"bl_value", bl}, {"functions", rows}};
}

void task_adjoint_verify(Ctx& c) {
  c.r.results["cases"] = Json::array();
  if (!c.s.contains("cases")) {
    c.r.results["cases"].push_back(verify_case(c, c.s, "", 0));
    return;
  }
  std::size_t i = 0;
  for (const auto& cs : c.s.at("cases")) {
    std::string prefix = cs.value("label", "case-" + std::to_string(i)) + " / ";
    c.r.results["cases"].push_back(verify_case(c, cs, prefix, i++));
  }
}


// ---------------------------------------------------------------- discrete

void task_discrete(Ctx& c) {
  const double tol = c.tol(c.s, 1e-12);
  const std::size_t nf = count(c.s, "functions_per_case", 1000);
  Rng rng(c.seed(), 0xd1);
  Json rows = Json::array();
  std::size_t case_index = 0;
  for (const auto& cs : field(c.s, "cases")) {
    std::string label = cs.value("label", "case-" + std::to_string(case_index));
    FiniteAbelianGroup g(field(cs, "factors").get<std::vector<std::int64_t>>());
    std::vector<GroupHom> maps;
    for (const auto& mj : field(cs, "maps")) {
      FiniteAbelianGroup target(field(mj, "target_factors").get<std::vector<std::int64_t>>());
      maps.emplace_back(g, target, field(mj, "matrix").get<std::vector<std::vector<std::int64_t>>>());
    }
    const Json& cj = field(cs, "c");
    const Json& tj = field(cs, "theta");
    const Json& pj = field(cs, "p");
    DiscreteExponents ce;
    AdjointParams params;
    if (all_exact(cj) && all_exact(tj) && (pj.is_string() || pj.is_number_integer())) {
      std::vector<Rational> cr, tr;
      for (const auto& v : cj) cr.push_back(to_rational(v));
      for (const auto& v : tj) tr.push_back(to_rational(v));
      ce = DiscreteExponents::from_rationals(cr);
      params = derive_discrete_exponents(ce, tr, to_rational(pj));
    } else {
      ce = DiscreteExponents::from_doubles(doubles(cj));
      params = derive_adjoint_exponents(ce.c, doubles(tj), to_double(pj));
    }
    BlsResult bls = bls_constant(g, maps, ce);
    AblsResult abls = abls_constant(g, maps, ce, params.p);
    double predicted = std::pow(bls.value, 1.0 / params.p - 1.0);
    double rel = std::abs(abls.value - predicted) / predicted;
    bool exact = same_ratio(abls.ratio, bls.ratio, ce);
    c.r.check(label + ": |ABLs - BLs^(1/p-1)| / BLs^(1/p-1)", rel, "<=", tol);
    c.r.check_true(label + ": sup ratios equal", exact);

    std::vector<double> margins(nf);
    parallel_for(nf, [&](std::size_t j) {
      Rng local = rng.fork(case_index * 1000003 + j);
      std::vector<double> f(g.order());
      for (auto& v : f) v = local.bernoulli(0.2) ? 0.0 : local.uniform();
      if (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) f[0] = 1.0;
      margins[j] = discrete_adjoint_margin(f, maps, params, bls.value).margin;
    });
    double worst = nf ? *std::min_element(margins.begin(), margins.end()) : 0.0;
    if (nf) c.r.check(label + ": worst margin over random f", worst, ">=", -tol);
    rows.push_back({{"label", label},
                    {"order", g.order()},
                    {"params", params_json(params)},
                    {"bls", bls.value},
                    {"abls", abls.value},
                    {"abls_sup_ratio", abls.sup_ratio},
                    {"argmax_size", abls.argmax.size()},
                    {"relative_difference", rel},
                    {"exact_match", exact},
                    {"worst_margin", worst}});
    c.r.results["cases"] = rows;
    ++case_index;
  }
}

// ------------------------------------------------------------ perturbation

void task_perturbation(Ctx& c) {
  BLDatum datum = parse_datum(field(c.s, "datum"));
  AdjointParams params = derive_adjoint_exponents(datum, doubles(field(c.s, "theta")), to_double(field(c.s, "p")));
  double eps = c.s.value("eps", 0.01);
  const double tol = c.tol(c.s, 0.05);
  Json rows = Json::array();
  std::vector<double> coef;
  for (const auto& gj : field(c.s, "resolutions")) {
    GridSpec grid = parse_grid(gj, datum.ambient_dim());
    PerturbationGap gap = perturbation_gap(datum, params, eps, grid);
    rows.push_back({{"n", grid.n[0]},
                    {"coefficient", gap.coefficient},
                    {"self_estimate", gap.self_estimate},
                    {"lower_bound", gap.lower_bound},
                    {"radius", gap.radius},
                    {"cone_ratio", gap.cone_ratio},
                    {"index", gap.index},
                    {"finite_difference", gap.finite_difference}});
    c.r.results["resolutions"] = rows;
    c.r.check("n=" + std::to_string(grid.n[0]) + ": coefficient", gap.coefficient, ">=", 0.0);
    coef.push_back(gap.coefficient);
  }
  for (std::size_t i = 1; i < coef.size(); ++i)
    c.r.check("relative change between resolutions " + std::to_string(i - 1) + " and " + std::to_string(i),
              std::abs(coef[i] - coef[i - 1]) / std::abs(coef[i]), "<=", tol);
}

// -------------------------------------------------------------- tomography

GridFunction random_tomography_function(std::size_t d, std::size_t n, std::size_t blocks, Rng& rng) {
  GridSpec grid = GridSpec::cube(d, -1.0, 1.0, n);
  GridFunction f = random_piecewise_constant(grid, blocks, rng);
  if (f.mass() == 0.0) f = GridFunction(grid, std::vector<double>(grid.size(), 1.0));
  return f;
}

void check_tomography(Ctx& c, const Json& ck, std::size_t index) {
  std::string kind = field(ck, "kind").get<std::string>();
  Rng rng = Rng(c.seed(), 0x70).fork(index);
  Json res;
  if (kind == "l1") {
    std::size_t d = count(ck, "d", 2);
    DirectionSet dirs = DirectionSet::uniform(d, count(ck, "directions", 180));
    double worst = 0.0;
    for (std::size_t j = 0; j < count(ck, "functions", 20); ++j) {
      GridFunction f = random_tomography_function(d, count(ck, "grid_n", 64), count(ck, "blocks", 4), rng);
      double ratio = xray_transform(f, dirs).mass() / f.mass();
      worst = std::max(worst, std::abs(ratio - 1.0));
    }
    res["worst_deviation"] = worst;
    c.r.check("l1: worst |ratio - 1|", worst, "<=", c.tol(ck, 1e-3));
  } else if (kind == "lower-bound") {
    std::size_t d = count(ck, "d", 2);
    std::size_t k = count(ck, "k", 1);
    PlaneSet planes = k == 1 ? PlaneSet::lines(DirectionSet::uniform(d, count(ck, "directions", 180)))
                             : PlaneSet::hyperplanes(DirectionSet::uniform(d, count(ck, "directions", 100)));
    Json per_p = Json::array();
    std::size_t nf = count(ck, "functions", 100);
    std::vector<GridFunction> fs;
    for (std::size_t j = 0; j < nf; ++j)
      fs.push_back(random_tomography_function(d, count(ck, "grid_n", 64), count(ck, "blocks", 4), rng));
    for (double p : doubles(field(ck, "p_values"))) {
      double q = kplane_exponent(p, d, k);
      std::vector<InequalityMargin> m(nf);
      parallel_for(nf, [&](std::size_t j) { m[j] = tomography_lower_bound_margin(fs[j], p, q, k, planes); });
      std::size_t violations = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& x : m) {
        violations += x.holds() ? 0 : 1;
        worst = std::min(worst, x.relative_margin);
      }
      per_p.push_back({{"p", p}, {"q", q}, {"violations", violations}, {"worst_relative_margin", worst}});
      c.r.check("lower-bound p=" + format_number(p) + ": violations", static_cast<double>(violations), "<=", 0.0);
    }
    res["pairs"] = per_p;
  } else if (kind == "monotonicity") {
    double p = ck.value("p", 0.5);
    Json rows = Json::array();
    for (std::size_t j = 0; j < count(ck, "functions", 3); ++j) {
      GridFunction f = random_tomography_function(3, count(ck, "grid_n", 32), count(ck, "blocks", 4), rng);
      MonotonicityChain ch = kplane_monotonicity(f, p, count(ck, "directions", 100));
      rows.push_back({{"exponents", ch.exponents}, {"norms", ch.norms}});
      for (std::size_t s = 0; s < ch.steps.size(); ++s)
        c.r.check("monotonicity f" + std::to_string(j) + " step " + std::to_string(s) + ": margin + estimate",
                  ch.steps[s].margin + ch.steps[s].quadrature_estimate, ">=", 0.0);
    }
    res["chains"] = rows;
  } else if (kind == "restricted-constant") {
    std::string mu_kind = ck.value("mu", std::string("great-circle"));
    std::size_t points = count(ck, "points", 64);
    double p = ck.value("p", 0.5);
    std::size_t d = mu_kind == "great-circle" ? 3 : count(ck, "d", 2);
    DirectionSet mu = mu_kind == "great-circle" ? DirectionSet::great_circle(points)
                                                : DirectionSet::random(d, points, c.seed() + index);
    double q = kplane_exponent(p, d, 1);
    McEstimate est = restricted_xray_constant(mu, p, q, count(ck, "n_mc", 100000), c.seed() + index);
    res = {{"mu", mu_kind}, {"value", est.value}, {"std_error", est.std_error}, {"q", q}};
    if (mu_kind == "great-circle") {
      c.r.check("restricted constant on a great circle", est.value, "<=", c.tol(ck, 1e-3));
    } else if (d == 2) {
      double closed = std::pow(sin_moment(1.0 - q), 1.0 / (2.0 * q));
      res["closed_form"] = closed;
      c.r.check("restricted constant vs sin-moment closed form (std errors)",
                std::abs(est.value - closed) / std::max(est.std_error, 1e-300), "<=", ck.value("sigmas", 4.0));
    }
  } else if (kind == "gamma-closed-form") {
    double p = ck.value("p", 2.0);
    double worst = 0.0;
    Json rows = Json::array();
    for (double q : doubles(field(ck, "q_values"))) {
      double via_gamma = xx_gamma_constant(2, p, q);
      double via_sin = std::pow(sin_moment(1.0 - q), (1.0 - 1.0 / p) / q);
      worst = std::max(worst, std::abs(via_gamma - via_sin));
      rows.push_back({{"q", q}, {"gamma_product", via_gamma}, {"sin_moment", via_sin}});
    }
    res["rows"] = rows;
    c.r.check("gamma product vs sin moment (d=2)", worst, "<=", c.tol(ck, 1e-10));
  } else if (kind == "gamma-monte-carlo") {
    double p = ck.value("p", 2.0), q = ck.value("q", 0.5);
    Json rows = Json::array();
    for (double dd : doubles(field(ck, "dims"))) {
      auto d = static_cast<std::size_t>(dd);
      GammaOracle o = xx_gamma_monte_carlo(d, p, q, count(ck, "n_mc", 1000000), c.seed() + d);
      double exact = wedge_moment(d, 1.0 - q);
      double rel = std::abs(o.wedge_moment.value - exact) / exact;
      rows.push_back({{"d", d},
                      {"monte_carlo", o.wedge_moment.value},
                      {"std_error", o.wedge_moment.std_error},
                      {"gamma_product", exact},
                      {"constant", xx_gamma_constant(d, p, q)},
                      {"constant_monte_carlo", o.constant}});
      c.r.check("d=" + std::to_string(d) + ": Monte Carlo vs gamma product (relative)", rel, "<=", c.tol(ck, 0.02));
    }
    res["rows"] = rows;
  } else if (kind == "three-norm") {
    double p = ck.value("p", 2.0), q = ck.value("q", 0.5);
    DirectionSet dirs = DirectionSet::uniform(2, count(ck, "directions", 90));
    std::size_t nf = count(ck, "functions", 100);
    std::vector<InequalityMargin> m(nf);
    std::vector<GridFunction> fs;
    for (std::size_t j = 0; j < nf; ++j)
      fs.push_back(random_tomography_function(2, count(ck, "grid_n", 48), count(ck, "blocks", 4), rng));
    parallel_for(nf, [&](std::size_t j) { m[j] = xx_three_norm_margin(fs[j], p, q, dirs); });
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& x : m) {
      violations += x.holds() ? 0 : 1;
      worst = std::min(worst, x.relative_margin);
    }
    res = {{"r", xx_exponent(2, p, q)}, {"constant", xx_gamma_constant(2, p, q)}, {"violations", violations},
           {"worst_relative_margin", worst}};
    c.r.check("three-norm violations", static_cast<double>(violations), "<=", 0.0);
  } else if (kind == "averaged-loomis-whitney") {
    DirectionSet dirs = DirectionSet::uniform(2, count(ck, "directions", 360));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count(ck, "sets", 50); ++j) {
      std::vector<Box2> boxes;
      std::size_t nb = 1 + rng.below(count(ck, "max_boxes", 5));
      for (std::size_t b = 0; b < nb; ++b) {
        double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
        boxes.push_back({x, y, x + rng.uniform(0.05, 1.0), y + rng.uniform(0.05, 1.0)});
      }
      worst = std::min(worst, averaged_loomis_whitney_margin(boxes, dirs));
    }
    res["worst_margin"] = worst;
    c.r.check("averaged Loomis-Whitney worst margin", worst, ">=", -c.tol(ck, 1e-3));
  } else if (kind == "entropy-sequence") {
    std::size_t d = count(ck, "d", 2);
    GridSpec grid = GridSpec::cube(d, -3.0, 3.0, count(ck, "grid_n", 128));
    std::string density = ck.value("density", std::string("gaussian"));
    GridFunction f = GridFunction::sample(grid, [&](const Vector& x) {
      if (density == "gaussian") return std::exp(-pi * x.squaredNorm());
      Vector shift = Vector::Constant(x.size(), 0.6);
      return std::exp(-pi * 2.0 * (x - shift).squaredNorm()) + 0.5 * std::exp(-pi * (x + shift).squaredNorm());
    });
    auto seq = kplane_entropy_sequence(f, count(ck, "directions", 90));
    res = {{"density", density}, {"sequence", seq}};
    const double t = c.tol(ck, 1e-3);
    for (std::size_t k = 1; k < seq.size(); ++k) {
      if (density == "gaussian")
        c.r.check("entropy sequence k=" + std::to_string(k) + ": |H_k - H_0|", std::abs(seq[k] - seq[0]), "<=", t);
      else
        c.r.check("entropy sequence k=" + std::to_string(k) + ": H_k - H_(k-1)", seq[k] - seq[k - 1], ">=", -t);
    }
  } else if (kind == "export") {
    GridFunction f = random_tomography_function(2, count(ck, "grid_n", 32), 4, rng);
    TomogramSamples t = xray_transform(f, DirectionSet::uniform(2, count(ck, "directions", 8)));
    std::ostringstream os;
    write_tomogram_csv(os, t);
    c.r.tables[ck.value("table", std::string("tomogram"))] = os.str();
    res = {{"rows", t.values.size() * t.offsets.size()}, {"mass", t.mass()}};
  } else {
    throw SchemaError("unknown tomography check '" + kind + "'");
  }
  res["kind"] = kind;
  c.r.results["checks"].push_back(res);
}

// ------------------------------------------------------------------ gowers

void check_gowers(Ctx& c, const Json& ck, std::size_t index) {
  std::string kind = field(ck, "kind").get<std::string>();
  Rng rng = Rng(c.seed(), 0x60).fork(index);
  std::size_t n = count(ck, "n", 64);
  Json res;
  auto random_f = [&](Rng& r) {
    std::vector<double> f(n);
    for (auto& v : f) v = r.uniform();
    return f;
  };
  if (kind == "logconvexity") {
    std::size_t d = count(ck, "d", 2);
    std::size_t nf = count(ck, "functions", 200);
    std::vector<double> m(nf);
    parallel_for(nf, [&](std::size_t j) {
      Rng r = rng.fork(j);
      m[j] = gowers_logconvexity_margin(random_f(r), d);
    });
    double worst = nf ? *std::min_element(m.begin(), m.end()) : 0.0;
    res = {{"d", d}, {"n", n}, {"functions", nf}, {"worst_margin", worst}, {"weight", logconvexity_weight(d)}};
    c.r.check("log-convexity d=" + std::to_string(d) + ": worst margin", worst, ">=", -c.tol(ck, 1e-12));
  } else if (kind == "constant") {
    std::size_t d = count(ck, "d", 2);
    double m = gowers_logconvexity_margin(std::vector<double>(n, 1.0), d);
    double scale = gowers_norm(std::vector<double>(n, 1.0), d);
    res = {{"d", d}, {"n", n}, {"margin", m}, {"norm", scale}};
    c.r.check("constant function: |margin| / norm", std::abs(m) / scale, "<=", c.tol(ck, 1e-12));
  } else if (kind == "parallelepiped") {
    std::size_t sets = count(ck, "sets", 20);
    double density = ck.value("density", 0.4);
    Json rows = Json::array();
    for (std::size_t j = 0; j < sets; ++j) {
      std::vector<bool> a(n);
      double dj = density * (0.5 + rng.uniform());
      for (std::size_t x = 0; x < n; ++x) a[x] = rng.bernoulli(dj);
      if (std::none_of(a.begin(), a.end(), [](bool b) { return b; })) a[0] = true;
      ParallelepipedCheck pc = parallelepiped_check(a);
      std::vector<double> f(n);
      for (std::size_t x = 0; x < n; ++x) f[x] = a[x] ? 1.0 : 0.0;
      double u2 = std::pow(gowers_norm(f, 2), 4), u3 = std::pow(gowers_norm(f, 3), 8);
      bool counts_match = std::abs(u2 - static_cast<double>(pc.parallelograms)) < 1e-6 * u2 + 1e-6 &&
                          std::abs(u3 - static_cast<double>(pc.parallelepipeds)) < 1e-6 * u3 + 1e-6;
      rows.push_back({{"size", pc.set_size},
                      {"parallelograms", pc.parallelograms},
                      {"parallelepipeds", pc.parallelepipeds},
                      {"holds", pc.holds}});
      c.r.check_true("set " + std::to_string(j) + ": parallelepipeds >= delta^4 |A|^4", pc.holds);
      c.r.check_true("set " + std::to_string(j) + ": counts match Gowers sums", counts_match);
    }
    res["sets"] = rows;
  } else if (kind == "fourier") {
    double worst = 0.0;
    for (std::size_t j = 0; j < count(ck, "functions", 5); ++j) {
      auto f = random_f(rng);
      worst = std::max(worst, std::abs(gowers_norm(f, 2) - gowers_u2_fourier(f)));
    }
    res = {{"n", n}, {"worst_difference", worst}};
    c.r.check("U2 direct vs Fourier", worst, "<=", c.tol(ck, 1e-9));
  } else if (kind == "profile") {
    auto f = random_f(rng);
    GowersProfile prof = gowers_profile(f, count(ck, "max_order", 4));
    std::ostringstream os;
    write_profile_csv(os, prof);
    c.r.tables[ck.value("table", std::string("gowers_profile"))] = os.str();
    res = {{"orders", prof.orders}, {"abscissae", prof.abscissae}, {"norms", prof.norms}};
  } else if (kind == "real-line-scan") {
    Json rows = Json::array();
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& e : real_line_ratio_scan(count(ck, "samples", 64))) {
      rows.push_back({{"family", e.name}, {"ratio", e.ratio}});
      lowest = std::min(lowest, e.ratio);
    }
    res = {{"families", rows}, {"max_ratio", std::max_element(rows.begin(), rows.end(), [](const Json& a, const Json& b) {
                                                return a["ratio"].get<double>() < b["ratio"].get<double>();
                                              })->at("ratio")},
           {"min_ratio", lowest}};
  } else {
    throw SchemaError("unknown gowers check '" + kind + "'");
  }
  res["kind"] = kind;
  c.r.results["checks"].push_back(res);
}

// ----------------------------------------------------------------- entropy

GridFunction density_on_grid(const Json& dj, const GridSpec& grid) {
  std::string kind = field(dj, "kind").get<std::string>();
  if (kind == "gaussian") {
    Matrix cov = parse_matrix(field(dj, "covariance"));
    Matrix prec = cov.inverse();
    return GridFunction::sample(grid, [&](const Vector& x) { return std::exp(-0.5 * x.dot(prec * x)); });
  }
  if (kind == "mixture") {
    double sep = dj.value("separation", 1.0);
    return GridFunction::sample(grid, [&](const Vector& x) {
      Vector s = Vector::Constant(x.size(), sep / 2.0);
      return std::exp(-pi * 2.0 * (x - s).squaredNorm()) + 0.7 * std::exp(-pi * 3.0 * (x + s).squaredNorm());
    });
  }
  return build_function(dj, grid);
}

void check_entropy(Ctx& c, const Json& ck, std::size_t index) {
  std::string kind = field(ck, "kind").get<std::string>();
  Json res;
  (void)index;
  if (kind == "entropic-margin") {
    Json rows = Json::array();
    for (const auto& item : field(ck, "densities")) {
      BLDatum datum = parse_datum(field(item, "datum"));
      GridSpec grid = parse_grid(field(item, "grid"), datum.ambient_dim());
      GridFunction f = density_on_grid(field(item, "density"), grid);
      double bl = item.contains("bl_value") ? number(item, "bl_value") : bl_gaussian_constant(datum).value;
      EntropicMargin m = entropic_bl_margin(f, datum, bl);
      std::string label = item.value("label", "density");
      rows.push_back({{"label", label}, {"margin", m.value}, {"quadrature_estimate", m.quadrature_estimate}});
      c.r.check(label + ": entropic margin", m.value, ">=", -c.tol(ck, 1e-3));
      if (item.contains("expect_zero"))
        c.r.check(label + ": |margin|", std::abs(m.value), "<=", item.at("expect_zero").get<double>());
      if (item.contains("expect_value"))
        c.r.check(label + ": |margin - expected|", std::abs(m.value - number(item, "expect_value")), "<=",
                  item.value("expect_tol", 1e-2));
    }
    res["densities"] = rows;
  } else if (kind == "renyi-convergence") {
    Json rows = Json::array();
    std::vector<double> eps = doubles(field(ck, "eps"));
    for (const auto& item : field(ck, "densities")) {
      BLDatum datum = parse_datum(field(item, "datum"));
      GridSpec grid = parse_grid(field(item, "grid"), datum.ambient_dim());
      GridFunction f = density_on_grid(field(item, "density"), grid);
      double bl = item.contains("bl_value") ? number(item, "bl_value") : bl_gaussian_constant(datum).value;
      std::vector<double> theta = doubles(field(item, "theta"));
      RenyiConvergence rc = renyi_convergence(f, datum, theta, bl, eps);
      std::string label = item.value("label", "density");
      rows.push_back({{"label", label},
                      {"shannon_margin", rc.shannon_margin},
                      {"eps", rc.eps},
                      {"renyi_margins", rc.margins},
                      {"slopes", rc.slopes}});
      c.r.check(label + ": relative slope spread", rc.slope_spread(), "<=", ck.value("slope_tol", 0.1));
      for (std::size_t i = 0; i < rc.eps.size(); ++i)
        c.r.check(label + ": Renyi margin eps=" + format_number(rc.eps[i]), rc.margins[i], ">=", -c.tol(ck, 1e-3));
    }
    res["densities"] = rows;
  } else if (kind == "counterexample") {
    long double q = ck.value("q", 0.25);
    long double err = 0.0L;
    long double fd = ridders_second_derivative(escort_curvature_profile, q, ck.value("h0", 0.1), &err);
    long double exact = escort_curvature_exact(q);
    res = {{"q", static_cast<double>(q)},
           {"finite_difference", static_cast<double>(fd)},
           {"closed_form", static_cast<double>(exact)},
           {"extrapolation_error", static_cast<double>(err)}};
    c.r.check("second derivative vs (2-4q)/(1+q)^4", static_cast<double>(std::abs(fd - exact)), "<=", c.tol(ck, 1e-12));
    c.r.check("second derivative is positive", static_cast<double>(fd), ">=", 0.0);
    if (ck.contains("tensor")) {
      const Json& t = ck.at("tensor");
      std::size_t n = count(t, "samples", 4000);
      double amp = t.value("amplitude", 0.05);
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i)
        g[i] = 1.0 + amp * std::sqrt(2.0) * std::cos(2.0 * pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
      std::vector<double> meas(n, 1.0 / static_cast<double>(n));
      double m = tensor_escort_margin(DiscreteDensity(g, meas), static_cast<double>(q), t.value("delta", 0.1));
      res["tensor_margin"] = m;
      c.r.check("three-variable tensor inequality fails at q", m, "<=", 0.0);
    }
  } else if (kind == "indicator-probe") {
    Json rows = Json::array();
    for (const auto& item : field(ck, "cases")) {
      BLDatum datum = parse_datum(field(item, "datum"));
      GridSpec grid = parse_grid(field(item, "grid"), datum.ambient_dim());
      GridFunction f = build_function(field(item, "set"), grid);
      double bl = item.contains("bl_value") ? number(item, "bl_value") : bl_gaussian_constant(datum).value;
      double p = to_double(field(item, "p"));
      double v = p_entropy_probe(f, datum, doubles(field(item, "theta")), p, bl);
      std::string label = item.value("label", "set");
      rows.push_back({{"label", label}, {"p", p}, {"probe", v}});
      c.r.check(label + ": p-entropy probe", v, "<=", c.tol(ck, 1e-3));
    }
    res["cases"] = rows;
  } else {
    throw SchemaError("unknown entropy check '" + kind + "'");
  }
  res["kind"] = kind;
  c.r.results["checks"].push_back(res);
}

void run_checks(Ctx& c, const std::function<void(Ctx&, const Json&, std::size_t)>& fn) {
  c.r.results["checks"] = Json::array();
  std::size_t i = 0;
  for (const auto& ck : field(c.s, "checks")) fn(c, ck, i++);
}

RunReport run_once(const Json& s, const RunOverrides& ov) {
  RunReport r;
  r.scenario = s.value("name", std::string("scenario"));
  r.task = s.value("task", std::string());
  r.inputs = s;
  if (ov.seed) r.inputs["seed"] = *ov.seed;
  if (ov.tol) r.inputs["tol_override"] = *ov.tol;
  Ctx c{s, ov, r};
  try {
    validate_scenario(s);
    const std::string& t = r.task;
    if (t == "gaussian-bl") task_gaussian_bl(c);
    else if (t == "identity-ai") task_identity_ai(c);
    else if (t == "adjoint-gaussian") task_adjoint_gaussian(c);
    else if (t == "adjoint-verify") task_adjoint_verify(c);
    else if (t == "discrete") task_discrete(c);
    else if (t == "perturbation") task_perturbation(c);
    else if (t == "tomography") run_checks(c, check_tomography);
    else if (t == "gowers") run_checks(c, check_gowers);
    else if (t == "entropy") run_checks(c, check_entropy);
  } catch (const std::exception& e) {
    r.error = std::string(e.what());
  }
  return r;
}

}  // namespace

BLDatum parse_datum(const Json& j) {
  if (!j.is_object()) throw SchemaError("datum must be an object");
  if (j.contains("family")) {
    std::string fam = j.at("family").get<std::string>();
    if (fam == "loomis-whitney") return data::loomis_whitney(count(j, "d", 2));
    if (fam == "holder") return data::holder_identity(count(j, "d", 1), count(j, "copies", 1));
    if (fam == "young") return data::young();
    if (fam == "finner") return data::finner();
    if (fam == "random") return random_feasible_datum(j.value("seed", std::uint64_t{7}), count(j, "index", 0));
    throw SchemaError("unknown datum family '" + fam + "'");
  }
  const Json& maps_j = field(j, "maps");
  const Json& c_j = field(j, "c");
  if (!maps_j.is_array() || maps_j.empty()) throw SchemaError("'maps' must be a non-empty array");
  if (!c_j.is_array() || c_j.size() != maps_j.size()) throw SchemaError("'c' must have one entry per map");
  std::vector<Matrix> maps;
  for (const auto& m : maps_j) maps.push_back(parse_matrix(m));
  try {
    if (all_exact(c_j)) {
      std::vector<Rational> c;
      for (const auto& v : c_j) c.push_back(to_rational(v));
      return BLDatum(maps, c);
    }
    return BLDatum(maps, doubles(c_j));
  } catch (const SchemaError&) {
    throw;
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid datum: ") + e.what());
  }
}

void validate_scenario(const Json& s) {
  if (!s.is_object()) throw SchemaError("scenario must be a JSON object");
  if (!s.contains("name") || !s.at("name").is_string() || s.at("name").get<std::string>().empty())
    throw SchemaError("field 'name' must be a non-empty string");
  if (!s.contains("task") || !s.at("task").is_string()) throw SchemaError("field 'task' must be a string");
  std::string task = s.at("task").get<std::string>();
  if (!kTasks.count(task)) throw SchemaError("unknown task '" + task + "'");
  if (kStochastic.count(task) && (!s.contains("seed") || !s.at("seed").is_number_unsigned()))
    throw SchemaError("task '" + task + "' is stochastic and needs an unsigned integer 'seed'");
  if (s.contains("tol") && !(s.at("tol").is_number() && s.at("tol").get<double>() > 0.0))
    throw SchemaError("field 'tol' must be a positive number");
  if (s.contains("check_determinism") && !s.at("check_determinism").is_boolean())
    throw SchemaError("field 'check_determinism' must be a boolean");
  if ((task == "tomography" || task == "gowers" || task == "entropy") &&
      (!s.contains("checks") || !s.at("checks").is_array()))
    throw SchemaError("task '" + task + "' needs a 'checks' array");
}

Json parse_scenario(const std::string& text) {
  Json s;
  try {
    s = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Json load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string resolve_scenario(const std::string& path_or_name) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(path_or_name)) return path_or_name;
  const char* env = std::getenv("BLQ_SCENARIO_DIR");
  std::vector<fs::path> dirs;
  if (env && *env) dirs.emplace_back(env);
  dirs.emplace_back(BLQ_SCENARIO_DIR);
  for (const auto& d : dirs) {
    fs::path direct = d / (path_or_name + ".json");
    if (fs::is_regular_file(direct)) return direct.string();
    if (fs::is_directory(d))
      for (const auto& e : fs::recursive_directory_iterator(d))
        if (e.is_regular_file() && e.path().filename() == path_or_name + ".json") return e.path().string();
  }
  throw SchemaError("no scenario file or name '" + path_or_name + "'");
}

RunReport run_scenario(const Json& scenario, const RunOverrides& overrides) {
  RunReport r = run_once(scenario, overrides);
  if (scenario.is_object() && scenario.value("check_determinism", false) && r.error.empty()) {
    RunReport again = run_once(scenario, overrides);
    bool same = canonical_json(report_to_json(r)) == canonical_json(report_to_json(again)) && r.tables == again.tables;
    r.check_true("repeat run gives byte-identical report", same);
  }
  return r;
}

void write_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
  };
  std::string stem = report.scenario.empty() ? "report" : report.scenario;
  put(fs::path(dir) / (stem + ".json"), canonical_json(report_to_json(report)));
  put(fs::path(dir) / (stem + ".csv"), report_to_csv(report));
  for (const auto& [name, csv] : report.tables) put(fs::path(dir) / (stem + "." + name + ".csv"), csv);
}

}  // namespace blq
