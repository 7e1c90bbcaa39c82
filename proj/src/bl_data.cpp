#include "blq/bl_data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "blq/error.hpp"

namespace blq {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kScalingTol = 1e-9;
constexpr double kSumTol = 1e-12;

std::vector<double> to_doubles(const std::vector<Rational>& r) {
  std::vector<double> out;
  out.reserve(r.size());
  for (const auto& x : r) out.push_back(x.to_double());
  return out;
}

struct ImageDims {
  double weighted = 0.0;
  bool ambiguous = false;
};

ImageDims weighted_image_dim(const BLDatum& datum, const Matrix& basis) {
  ImageDims out;
  if (basis.cols() == 0) return out;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    RankInfo r = numerical_rank(datum.map(i) * basis, kRankTol);
    out.weighted += datum.c(i) * static_cast<double>(r.rank);
    out.ambiguous = out.ambiguous || r.ambiguous;
  }
  return out;
}

Matrix coordinate_basis(std::size_t d, std::uint64_t mask) {
  std::size_t m = static_cast<std::size_t>(std::popcount(mask));
  Matrix q = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < d; ++j)
    if (mask >> j & 1U) q(static_cast<Eigen::Index>(j), col++) = 1.0;
  return q;
}

Matrix projection_dropping(std::size_t d, std::size_t drop) {
  Matrix b = Matrix::Zero(static_cast<Eigen::Index>(d - 1), static_cast<Eigen::Index>(d));
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < d; ++j)
    if (j != drop) b(row++, static_cast<Eigen::Index>(j)) = 1.0;
  return b;
}

Matrix coordinate_projection(std::size_t d, std::initializer_list<std::size_t> keep) {
  Matrix b = Matrix::Zero(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(d));
  Eigen::Index row = 0;
  for (std::size_t j : keep) b(row++, static_cast<Eigen::Index>(j)) = 1.0;
  return b;
}

Matrix random_invertible(std::size_t d, Rng& rng) {
  Matrix u = haar_frame(d, d, rng);
  Matrix v = haar_frame(d, d, rng);
  Vector s(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::exp(rng.uniform(-0.4, 0.4));
  return u * s.asDiagonal() * v.transpose();
}

// B_i -> U_i B_i M with Haar U_i and a well-conditioned random M.
BLDatum transformed(const BLDatum& base, Rng& rng) {
  Matrix m = random_invertible(base.ambient_dim(), rng);
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < base.k(); ++i)
    maps.push_back(haar_frame(base.dim(i), base.dim(i), rng) * base.map(i) * m);
  if (base.c_exact()) return BLDatum(std::move(maps), *base.c_exact());
  return BLDatum(std::move(maps), base.c());
}

// Weights total / sum(w) * w with w uniform in [1, 1.3]; keeps each exponent
// strictly below 1 for the rank-one families.
std::vector<double> spread_exponents(std::size_t k, double total, Rng& rng) {
  std::vector<double> w(k);
  for (auto& x : w) x = rng.uniform(1.0, 1.3);
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x *= total / s;
  return w;
}

}  // namespace

BLDatum::BLDatum(std::vector<Matrix> maps, std::vector<double> exponents)
    : maps_(std::move(maps)), c_(std::move(exponents)) {
  check_shapes();
}

BLDatum::BLDatum(std::vector<Matrix> maps, std::vector<Rational> exponents)
    : maps_(std::move(maps)), c_(to_doubles(exponents)), c_exact_(std::move(exponents)) {
  check_shapes();
}

void BLDatum::check_shapes() {
  if (maps_.empty()) throw DomainError("datum needs at least one map");
  if (maps_.size() != c_.size())
    throw DomainError("datum has " + std::to_string(maps_.size()) + " maps but " +
                      std::to_string(c_.size()) + " exponents");
  const auto d = maps_.front().cols();
  if (d == 0) throw DomainError("ambient dimension must be positive");
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    if (maps_[i].cols() != d)
      throw DomainError("map " + std::to_string(i) + " has " + std::to_string(maps_[i].cols()) +
                        " columns, expected " + std::to_string(d));
    if (maps_[i].rows() == 0) throw DomainError("map " + std::to_string(i) + " has no rows");
    if (!maps_[i].allFinite()) throw DomainError("map " + std::to_string(i) + " is not finite");
    if (!(c_[i] > 0.0) || !std::isfinite(c_[i]))
      throw DomainError("exponent " + std::to_string(i) + " must be positive");
  }
  ambient_dim_ = static_cast<std::size_t>(d);
}

std::vector<std::size_t> BLDatum::dims() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k(); ++i) out.push_back(dim(i));
  return out;
}

void BLDatum::require_surjective() const {
  for (std::size_t i = 0; i < k(); ++i) {
    RankInfo r = numerical_rank(maps_[i], kRankTol);
    if (r.rank < dim(i)) throw NotSurjectiveError(i, r.rank, dim(i));
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible_heuristic: return "feasible_heuristic";
    case Verdict::infeasible: return "infeasible";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

FeasibilityReport validate_datum(const BLDatum& datum, const FeasibilityOptions& opts) {
  datum.require_surjective();
  FeasibilityReport rep;
  const std::size_t d = datum.ambient_dim();

  if (const auto& ce = datum.c_exact()) {
    Rational s(0);
    for (std::size_t i = 0; i < datum.k(); ++i)
      s += (*ce)[i] * Rational(static_cast<std::int64_t>(datum.dim(i)));
    rep.scaling_exact = true;
    rep.scaling_ok = s == Rational(static_cast<std::int64_t>(d));
    rep.scaling_sum = s.to_double();
  } else {
    for (std::size_t i = 0; i < datum.k(); ++i)
      rep.scaling_sum += datum.c(i) * static_cast<double>(datum.dim(i));
    rep.scaling_ok = std::abs(rep.scaling_sum - static_cast<double>(d)) <= kScalingTol;
  }

  bool ambiguous = false;
  auto test = [&](const std::string& family, const Matrix& basis) {
    SubspaceCheck chk;
    chk.family = family;
    chk.dim = static_cast<std::size_t>(basis.cols());
    ImageDims img = weighted_image_dim(datum, basis);
    chk.weighted_image_dim = img.weighted;
    chk.pass = static_cast<double>(chk.dim) <= img.weighted + kScalingTol;
    ambiguous = ambiguous || img.ambiguous;
    rep.tested_subspaces.push_back(chk);
  };

  const auto de = static_cast<Eigen::Index>(d);
  test("zero", Matrix(de, 0));
  {
    SubspaceCheck full{"full", d, rep.scaling_sum, rep.scaling_ok};
    rep.tested_subspaces.push_back(full);
  }

  std::vector<Matrix> kernels;
  for (std::size_t i = 0; i < datum.k(); ++i) kernels.push_back(null_space(datum.map(i), kRankTol));
  for (const auto& ker : kernels)
    if (ker.cols() > 0) test("kernel", ker);
  for (std::size_t i = 0; i < kernels.size(); ++i)
    for (std::size_t j = i + 1; j < kernels.size(); ++j) {
      Matrix meet = intersect_spans(kernels[i], kernels[j], kRankTol);
      if (meet.cols() > 0) test("kernel-intersection", meet);
      if (kernels[i].cols() > 0 && kernels[j].cols() > 0) {
        Matrix both(de, kernels[i].cols() + kernels[j].cols());
        both << kernels[i], kernels[j];
        Matrix span = column_space(both, kRankTol);
        if (span.cols() > 0 && span.cols() < de) test("kernel-span", span);
      }
    }

  if (d <= 12) {
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << d); ++mask)
      test("coordinate", coordinate_basis(d, mask));
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      test("coordinate", coordinate_basis(d, std::uint64_t{1} << j));
    }
  }

  Rng rng(opts.seed, 0x5ab5);
  for (std::size_t m = 1; m < d; ++m)
    for (std::size_t r = 0; r < opts.n_random; ++r) test("random", haar_frame(d, m, rng));

  bool violated = !rep.scaling_ok;
  for (const auto& chk : rep.tested_subspaces) violated = violated || !chk.pass;
  if (violated)
    rep.verdict = Verdict::infeasible;
  else if (ambiguous)
    rep.verdict = Verdict::undetermined;
  else
    rep.verdict = Verdict::feasible_heuristic;
  return rep;
}

AdjointParams derive_adjoint_exponents(const std::vector<double>& c, const std::vector<double>& theta,
                                       double p) {
  const std::size_t k = c.size();
  if (theta.size() != k)
    throw DomainError("theta has " + std::to_string(theta.size()) + " entries, datum has " +
                      std::to_string(k) + " maps");
  double sum = 0.0;
  std::size_t positive = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(theta[i]) || theta[i] == 0.0)
      throw DomainError("theta " + std::to_string(i) + " must be finite and nonzero");
    sum += theta[i];
    if (theta[i] > 0.0) ++positive;
  }
  if (std::abs(sum - 1.0) > kSumTol) throw DomainError("theta must sum to 1");
  if (std::isnan(p) || !(p > 0.0)) throw DomainError("p must be positive");

  AdjointParams out;
  out.theta = theta;
  out.p = p;
  if (positive == k) {
    out.mode = AdjointMode::forward;
    if (p > 1.0) throw DomainError("forward mode needs 0 < p <= 1");
  } else if (positive == 1) {
    out.mode = AdjointMode::reverse;
    if (p < 1.0) throw DomainError("reverse mode needs p >= 1");
  } else {
    throw DomainError("theta needs all entries positive (forward) or exactly one positive (reverse)");
  }

  const double inv_p_minus_one = std::isinf(p) ? -1.0 : 1.0 / p - 1.0;
  out.p_i.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    double denom = 1.0 + (c[i] / theta[i]) * inv_p_minus_one;
    if (!(denom > 0.0) || !std::isfinite(denom))
      throw DomainError("derived exponent p_" + std::to_string(i) + " is not positive (1/p_" +
                        std::to_string(i) + " = " + std::to_string(denom) + ")");
    out.p_i[i] = 1.0 / denom;
    if (out.mode == AdjointMode::forward && !(out.p_i[i] > 0.0 && out.p_i[i] <= 1.0))
      throw DomainError("derived exponent p_" + std::to_string(i) + " outside (0,1]");
  }
  return out;
}

AdjointParams derive_adjoint_exponents(const std::vector<Rational>& c, const std::vector<Rational>& theta,
                                       const Rational& p) {
  Rational sum(0);
  for (const auto& t : theta) sum += t;
  if (sum != Rational(1)) throw DomainError("theta must sum to 1");
  AdjointParams out = derive_adjoint_exponents(to_doubles(c), to_doubles(theta), p.to_double());
  out.theta_exact = theta;
  out.p_exact = p;
  std::vector<Rational> pi;
  Rational gap = Rational(1) / p - Rational(1);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    pi.push_back(Rational(1) / (Rational(1) + (c[i] / theta[i]) * gap));
    out.p_i[i] = pi.back().to_double();
  }
  out.p_i_exact = std::move(pi);
  return out;
}

AdjointParams derive_adjoint_exponents(const BLDatum& datum, const std::vector<double>& theta,
                                       double p) {
  return derive_adjoint_exponents(datum.c(), theta, p);
}

AdjointParams derive_adjoint_exponents(const BLDatum& datum, const std::vector<Rational>& theta,
                                       const Rational& p) {
  if (const auto& ce = datum.c_exact()) return derive_adjoint_exponents(*ce, theta, p);
  Rational sum(0);
  for (const auto& t : theta) sum += t;
  if (sum != Rational(1)) throw DomainError("theta must sum to 1");
  AdjointParams out = derive_adjoint_exponents(datum.c(), to_doubles(theta), p.to_double());
  out.theta_exact = theta;
  out.p_exact = p;
  return out;
}

double adjoint_exponent_residual(const BLDatum& datum, const AdjointParams& params) {
  double worst = 0.0;
  const double lhs_factor = std::isinf(params.p) ? 1.0 : 1.0 - 1.0 / params.p;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    double r = datum.c(i) * lhs_factor - params.theta[i] * (1.0 - 1.0 / params.p_i[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double adjoint_gaussian_prefactor(const AdjointParams& params, const std::vector<std::size_t>& dims,
                                  std::size_t d) {
  if (dims.size() != params.p_i.size()) throw DomainError("dims and exponents differ in length");
  // x^e with the 0^0 = inf^0 = 1 convention, evaluated in log space.
  auto log_pow = [](double base, double expo) {
    if (expo == 0.0) return 0.0;
    return expo * std::log(base);
  };
  double log_c = 0.0;
  if (!std::isinf(params.p)) log_c += log_pow(params.p, -static_cast<double>(d) / (2.0 * params.p));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    double e = params.theta[i] * static_cast<double>(dims[i]) / (2.0 * params.p_i[i]);
    log_c += log_pow(params.p_i[i], e);
  }
  return std::exp(log_c);
}

namespace data {

BLDatum loomis_whitney(std::size_t d) {
  if (d < 2) throw DomainError("Loomis-Whitney needs d >= 2");
  std::vector<Matrix> maps;
  std::vector<Rational> c;
  for (std::size_t i = 0; i < d; ++i) {
    maps.push_back(projection_dropping(d, i));
    c.emplace_back(1, static_cast<std::int64_t>(d - 1));
  }
  return BLDatum(std::move(maps), std::move(c));
}

BLDatum holder_identity(std::size_t d, std::size_t copies) {
  std::vector<Matrix> maps(copies, Matrix::Identity(static_cast<Eigen::Index>(d),
                                                     static_cast<Eigen::Index>(d)));
  std::vector<Rational> c(copies, Rational(1, static_cast<std::int64_t>(copies)));
  return BLDatum(std::move(maps), std::move(c));
}

BLDatum young() {
  Matrix a(1, 2), b(1, 2), s(1, 2);
  a << 1, 0;
  b << 0, 1;
  s << 1, -1;
  return BLDatum(std::vector<Matrix>{a, b, s}, std::vector<Rational>(3, Rational(2, 3)));
}

BLDatum finner() {
  std::vector<Matrix> maps{coordinate_projection(3, {0, 1}), coordinate_projection(3, {2}),
                           coordinate_projection(3, {0}), coordinate_projection(3, {1, 2})};
  return BLDatum(std::move(maps), std::vector<Rational>(4, Rational(1, 2)));
}

}  // namespace data

BLDatum random_feasible_datum(std::uint64_t seed, std::size_t index) {
  Rng rng = Rng(seed, 0xda7a).fork(index);
  switch (index % 8) {
    case 0: return transformed(data::loomis_whitney(2), rng);
    case 1: return transformed(data::loomis_whitney(3), rng);
    case 2: return transformed(data::finner(), rng);
    case 3: {
      std::size_t k = 3 + rng.below(2);
      std::vector<Matrix> maps;
      for (std::size_t i = 0; i < k; ++i) maps.push_back(gaussian_matrix(1, 2, rng));
      return BLDatum(std::move(maps), spread_exponents(k, 2.0, rng));
    }
    case 4: {
      std::vector<Matrix> maps;
      for (std::size_t i = 0; i < 4; ++i) maps.push_back(gaussian_matrix(1, 3, rng));
      return BLDatum(std::move(maps), spread_exponents(4, 3.0, rng));
    }
    case 5: {
      std::vector<Matrix> maps;
      for (std::size_t i = 0; i < 4; ++i) maps.push_back(gaussian_matrix(2, 4, rng));
      return BLDatum(std::move(maps), std::vector<Rational>(4, Rational(1, 2)));
    }
    case 6: return transformed(data::loomis_whitney(4), rng);
    default: {
      std::size_t d = 2 + rng.below(2);
      std::vector<Matrix> maps{random_invertible(d, rng), random_invertible(d, rng)};
      return BLDatum(std::move(maps), std::vector<Rational>(2, Rational(1, 2)));
    }
  }
}

}  // namespace blq
