#include "blq/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blq/error.hpp"
#include "blq/parallel.hpp"

namespace blq {
namespace {

constexpr double kFlush = 1e-300;

std::vector<GridFunction> pushforwards(const GridFunction& f, const BLDatum& datum) {
  datum.require_surjective();
  if (f.dim() != datum.ambient_dim()) throw DomainError("grid dimension does not match datum");
  std::vector<GridFunction> out;
  for (std::size_t i = 0; i < datum.k(); ++i) {
    // Targets at half the source width keep the smoothing of the linear deposit small.
    GridSpec matched = matched_image_grid(f.spec(), datum.map(i));
    std::vector<std::size_t> n = matched.n;
    for (auto& m : n) m *= 2;
    GridSpec target(matched.lo, matched.hi, n);
    out.push_back(grid_pushforward(f, datum.map(i), target, deposit_subsamples(f.spec(), target, 1024.0),
                                   DepositKernel::linear));
  }
  return out;
}

double shannon_margin(const GridFunction& f, const BLDatum& datum, double bl_value) {
  GridFunction u = f.scaled(1.0 / f.mass());
  auto fi = pushforwards(u, datum);
  double v = std::log(bl_value) - shannon_entropy(DiscreteDensity::from_grid(u));
  for (std::size_t i = 0; i < datum.k(); ++i) v += datum.c(i) * shannon_entropy(DiscreteDensity::from_grid(fi[i]));
  return v;
}

std::vector<double> exponents_for(const BLDatum& datum, const std::vector<double>& theta, double p) {
  return derive_adjoint_exponents(datum, theta, p).p_i;
}

}  // namespace

DiscreteDensity::DiscreteDensity(std::vector<double> weights_)
    : DiscreteDensity(weights_, std::vector<double>(weights_.size(), 1.0)) {}

DiscreteDensity::DiscreteDensity(std::vector<double> weights_, std::vector<double> measure_)
    : weights(std::move(weights_)), measure(std::move(measure_)) {
  if (weights.size() != measure.size()) throw DomainError("density and measure sizes differ");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw DomainError("density weights must be finite and >= 0");
    if (!(measure[i] > 0.0) || !std::isfinite(measure[i])) throw DomainError("reference measure must be positive");
  }
}

DiscreteDensity DiscreteDensity::from_grid(const GridFunction& f) {
  return DiscreteDensity(f.values(), std::vector<double>(f.values().size(), f.cell_volume()));
}

double DiscreteDensity::mass() const {
  return deterministic_sum(weights.size(), [&](std::size_t i) { return weights[i] * measure[i]; });
}

DiscreteDensity DiscreteDensity::normalized() const {
  double m = mass();
  if (!(m > 0.0)) throw DomainError("density has zero mass");
  DiscreteDensity out = *this;
  for (double& w : out.weights) w /= m;
  return out;
}

DiscreteDensity DiscreteDensity::escort(double p) const {
  if (!(p > 0.0)) throw DomainError("escort exponent must be positive");
  DiscreteDensity out = *this;
  for (double& w : out.weights) w = w < kFlush ? 0.0 : std::pow(w, p);
  return out.normalized();
}

double shannon_entropy(const DiscreteDensity& f) {
  DiscreteDensity g = f.normalized();
  return deterministic_sum(g.weights.size(), [&](std::size_t i) {
    double w = g.weights[i];
    return w < kFlush ? 0.0 : -w * std::log(w) * g.measure[i];
  });
}

double renyi_entropy(const DiscreteDensity& f, double p) {
  if (!(p > 0.0)) throw DomainError("Renyi order must be positive");
  if (p == 1.0) return shannon_entropy(f);
  DiscreteDensity g = f.normalized();
  double s = deterministic_sum(g.weights.size(), [&](std::size_t i) {
    double w = g.weights[i];
    return w < kFlush ? 0.0 : std::pow(w, p) * g.measure[i];
  });
  return std::log(s) / (1.0 - p);
}

double renyi_entropy(const GridFunction& f, double p) { return renyi_entropy(DiscreteDensity::from_grid(f), p); }

double escort_log_variance(const DiscreteDensity& f, double p) {
  DiscreteDensity g = f.escort(p);
  const std::size_t n = g.weights.size();
  auto term = [&](std::size_t i, int power) {
    double w = g.weights[i];
    if (w < kFlush) return 0.0;
    double l = std::log(w);
    return w * g.measure[i] * (power == 1 ? l : l * l);
  };
  double m1 = deterministic_sum(n, [&](std::size_t i) { return term(i, 1); });
  double m2 = deterministic_sum(n, [&](std::size_t i) { return term(i, 2); });
  return m2 - m1 * m1;
}

EntropicMargin entropic_bl_margin(const GridFunction& f, const BLDatum& datum, double bl_value) {
  if (!(bl_value > 0.0) || !std::isfinite(bl_value)) throw DomainError("BL constant must be positive and finite");
  if (!(f.mass() > 0.0)) throw DomainError("density has zero mass");
  EntropicMargin out;
  out.value = shannon_margin(f, datum, bl_value);
  bool even = std::all_of(f.spec().n.begin(), f.spec().n.end(), [](std::size_t m) { return m % 2 == 0; });
  if (even) out.quadrature_estimate = std::abs(out.value - shannon_margin(f.coarsened(), datum, bl_value));
  out.quadrature_estimate = std::max(out.quadrature_estimate, 1e-10);
  return out;
}

double renyi_bl_margin(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                       double bl_value) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("Renyi margin needs p in (0, 1)");
  auto p_i = exponents_for(datum, theta, p);
  GridFunction u = f.scaled(1.0 / f.mass());
  auto fi = pushforwards(u, datum);
  double v = std::log(bl_value) - renyi_entropy(u, p);
  for (std::size_t i = 0; i < datum.k(); ++i) v += datum.c(i) * renyi_entropy(fi[i], p_i[i]);
  return v;
}

double RenyiConvergence::slope_spread() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    double scale = std::max({std::abs(slopes[i]), std::abs(slopes[i - 1]), 1e-12});
    worst = std::max(worst, std::abs(slopes[i] - slopes[i - 1]) / scale);
  }
  return worst;
}

RenyiConvergence renyi_convergence(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta,
                                   double bl_value, const std::vector<double>& eps) {
  RenyiConvergence out;
  out.shannon_margin = shannon_margin(f, datum, bl_value);
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw DomainError("eps must lie in (0, 1)");
    double m = renyi_bl_margin(f, datum, theta, 1.0 - e, bl_value);
    out.eps.push_back(e);
    out.margins.push_back(m);
    out.slopes.push_back((m - out.shannon_margin) / e);
  }
  return out;
}

double p_entropy_probe(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                       double bl_value) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("probe needs p in (0, 1]");
  auto p_i = exponents_for(datum, theta, p);
  auto fi = pushforwards(f, datum);
  double v = shannon_entropy(DiscreteDensity::from_grid(f).escort(p)) - std::log(bl_value);
  for (std::size_t i = 0; i < datum.k(); ++i)
    v -= datum.c(i) * shannon_entropy(DiscreteDensity::from_grid(fi[i]).escort(p_i[i]));
  return v;
}

double log_adjoint_ratio(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta, double p,
                         double bl_value) {
  auto p_i = exponents_for(datum, theta, p);
  auto fi = pushforwards(f, datum);
  double v = std::log(lp_norm(f, p)) - (1.0 / p - 1.0) * std::log(bl_value);
  for (std::size_t i = 0; i < datum.k(); ++i) v -= theta[i] * std::log(lp_norm(fi[i], p_i[i]));
  return v;
}

double log_adjoint_ratio_derivative(const GridFunction& f, const BLDatum& datum, const std::vector<double>& theta,
                                    double p, double bl_value) {
  auto p_i = exponents_for(datum, theta, p);
  auto fi = pushforwards(f, datum);
  double v = std::log(bl_value) - shannon_entropy(DiscreteDensity::from_grid(f).escort(p));
  for (std::size_t i = 0; i < datum.k(); ++i)
    v += datum.c(i) * shannon_entropy(DiscreteDensity::from_grid(fi[i]).escort(p_i[i]));
  return v;
}

long double ridders_second_derivative(const std::function<long double(long double)>& fn, long double x,
                                      long double h0, long double* error_out) {
  constexpr int kTable = 12;
  constexpr long double kShrink = 1.4L;
  constexpr long double kShrink2 = kShrink * kShrink;
  if (!(h0 > 0.0L)) throw DomainError("initial step must be positive");
  const long double fx = fn(x);
  auto central = [&](long double h) { return (fn(x + h) - 2.0L * fx + fn(x - h)) / (h * h); };
  long double a[kTable][kTable];
  long double h = h0;
  a[0][0] = central(h);
  long double best = a[0][0];
  long double err = std::numeric_limits<long double>::max();
  for (int i = 1; i < kTable; ++i) {
    h /= kShrink;
    a[0][i] = central(h);
    long double fac = kShrink2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0L);
      fac *= kShrink2;
      long double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0L * err) break;
  }
  if (error_out) *error_out = err;
  return best;
}

long double escort_curvature_profile(long double q) { return q * q / ((1.0L + q) * (1.0L + q)); }

long double escort_curvature_exact(long double q) {
  long double s = 1.0L + q;
  return (2.0L - 4.0L * q) / (s * s * s * s);
}

double tensor_escort_margin(const DiscreteDensity& g, double q, double delta) {
  if (!(q > 0.0 && delta > 0.0 && delta < q)) throw DomainError("need 0 < delta < q");
  auto p_of = [](double t) { return t / (1.0 + t); };
  double h = shannon_entropy(g.escort(p_of(q)));
  double h1 = shannon_entropy(g.escort(p_of(q - delta)));
  double h2 = shannon_entropy(g.escort(p_of(q + delta)));
  return 0.5 * (h1 + h2) - h;
}

}  // namespace blq
