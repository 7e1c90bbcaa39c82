#include "blq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "blq/error.hpp"
#include "blq/parallel.hpp"

namespace blq {
namespace {

using std::numbers::pi;

constexpr double kFlush = 1e-300;

double pow_or_zero(double v, double q) { return v < kFlush ? 0.0 : std::pow(v, q); }

// Multilinear interpolation of cell-center values, zero outside the grid.
double interpolate(const GridFunction& f, const double* x) {
  const GridSpec& g = f.spec();
  const std::size_t d = g.dim();
  std::int64_t base[3];
  double frac[3];
  for (std::size_t a = 0; a < d; ++a) {
    double t = (x[a] - g.lo[a]) / g.width(a) - 0.5;
    double fl = std::floor(t);
    base[a] = static_cast<std::int64_t>(fl);
    frac[a] = t - fl;
  }
  const auto& v = f.values();
  double out = 0.0;
  for (unsigned corner = 0; corner < (1U << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    bool inside = true;
    for (std::size_t a = 0; a < d; ++a) {
      unsigned bit = corner >> (d - 1 - a) & 1U;
      std::int64_t idx = base[a] + bit;
      if (idx < 0 || idx >= static_cast<std::int64_t>(g.n[a])) {
        inside = false;
        break;
      }
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * g.n[a] + static_cast<std::size_t>(idx);
    }
    if (inside && w != 0.0) out += w * v[flat];
  }
  return out;
}

double min_width(const GridSpec& g) {
  double h = g.width(0);
  for (std::size_t a = 1; a < g.dim(); ++a) h = std::min(h, g.width(a));
  return h;
}

double sum_weights(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

void check_line(double lhs, double rhs, const std::string& relation) {
  if (std::abs(lhs - rhs) > 1e-12) {
    std::ostringstream os;
    os.precision(15);
    os << "exponents off the scaling line " << relation << ": left " << lhs << " vs right " << rhs;
    throw DomainError(os.str());
  }
}

InequalityMargin with_estimate(InequalityMargin fine, const InequalityMargin& coarse) {
  double scale = std::max(std::abs(fine.lhs), std::abs(fine.rhs));
  fine.quadrature_estimate = std::max(std::abs(fine.margin - coarse.margin), 1e-10 * scale);
  return fine;
}

bool even_counts(const GridSpec& g) {
  return std::all_of(g.n.begin(), g.n.end(), [](std::size_t m) { return m % 2 == 0 && m >= 2; });
}

Vector fibonacci_point(std::size_t i, std::size_t count) {
  const double golden = pi * (3.0 - std::sqrt(5.0));
  double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
  double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  double phi = golden * static_cast<double>(i);
  Vector v(3);
  v << r * std::cos(phi), r * std::sin(phi), z;
  return v;
}

}  // namespace

DirectionSet::DirectionSet(std::vector<Vector> directions_, std::vector<double> weights_)
    : directions(std::move(directions_)), weights(std::move(weights_)) {
  if (directions.size() != weights.size()) throw DomainError("direction and weight counts differ");
  if (directions.empty()) throw DomainError("direction set is empty");
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != directions[0].size()) throw DomainError("directions have mixed dimensions");
    if (std::abs(directions[i].norm() - 1.0) > 1e-9) throw DomainError("direction " + std::to_string(i) + " is not a unit vector");
    if (!(weights[i] >= 0.0)) throw DomainError("direction weights must be non-negative");
  }
  if (std::abs(sum_weights(weights) - 1.0) > 1e-12) throw DomainError("direction weights must sum to 1");
}

DirectionSet DirectionSet::uniform(std::size_t d, std::size_t count) {
  if (count == 0) throw DomainError("direction set is empty");
  std::vector<Vector> dirs;
  if (d == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      double t = (static_cast<double>(i) + 0.5) * pi / static_cast<double>(count);
      Vector v(2);
      v << std::cos(t), std::sin(t);
      dirs.push_back(v);
    }
  } else if (d == 3) {
    for (std::size_t i = 0; i < count; ++i) dirs.push_back(fibonacci_point(i, count));
  } else {
    throw DomainError("deterministic direction quadrature supports d = 2 and d = 3");
  }
  return DirectionSet(std::move(dirs), std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

DirectionSet DirectionSet::random(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("direction set is empty");
  if (d < 2) throw DomainError("directions need d >= 2");
  Rng rng(seed, 0xd17);
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i < count; ++i) {
    Vector v(static_cast<Eigen::Index>(d));
    do {
      for (Eigen::Index a = 0; a < v.size(); ++a) v(a) = rng.normal();
    } while (v.norm() < 1e-12);
    dirs.push_back(v.normalized());
  }
  return DirectionSet(std::move(dirs), std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

DirectionSet DirectionSet::great_circle(std::size_t count) {
  if (count == 0) throw DomainError("direction set is empty");
  std::vector<Vector> dirs;
  for (std::size_t i = 0; i < count; ++i) {
    double t = (static_cast<double>(i) + 0.5) * 2.0 * pi / static_cast<double>(count);
    Vector v(3);
    v << std::cos(t), std::sin(t), 0.0;
    dirs.push_back(v);
  }
  return DirectionSet(std::move(dirs), std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

PlaneSet PlaneSet::lines(const DirectionSet& dirs) {
  PlaneSet s;
  for (const Vector& w : dirs.directions) s.bases.push_back(Matrix(w));
  s.weights = dirs.weights;
  return s;
}

PlaneSet PlaneSet::hyperplanes(const DirectionSet& normals) {
  PlaneSet s;
  for (const Vector& w : normals.directions) s.bases.push_back(null_space(w.transpose()));
  s.weights = normals.weights;
  return s;
}

PlaneSet PlaneSet::haar(std::size_t d, std::size_t k, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("plane set is empty");
  if (k == 0 || k >= d) throw DomainError("plane dimension must satisfy 1 <= k <= d - 1");
  PlaneSet s;
  Rng rng(seed, 0x91a);
  for (std::size_t i = 0; i < count; ++i) s.bases.push_back(haar_frame(d, k, rng));
  s.weights.assign(count, 1.0 / static_cast<double>(count));
  return s;
}

double TomogramSamples::lq_norm(double q) const {
  if (!(q > 0.0)) throw DomainError("tomogram norm needs q > 0");
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& row : values)
      for (double v : row) m = std::max(m, v);
    return m;
  }
  const double vol = offsets.cell_volume();
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& row = values[j];
    double s = deterministic_sum(row.size(), [&](std::size_t i) { return pow_or_zero(row[i], q); });
    total += weights[j] * s * vol;
  }
  return std::pow(total, 1.0 / q);
}

double TomogramSamples::sup_lr_norm(double r) const {
  if (!(r > 0.0)) throw DomainError("tomogram norm needs r > 0");
  const double vol = offsets.cell_volume();
  double best = 0.0;
  for (const auto& row : values) {
    double v;
    if (std::isinf(r)) {
      v = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    } else {
      double s = deterministic_sum(row.size(), [&](std::size_t i) { return pow_or_zero(row[i], r); });
      v = std::pow(s * vol, 1.0 / r);
    }
    best = std::max(best, v);
  }
  return best;
}

double TomogramSamples::entropy() const {
  const double vol = offsets.cell_volume();
  double total = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& row = values[j];
    double s = deterministic_sum(row.size(), [&](std::size_t i) {
      return row[i] < kFlush ? 0.0 : -row[i] * std::log(row[i]);
    });
    total += weights[j] * s * vol;
  }
  return total;
}

TomogramSamples kplane_transform(const GridFunction& f, const PlaneSet& planes, double step_factor) {
  const GridSpec& g = f.spec();
  const std::size_t d = g.dim();
  if (d < 2 || d > 3) throw DomainError("k-plane transforms are implemented for d = 2 and d = 3");
  if (planes.size() == 0) throw DomainError("plane set is empty");
  if (planes.weights.size() != planes.size()) throw DomainError("plane weights do not match the planes");
  if (!(step_factor > 0.0 && step_factor <= 0.5)) throw DomainError("step factor must lie in (0, 0.5]");
  const std::size_t k = static_cast<std::size_t>(planes.bases[0].cols());
  if (k == 0 || k >= d) throw DomainError("plane dimension must satisfy 1 <= k <= d - 1");
  for (const Matrix& b : planes.bases) {
    if (static_cast<std::size_t>(b.rows()) != d || static_cast<std::size_t>(b.cols()) != k)
      throw DomainError("plane bases must all be d x k");
    if (!(b.transpose() * b).isIdentity(1e-9)) throw DomainError("plane bases must be orthonormal");
  }

  TomogramSamples t;
  t.k = k;
  t.center = Vector(static_cast<Eigen::Index>(d));
  double diag2 = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    t.center(static_cast<Eigen::Index>(a)) = 0.5 * (g.lo[a] + g.hi[a]);
    double ext = g.hi[a] - g.lo[a] + 2.0 * g.width(a);
    diag2 += ext * ext;
  }
  const double radius = 0.5 * std::sqrt(diag2);
  const double h = min_width(g);
  std::size_t n_off = static_cast<std::size_t>(std::ceil(2.0 * radius / h));
  n_off += n_off % 2;
  t.offsets = GridSpec::cube(d - k, -radius, radius, n_off);
  const std::size_t n_s = static_cast<std::size_t>(std::ceil(2.0 * radius / (step_factor * h)));
  const double ds = 2.0 * radius / static_cast<double>(n_s);
  const double plane_cell = std::pow(ds, static_cast<double>(k));

  t.bases = planes.bases;
  t.weights = planes.weights;
  for (const Matrix& b : planes.bases) t.complements.push_back(null_space(b.transpose()));
  t.values.assign(planes.size(), std::vector<double>(t.offsets.size(), 0.0));

  std::vector<double> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    lo[a] = g.lo[a] - g.width(a);
    hi[a] = g.hi[a] + g.width(a);
  }
  const std::size_t per_frame = t.offsets.size();
  parallel_for(planes.size() * per_frame, [&](std::size_t job) {
    const std::size_t j = job / per_frame;
    const std::size_t o = job % per_frame;
    const Matrix& b = t.bases[j];
    Vector base = t.center + t.complements[j] * t.offsets.point(o);
    double x[3];
    double sum = 0.0;
    if (k == 1) {
      // Clip the sample range to the padded box.
      double s_lo = -radius, s_hi = radius;
      for (std::size_t a = 0; a < d; ++a) {
        double u = b(static_cast<Eigen::Index>(a), 0);
        double c = base(static_cast<Eigen::Index>(a));
        if (std::abs(u) < 1e-15) {
          if (c < lo[a] || c > hi[a]) return;
          continue;
        }
        double t0 = (lo[a] - c) / u, t1 = (hi[a] - c) / u;
        s_lo = std::max(s_lo, std::min(t0, t1));
        s_hi = std::min(s_hi, std::max(t0, t1));
      }
      if (s_hi <= s_lo) return;
      auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((s_lo + radius) / ds - 0.5)));
      auto i1 = std::min(n_s, static_cast<std::size_t>(std::ceil((s_hi + radius) / ds + 0.5)));
      for (std::size_t i = i0; i < i1; ++i) {
        double s = -radius + (static_cast<double>(i) + 0.5) * ds;
        for (std::size_t a = 0; a < d; ++a) x[a] = base(static_cast<Eigen::Index>(a)) + s * b(static_cast<Eigen::Index>(a), 0);
        sum += interpolate(f, x);
      }
    } else {
      for (std::size_t i0 = 0; i0 < n_s; ++i0) {
        double s0 = -radius + (static_cast<double>(i0) + 0.5) * ds;
        for (std::size_t i1 = 0; i1 < n_s; ++i1) {
          double s1 = -radius + (static_cast<double>(i1) + 0.5) * ds;
          bool inside = true;
          for (std::size_t a = 0; a < d; ++a) {
            auto ai = static_cast<Eigen::Index>(a);
            x[a] = base(ai) + s0 * b(ai, 0) + s1 * b(ai, 1);
            if (x[a] < lo[a] || x[a] > hi[a]) inside = false;
          }
          if (inside) sum += interpolate(f, x);
        }
      }
    }
    t.values[j][o] = sum * plane_cell;
  });
  return t;
}

TomogramSamples xray_transform(const GridFunction& f, const DirectionSet& dirs, double t_resolution) {
  if (dirs.size() == 0) throw DomainError("direction set is empty");
  if (dirs.dim() != f.dim()) throw DomainError("direction dimension does not match the grid");
  return kplane_transform(f, PlaneSet::lines(dirs), t_resolution);
}

void write_tomogram_csv(std::ostream& out, const TomogramSamples& t) {
  out << "direction_index";
  for (std::size_t a = 0; a < t.offsets.dim(); ++a) out << ",offset_" << a;
  out << ",value\n";
  char buf[64];
  for (std::size_t j = 0; j < t.values.size(); ++j) {
    for (std::size_t o = 0; o < t.offsets.size(); ++o) {
      out << j;
      Vector v = t.offsets.point(o);
      for (Eigen::Index a = 0; a < v.size(); ++a) {
        std::snprintf(buf, sizeof buf, "%.12g", v(a));
        out << ',' << buf;
      }
      std::snprintf(buf, sizeof buf, "%.12g", t.values[j][o]);
      out << ',' << buf << '\n';
    }
  }
}

double kplane_exponent(double p, std::size_t d, std::size_t k) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  if (k >= d) throw DomainError("k must be below d");
  double rhs = (1.0 - 1.0 / p) / static_cast<double>(d - k);
  return 1.0 / (1.0 - static_cast<double>(d) * rhs);
}

InequalityMargin tomography_lower_bound_margin(const GridFunction& f, double p, double q, std::size_t k,
                                               const PlaneSet& planes) {
  const std::size_t d = f.dim();
  if (!(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0)) throw DomainError("p and q must lie in (0, 1]");
  if (k == 0 || k >= d) throw DomainError("k must satisfy 1 <= k <= d - 1");
  check_line((1.0 - 1.0 / q) / static_cast<double>(d), (1.0 - 1.0 / p) / static_cast<double>(d - k),
             "(1/d)(1-1/q) = (1/(d-k))(1-1/p)");
  auto once = [&](const GridFunction& u) {
    return make_margin(lp_norm(u, p), kplane_transform(u, planes).lq_norm(q), true);
  };
  InequalityMargin fine = once(f);
  if (!even_counts(f.spec())) {
    fine.quadrature_estimate = 1e-10 * std::max(fine.lhs, fine.rhs);
    return fine;
  }
  return with_estimate(fine, once(f.coarsened()));
}

bool MonotonicityChain::holds() const {
  return std::all_of(steps.begin(), steps.end(), [](const InequalityMargin& m) { return m.holds(); });
}

MonotonicityChain kplane_monotonicity(const GridFunction& f, double p, std::size_t directions) {
  if (f.dim() != 3) throw DomainError("the monotonicity chain is implemented for d = 3");
  DirectionSet dirs = DirectionSet::uniform(3, directions);
  std::vector<PlaneSet> sets = {PlaneSet::lines(dirs), PlaneSet::hyperplanes(dirs)};
  MonotonicityChain chain;
  for (std::size_t k = 0; k < 3; ++k) chain.exponents.push_back(kplane_exponent(p, 3, k));
  auto norms_of = [&](const GridFunction& u) {
    std::vector<double> out{lp_norm(u, chain.exponents[0])};
    for (std::size_t k = 1; k < 3; ++k) out.push_back(kplane_transform(u, sets[k - 1]).lq_norm(chain.exponents[k]));
    return out;
  };
  chain.norms = norms_of(f);
  std::vector<double> coarse = even_counts(f.spec()) ? norms_of(f.coarsened()) : chain.norms;
  for (std::size_t k = 0; k + 1 < 3; ++k) {
    InequalityMargin fine = make_margin(chain.norms[k], chain.norms[k + 1], true);
    InequalityMargin c = make_margin(coarse[k], coarse[k + 1], true);
    chain.steps.push_back(with_estimate(fine, c));
  }
  return chain;
}

McEstimate restricted_xray_constant(const DirectionSet& mu, double p, double q, std::size_t n_mc,
                                    std::uint64_t seed) {
  if (n_mc == 0) throw DomainError("n_mc must be at least 1");
  const std::size_t d = mu.dim();
  if (d < 2) throw DomainError("directions need d >= 2");
  if (!(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0)) throw DomainError("p and q must lie in (0, 1]");
  check_line((1.0 - 1.0 / q) / static_cast<double>(d), (1.0 - 1.0 / p) / static_cast<double>(d - 1),
             "(1/d)(1-1/q) = (1/(d-1))(1-1/p)");
  const double dd = static_cast<double>(d);
  const double expo = dd * q * (1.0 / p - 1.0) / (dd - 1.0);
  std::vector<double> cdf(mu.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) cdf[i] = acc += mu.weights[i];

  CounterRng gen(seed, 0x3c);
  std::vector<double> draws(n_mc);
  parallel_for(n_mc, [&](std::size_t s) {
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      double u = gen.uniform(s * d + i) * acc;
      std::size_t idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      idx = std::min(idx, mu.size() - 1);
      m.col(static_cast<Eigen::Index>(i)) = mu.directions[idx];
    }
    double det = std::abs(m.determinant());
    draws[s] = expo == 0.0 ? 1.0 : (det == 0.0 ? 0.0 : std::pow(det, expo));
  });
  const double n = static_cast<double>(n_mc);
  double mean = deterministic_sum(n_mc, [&](std::size_t s) { return draws[s]; }) / n;
  double var = deterministic_sum(n_mc, [&](std::size_t s) { return (draws[s] - mean) * (draws[s] - mean); }) /
               std::max(1.0, n - 1.0);
  McEstimate out;
  out.samples = n_mc;
  const double root = 1.0 / (dd * q);
  out.value = std::pow(mean, root);
  double se_mean = std::sqrt(var / n);
  out.std_error = mean > 0.0 ? out.value * root * se_mean / mean : std::pow(se_mean, root);
  return out;
}

double sin_moment(double a) {
  if (!(a > -1.0)) throw DomainError("sin moment needs a > -1");
  return std::exp(std::lgamma((a + 1.0) / 2.0) - std::lgamma(a / 2.0 + 1.0)) / std::sqrt(pi);
}

double wedge_moment(std::size_t d, double a) {
  if (d < 2) throw DomainError("wedge moment needs d >= 2");
  const double dd = static_cast<double>(d);
  double log_sum = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    double m = dd - static_cast<double>(l);
    log_sum += std::lgamma(dd / 2.0) + std::lgamma((m + a) / 2.0) - std::lgamma((dd + a) / 2.0) - std::lgamma(m / 2.0);
  }
  return std::exp(log_sum);
}

double xx_gamma_constant(std::size_t d, double p, double q) {
  if (d < 2) throw DomainError("d must be at least 2");
  if (!(p > 1.0 && std::isfinite(p))) throw DomainError("p must lie in (1, inf)");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
  double outer = (1.0 - 1.0 / p) / (static_cast<double>(d - 1) * q);
  return std::pow(wedge_moment(d, 1.0 - q), outer);
}

GammaOracle xx_gamma_monte_carlo(std::size_t d, double p, double q, std::size_t n_mc, std::uint64_t seed) {
  double exact = xx_gamma_constant(d, p, q);  // validates the domain
  (void)exact;
  if (n_mc < 2) throw DomainError("n_mc must be at least 2");
  const double a = 1.0 - q;
  const double dd = static_cast<double>(d);
  const double sd = 1.0 / std::sqrt(2.0 * pi);
  CounterRng gen(seed, 0x9a);
  std::vector<double> draws(n_mc);
  parallel_for(n_mc, [&](std::size_t s) {
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = sd * gen.normal(s * d * d + static_cast<std::size_t>(i));
    draws[s] = std::pow(std::abs(m.determinant()), a);
  });
  const double n = static_cast<double>(n_mc);
  double mean = deterministic_sum(n_mc, [&](std::size_t s) { return draws[s]; }) / n;
  double var = deterministic_sum(n_mc, [&](std::size_t s) { return (draws[s] - mean) * (draws[s] - mean); }) / (n - 1.0);
  double radial = dd * (std::lgamma((dd + a) / 2.0) - 0.5 * a * std::log(pi) - std::lgamma(dd / 2.0));
  double scale = std::exp(-radial);
  GammaOracle out;
  out.wedge_moment = {mean * scale, std::sqrt(var / n) * scale, n_mc};
  out.constant = std::pow(out.wedge_moment.value, (1.0 - 1.0 / p) / ((dd - 1.0) * q));
  return out;
}

double xx_exponent(std::size_t d, double p, double q) {
  if (d < 2) throw DomainError("d must be at least 2");
  if (!(p > 1.0 && std::isfinite(p))) throw DomainError("p must lie in (1, inf)");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
  double rhs = (1.0 - 1.0 / p) * (1.0 / q - 1.0) / static_cast<double>(d - 1);
  double one_minus_inv_r = rhs / (1.0 / q - 1.0 / p);
  if (!(one_minus_inv_r > 0.0 && one_minus_inv_r < 1.0))
    throw DomainError("no exponent r in (1, inf) for these p, q");
  return 1.0 / (1.0 - one_minus_inv_r);
}

InequalityMargin xx_three_norm_margin(const GridFunction& f, double p, double q, const DirectionSet& dirs) {
  const std::size_t d = f.dim();
  const double r = xx_exponent(d, p, q);
  const double c = xx_gamma_constant(d, p, q);
  auto once = [&](const GridFunction& u) {
    TomogramSamples t = xray_transform(u, dirs);
    double lhs = c * std::pow(t.sup_lr_norm(r), 1.0 / q - 1.0 / p);
    double rhs = std::pow(lp_norm(u, p), 1.0 / q - 1.0) * std::pow(t.lq_norm(q), 1.0 - 1.0 / p);
    return make_margin(lhs, rhs, true);
  };
  InequalityMargin fine = once(f);
  if (!even_counts(f.spec())) {
    fine.quadrature_estimate = 1e-10 * std::max(fine.lhs, fine.rhs);
    return fine;
  }
  return with_estimate(fine, once(f.coarsened()));
}

double union_area(const std::vector<Box2>& boxes) {
  std::vector<double> xs, ys;
  for (const Box2& b : boxes) {
    if (!(b.x1 >= b.x0 && b.y1 >= b.y0)) throw DomainError("boxes need x0 <= x1 and y0 <= y1");
    xs.insert(xs.end(), {b.x0, b.x1});
    ys.insert(ys.end(), {b.y0, b.y1});
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double mx = 0.5 * (xs[i] + xs[i + 1]);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      double my = 0.5 * (ys[j] + ys[j + 1]);
      for (const Box2& b : boxes) {
        if (mx > b.x0 && mx < b.x1 && my > b.y0 && my < b.y1) {
          area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
          break;
        }
      }
    }
  }
  return area;
}

double projection_length(const std::vector<Box2>& boxes, const Vector& u) {
  if (u.size() != 2) throw DomainError("projection direction must be planar");
  std::vector<std::pair<double, double>> iv;
  for (const Box2& b : boxes) {
    if (b.x1 <= b.x0 || b.y1 <= b.y0) continue;
    double c[4] = {u(0) * b.x0 + u(1) * b.y0, u(0) * b.x1 + u(1) * b.y0, u(0) * b.x0 + u(1) * b.y1,
                   u(0) * b.x1 + u(1) * b.y1};
    iv.emplace_back(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
  }
  std::sort(iv.begin(), iv.end());
  double len = 0.0;
  double cur_lo = 0.0, cur_hi = 0.0;
  bool open = false;
  for (auto [a, b] : iv) {
    if (open && a <= cur_hi) {
      cur_hi = std::max(cur_hi, b);
      continue;
    }
    if (open) len += cur_hi - cur_lo;
    cur_lo = a;
    cur_hi = b;
    open = true;
  }
  if (open) len += cur_hi - cur_lo;
  return len;
}

double averaged_loomis_whitney_margin(const std::vector<Box2>& boxes, const DirectionSet& dirs) {
  if (dirs.dim() != 2) throw DomainError("the averaged Loomis-Whitney check is planar");
  double avg = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vector& w = dirs.directions[i];
    Vector u(2);
    u << -w(1), w(0);
    avg += dirs.weights[i] * projection_length(boxes, u);
  }
  return avg - std::sqrt(union_area(boxes));
}

double grid_entropy(const GridFunction& f) {
  const auto& v = f.values();
  double s = deterministic_sum(v.size(), [&](std::size_t i) { return v[i] < kFlush ? 0.0 : -v[i] * std::log(v[i]); });
  return s * f.cell_volume();
}

std::vector<double> kplane_entropy_sequence(const GridFunction& f, std::size_t directions) {
  const std::size_t d = f.dim();
  if (d < 2 || d > 3) throw DomainError("entropy sequences are implemented for d = 2 and d = 3");
  double m = f.mass();
  if (!(m > 0.0)) throw DomainError("entropy needs positive mass");
  GridFunction u = f.scaled(1.0 / m);
  DirectionSet dirs = DirectionSet::uniform(d, directions);
  std::vector<double> out{grid_entropy(u) / static_cast<double>(d)};
  out.push_back(kplane_transform(u, PlaneSet::lines(dirs)).entropy() / static_cast<double>(d - 1));
  if (d == 3) out.push_back(kplane_transform(u, PlaneSet::hyperplanes(dirs)).entropy());
  return out;
}

}  // namespace blq
