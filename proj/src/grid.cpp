#include "blq/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "blq/error.hpp"
#include "blq/parallel.hpp"

namespace blq {
namespace {

constexpr double kFlush = 1e-300;

double pow_or_zero(double v, double p) { return v < kFlush ? 0.0 : std::pow(v, p); }

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

// Splits `amount` between the up to 2^m cell centers around z; near the box
// edge the missing neighbour's share stays in the edge cell.
void deposit_linear(const GridSpec& g, const Vector& z, double amount, std::vector<double>& out) {
  const std::size_t m = g.dim();
  std::vector<std::size_t> base(m);
  std::vector<double> frac(m);
  for (std::size_t a = 0; a < m; ++a) {
    double t = (z(static_cast<Eigen::Index>(a)) - g.lo[a]) / g.width(a) - 0.5;
    double last = static_cast<double>(g.n[a] - 1);
    if (t <= 0.0 || last == 0.0) {
      base[a] = 0;
      frac[a] = 0.0;
    } else if (t >= last) {
      base[a] = g.n[a] - 1;
      frac[a] = 0.0;
    } else {
      double fl = std::floor(t);
      base[a] = static_cast<std::size_t>(fl);
      frac[a] = t - fl;
    }
  }
  for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
    double w = amount;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < m; ++a) {
      bool up = corner >> (m - 1 - a) & 1U;
      if (up && frac[a] == 0.0) {
        w = 0.0;
        break;
      }
      w *= up ? frac[a] : 1.0 - frac[a];
      flat = flat * g.n[a] + base[a] + (up ? 1 : 0);
    }
    if (w != 0.0) out[flat] += w;
  }
}

}  // namespace

GridSpec::GridSpec(std::vector<double> lo_, std::vector<double> hi_, std::vector<std::size_t> n_)
    : lo(std::move(lo_)), hi(std::move(hi_)), n(std::move(n_)) {
  if (lo.size() != hi.size() || lo.size() != n.size() || n.empty())
    throw DomainError("grid bounds and resolution must have the same positive length");
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (n[a] == 0) throw DomainError("grid resolution must be positive on every axis");
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
      throw DomainError("grid box must satisfy lo < hi on every axis");
  }
}

GridSpec GridSpec::cube(std::size_t d, double lo, double hi, std::size_t n) {
  return GridSpec(std::vector<double>(d, lo), std::vector<double>(d, hi), std::vector<std::size_t>(d, n));
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (auto m : n) s *= m;
  return s;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) v *= width(a);
  return v;
}

Vector GridSpec::point(std::size_t flat) const {
  Vector x(static_cast<Eigen::Index>(dim()));
  for (std::size_t a = dim(); a-- > 0;) {
    x(static_cast<Eigen::Index>(a)) = center(a, flat % n[a]);
    flat /= n[a];
  }
  return x;
}

std::optional<std::size_t> GridSpec::locate(const Vector& x) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    double t = (x(static_cast<Eigen::Index>(a)) - lo[a]) / width(a);
    if (!(t >= 0.0) || t >= static_cast<double>(n[a])) return std::nullopt;
    flat = flat * n[a] + static_cast<std::size_t>(t);
  }
  return flat;
}

GridSpec GridSpec::coarsened() const {
  std::vector<std::size_t> half;
  for (auto m : n) {
    if (m % 2 != 0 || m < 2) throw ResolutionError("grid cannot be coarsened: odd resolution");
    half.push_back(m / 2);
  }
  return GridSpec(lo, hi, half);
}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  if (values_.size() != spec_.size())
    throw DomainError("grid function has " + std::to_string(values_.size()) + " values, grid has " +
                      std::to_string(spec_.size()) + " cells");
  for (double& v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("grid function values must be finite and >= 0");
    if (v < kFlush) v = 0.0;
  }
}

GridFunction GridFunction::zeros(GridSpec spec) {
  std::size_t n = spec.size();
  return GridFunction(std::move(spec), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(GridSpec spec, const std::function<double(const Vector&)>& f) {
  std::vector<double> vals(spec.size());
  parallel_for(vals.size(), [&](std::size_t i) { vals[i] = f(spec.point(i)); });
  return GridFunction(std::move(spec), std::move(vals));
}

double GridFunction::mass() const {
  return deterministic_sum(values_.size(), [&](std::size_t i) { return values_[i]; }) * cell_volume();
}

double GridFunction::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

GridFunction GridFunction::coarsened() const {
  GridSpec coarse = spec_.coarsened();
  const std::size_t d = dim();
  std::vector<double> out(coarse.size(), 0.0);
  const double share = 1.0 / static_cast<double>(std::size_t{1} << d);
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    std::size_t rest = flat, cflat = 0, stride = 1;
    for (std::size_t a = d; a-- > 0;) {
      cflat += (rest % spec_.n[a]) / 2 * stride;
      stride *= coarse.n[a];
      rest /= spec_.n[a];
    }
    out[cflat] += values_[flat] * share;
  }
  return GridFunction(std::move(coarse), std::move(out));
}

GridFunction GridFunction::scaled(double factor) const {
  std::vector<double> v = values_;
  for (auto& x : v) x *= factor;
  return GridFunction(spec_, std::move(v));
}

GridSpec image_grid(const GridSpec& source, const Matrix& b, std::vector<std::size_t> n, double pad) {
  if (static_cast<std::size_t>(b.cols()) != source.dim()) throw DomainError("map does not match grid dimension");
  std::vector<double> lo, hi;
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    double l = 0.0, h = 0.0;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      double a = b(r, c) * source.lo[static_cast<std::size_t>(c)];
      double z = b(r, c) * source.hi[static_cast<std::size_t>(c)];
      l += std::min(a, z);
      h += std::max(a, z);
    }
    double ext = std::max(h - l, 1e-12);
    lo.push_back(l - pad * ext);
    hi.push_back(h + pad * ext);
  }
  return GridSpec(lo, hi, std::move(n));
}

GridSpec matched_image_grid(const GridSpec& source, const Matrix& b) {
  double h = 0.0;
  for (std::size_t a = 0; a < source.dim(); ++a) h = std::max(h, source.width(a));
  GridSpec box = image_grid(source, b, std::vector<std::size_t>(static_cast<std::size_t>(b.rows()), 1));
  std::vector<std::size_t> n;
  for (std::size_t a = 0; a < box.dim(); ++a)
    n.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((box.hi[a] - box.lo[a]) / h))));
  // Keep counts even so the coarse grid nests.
  for (auto& m : n) m += m % 2;
  return GridSpec(box.lo, box.hi, std::move(n));
}

GridFunction grid_pushforward(const GridFunction& f, const Matrix& b, const GridSpec& target,
                              std::size_t subsamples, DepositKernel kernel) {
  const GridSpec& src = f.spec();
  if (static_cast<std::size_t>(b.cols()) != src.dim() || static_cast<std::size_t>(b.rows()) != target.dim())
    throw DomainError("pushforward map shape does not match source and target grids");
  if (subsamples == 0) subsamples = 1;
  const std::size_t d = src.dim();
  std::size_t per_cell = 1;
  for (std::size_t a = 0; a < d; ++a) per_cell *= subsamples;
  // Offsets of the sub-cell centers from the cell center, mapped through B.
  std::vector<Vector> offsets;
  for (std::size_t j = 0; j < per_cell; ++j) {
    Vector o(static_cast<Eigen::Index>(d));
    std::size_t rest = j;
    for (std::size_t a = d; a-- > 0;) {
      double frac = (static_cast<double>(rest % subsamples) + 0.5) / static_cast<double>(subsamples) - 0.5;
      o(static_cast<Eigen::Index>(a)) = frac * src.width(a);
      rest /= subsamples;
    }
    offsets.push_back(b * o);
  }
  std::vector<double> out(target.size(), 0.0);
  const double ratio = src.cell_volume() / target.cell_volume() / static_cast<double>(per_cell);
  double escaped = 0.0;
  const auto& vals = f.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == 0.0) continue;
    Vector y = b * src.point(i);
    for (const auto& o : offsets) {
      Vector z = y + o;
      auto cell = target.locate(z);
      if (!cell) {
        escaped += vals[i] / static_cast<double>(per_cell);
      } else if (kernel == DepositKernel::nearest) {
        out[*cell] += vals[i] * ratio;
      } else {
        deposit_linear(target, z, vals[i] * ratio, out);
      }
    }
  }
  if (escaped > 0.0) {
    double total = 0.0;
    for (double v : vals) total += v;
    throw CoverageError(escaped / total);
  }
  return GridFunction(target, std::move(out));
}

std::size_t deposit_subsamples(const GridSpec& source, const GridSpec& target, double per_cell) {
  double ratio = target.cell_volume() / source.cell_volume();
  double need = per_cell / ratio;
  if (need <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::pow(need, 1.0 / static_cast<double>(source.dim())) - 1e-9));
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p > 0.0)) throw DomainError("lp_norm needs p > 0");
  if (std::isinf(p)) return f.max_value();
  const auto& v = f.values();
  double s = deterministic_sum(v.size(), [&](std::size_t i) { return pow_or_zero(v[i], p); });
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

InequalityMargin make_margin(double lhs, double rhs, bool forward) {
  InequalityMargin m;
  m.lhs = lhs;
  m.rhs = rhs;
  m.margin = forward ? rhs - lhs : lhs - rhs;
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  m.relative_margin = scale > 0.0 ? m.margin / scale : 0.0;
  return m;
}

namespace {

InequalityMargin margin_once(const GridFunction& f, const BLDatum& datum, const AdjointParams& params,
                             double bl_value, AdjointMode mode, const std::vector<GridSpec>& targets,
                             std::size_t subsamples) {
  double lhs = lp_norm(f, params.p);
  double log_rhs = std::isinf(params.p) ? -std::log(bl_value) : (1.0 / params.p - 1.0) * std::log(bl_value);
  for (std::size_t i = 0; i < datum.k(); ++i) {
    std::size_t s = subsamples ? subsamples : deposit_subsamples(f.spec(), targets[i]);
    GridFunction fi = grid_pushforward(f, datum.map(i), targets[i], s);
    log_rhs += params.theta[i] * std::log(lp_norm(fi, params.p_i[i]));
  }
  return make_margin(lhs, std::exp(log_rhs), mode == AdjointMode::forward);
}

std::vector<GridSpec> default_targets(const GridSpec& src, const BLDatum& datum) {
  std::vector<GridSpec> t;
  for (std::size_t i = 0; i < datum.k(); ++i) t.push_back(matched_image_grid(src, datum.map(i)));
  return t;
}

}  // namespace

InequalityMargin adjoint_margin(const GridFunction& f, const BLDatum& datum, const AdjointParams& params,
                                double bl_value, AdjointMode mode, const MarginOptions& opts) {
  if (mode != params.mode) throw DomainError("margin mode does not match the sign pattern of theta");
  if (f.dim() != datum.ambient_dim()) throw DomainError("grid dimension does not match datum");
  if (!(bl_value > 0.0)) throw DomainError("BL value must be positive");
  std::vector<GridSpec> targets = opts.targets.empty() ? default_targets(f.spec(), datum) : opts.targets;
  if (targets.size() != datum.k()) throw DomainError("need one target grid per map");
  InequalityMargin m = margin_once(f, datum, params, bl_value, mode, targets, opts.subsamples);
  const double floor = 1e-10 * std::max(std::abs(m.lhs), std::abs(m.rhs));
  m.quadrature_estimate = floor;
  if (opts.estimate) {
    GridFunction coarse = f.coarsened();
    std::vector<GridSpec> coarse_targets;
    if (opts.targets.empty()) {
      coarse_targets = default_targets(coarse.spec(), datum);
    } else {
      for (const auto& t : targets) coarse_targets.push_back(t.coarsened());
    }
    InequalityMargin mc = margin_once(coarse, datum, params, bl_value, mode, coarse_targets, opts.subsamples);
    m.quadrature_estimate = std::max(floor, std::abs(m.margin - mc.margin));
  }
  return m;
}

GridFunction random_piecewise_constant(const GridSpec& spec, std::size_t blocks, Rng& rng,
                                       double zero_prob) {
  const std::size_t d = spec.dim();
  std::size_t nb = 1;
  for (std::size_t a = 0; a < d; ++a) nb *= blocks;
  std::vector<double> level(nb);
  for (auto& v : level) v = rng.bernoulli(zero_prob) ? 0.0 : rng.uniform();
  std::vector<double> vals(spec.size());
  for (std::size_t flat = 0; flat < vals.size(); ++flat) {
    std::size_t rest = flat, bflat = 0, stride = 1;
    for (std::size_t a = d; a-- > 0;) {
      std::size_t i = rest % spec.n[a];
      bflat += i * blocks / spec.n[a] * stride;
      stride *= blocks;
      rest /= spec.n[a];
    }
    vals[flat] = level[bflat];
  }
  return GridFunction(spec, std::move(vals));
}

double tensor_distance(const GridFunction& f) {
  if (f.dim() != 2) throw DomainError("tensor distance is defined for 2-D grids");
  const auto rows = static_cast<Eigen::Index>(f.spec().n[0]);
  const auto cols = static_cast<Eigen::Index>(f.spec().n[1]);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f.values()[static_cast<std::size_t>(r * cols + c)];
  double total = m.squaredNorm();
  if (total == 0.0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  // Summing the tail avoids cancellation in total - top^2.
  const Vector& sv = svd.singularValues();
  return std::sqrt(sv.tail(sv.size() - 1).squaredNorm() / sv.squaredNorm());
}

void write_grid(std::ostream& out, const GridFunction& f, GridFormat format) {
  const GridSpec& s = f.spec();
  nlohmann::json header = {{"format", format == GridFormat::binary ? "binary" : "csv"},
                           {"dim", s.dim()},
                           {"lo", s.lo},
                           {"hi", s.hi},
                           {"n", s.n},
                           {"order", "row-major-last-axis-fastest"},
                           {"byte_order", "little"}};
  out << header.dump() << '\n';
  if (format == GridFormat::binary) {
    for (double v : f.values()) {
      std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  } else {
    char buf[32];
    for (double v : f.values()) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      out << buf;
    }
  }
  if (!out) throw Error("failed to write grid function");
}

GridFunction read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("grid file has no header line");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("grid header is not valid JSON: ") + e.what());
  }
  for (const char* key : {"format", "lo", "hi", "n"})
    if (!h.contains(key)) throw SchemaError(std::string("grid header lacks '") + key + "'");
  GridSpec spec(h["lo"].get<std::vector<double>>(), h["hi"].get<std::vector<double>>(),
                h["n"].get<std::vector<std::size_t>>());
  std::vector<double> vals(spec.size());
  const std::string format = h["format"].get<std::string>();
  if (format == "binary") {
    for (auto& v : vals) {
      std::uint64_t bits;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw SchemaError("grid payload is truncated");
      v = std::bit_cast<double>(to_little(bits));
    }
  } else if (format == "csv") {
    for (auto& v : vals) {
      if (!std::getline(in, line)) throw SchemaError("grid payload is truncated");
      try {
        v = std::stod(line);
      } catch (const std::exception&) {
        throw SchemaError("grid payload has a non-numeric line: " + line);
      }
    }
  } else {
    throw SchemaError("unknown grid format '" + format + "'");
  }
  return GridFunction(std::move(spec), std::move(vals));
}

void write_grid_file(const std::string& path, const GridFunction& f, GridFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_grid(out, f, format);
}

GridFunction read_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_grid(in);
}

}  // namespace blq
