#include "blq/gowers.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "blq/error.hpp"
#include "blq/parallel.hpp"

namespace blq {
namespace {

void check_input(const std::vector<double>& f) {
  if (f.empty()) throw DomainError("function on Z_N needs N >= 1");
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("Gowers norms need finite non-negative values");
}

void check_caps(std::size_t n, std::size_t d, const GowersCaps& caps) {
  bool over = false;
  if (d == 3) over = n > caps.max_n_order3;
  else if (d == 4) over = n > caps.max_n_order4;
  else if (d > 4) over = std::pow(static_cast<double>(n), static_cast<double>(d)) > caps.max_work;
  if (over)
    throw CapExceededError("U^" + std::to_string(d) + " on Z_" + std::to_string(n) + " exceeds the configured cap");
}

// sum over (h_2..h_m) of (sum_x g(x))^2 where g is g0 differenced along h_2..h_m.
double stream(const std::vector<double>& g, std::size_t remaining) {
  const std::size_t n = g.size();
  if (remaining == 0) {
    double s = 0.0;
    for (double v : g) s += v;
    return s * s;
  }
  std::vector<double> next(n);
  double total = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t x = 0; x < n; ++x) next[x] = g[(x + h) % n] * g[x];
    total += stream(next, remaining - 1);
  }
  return total;
}

}  // namespace

double gowers_norm(const std::vector<double>& f, std::size_t d, const GowersCaps& caps) {
  check_input(f);
  if (d == 0) throw DomainError("Gowers order must be at least 1");
  const std::size_t n = f.size();
  check_caps(n, d, caps);
  if (d == 1) {
    double s = 0.0;
    for (double v : f) s += v;
    return s;
  }
  std::vector<double> partial(n);
  parallel_for(n, [&](std::size_t h) {
    std::vector<double> g(n);
    for (std::size_t x = 0; x < n; ++x) g[x] = f[(x + h) % n] * f[x];
    partial[h] = stream(g, d - 2);
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return std::pow(total, 1.0 / std::ldexp(1.0, static_cast<int>(d)));
}

double gowers_norm_direct(const std::vector<double>& f, std::size_t d) {
  check_input(f);
  if (d == 0) throw DomainError("Gowers order must be at least 1");
  const std::size_t n = f.size();
  if (std::pow(static_cast<double>(n), static_cast<double>(d + 1)) > 1e8)
    throw CapExceededError("direct Gowers sum is limited to N^{d+1} <= 1e8");
  std::vector<std::size_t> h(d, 0);
  double total = 0.0;
  const std::size_t vertices = std::size_t{1} << d;
  while (true) {
    for (std::size_t x = 0; x < n; ++x) {
      double prod = 1.0;
      for (std::size_t w = 0; w < vertices && prod != 0.0; ++w) {
        std::size_t y = x;
        for (std::size_t j = 0; j < d; ++j)
          if (w >> j & 1U) y += h[j];
        prod *= f[y % n];
      }
      total += prod;
    }
    std::size_t j = 0;
    while (j < d && ++h[j] == n) h[j++] = 0;
    if (j == d) break;
  }
  return std::pow(total, 1.0 / static_cast<double>(vertices));
}

double gowers_u2_fourier(const std::vector<double>& f) {
  check_input(f);
  const std::size_t n = f.size();
  double total = 0.0;
  for (std::size_t xi = 0; xi < n; ++xi) {
    std::complex<double> s = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double angle = -2.0 * std::numbers::pi * static_cast<double>((x * xi) % n) / static_cast<double>(n);
      s += f[x] * std::polar(1.0, angle);
    }
    double m = std::norm(s);
    total += m * m;
  }
  return std::pow(total / static_cast<double>(n), 0.25);
}

double logconvexity_weight(std::size_t d) {
  if (d < 2) throw DomainError("log-convexity needs d >= 2");
  return static_cast<double>(d) / (3.0 * static_cast<double>(d) - 2.0);
}

double gowers_logconvexity_margin(const std::vector<double>& f, std::size_t d, const GowersCaps& caps) {
  double w = logconvexity_weight(d);
  double lo = gowers_norm(f, d - 1, caps);
  double mid = gowers_norm(f, d, caps);
  double hi = gowers_norm(f, d + 1, caps);
  return std::pow(lo, w) * std::pow(hi, 1.0 - w) - mid;
}

std::uint64_t count_parallelograms(const std::vector<bool>& a) {
  const std::size_t n = a.size();
  std::uint64_t count = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (!a[x]) continue;
    for (std::size_t h = 0; h < n; ++h) {
      if (!a[(x + h) % n]) continue;
      for (std::size_t k = 0; k < n; ++k)
        if (a[(x + k) % n] && a[(x + h + k) % n]) ++count;
    }
  }
  return count;
}

std::uint64_t count_parallelepipeds(const std::vector<bool>& a) {
  const std::size_t n = a.size();
  std::vector<std::uint64_t> partial(n, 0);
  parallel_for(n, [&](std::size_t x) {
    if (!a[x]) return;
    std::uint64_t c = 0;
    for (std::size_t h = 0; h < n; ++h) {
      if (!a[(x + h) % n]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (!a[(x + k) % n] || !a[(x + h + k) % n]) continue;
        for (std::size_t l = 0; l < n; ++l)
          if (a[(x + l) % n] && a[(x + h + l) % n] && a[(x + k + l) % n] && a[(x + h + k + l) % n]) ++c;
      }
    }
    partial[x] = c;
  });
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

ParallelepipedCheck parallelepiped_check(const std::vector<bool>& a) {
  ParallelepipedCheck out;
  for (bool b : a) out.set_size += b ? 1 : 0;
  out.parallelograms = count_parallelograms(a);
  out.parallelepipeds = count_parallelepipeds(a);
  using u128 = unsigned __int128;
  u128 size8 = 1, pg4 = 1;
  for (int i = 0; i < 8; ++i) size8 *= out.set_size;
  for (int i = 0; i < 4; ++i) pg4 *= out.parallelograms;
  out.holds = static_cast<u128>(out.parallelepipeds) * size8 >= pg4;
  return out;
}

GowersProfile gowers_profile(const std::vector<double>& f, std::size_t max_order, const GowersCaps& caps) {
  GowersProfile p;
  for (std::size_t d = 1; d <= max_order; ++d) {
    p.orders.push_back(d);
    p.abscissae.push_back(static_cast<double>(d + 1) / std::ldexp(1.0, static_cast<int>(d)));
    p.norms.push_back(gowers_norm(f, d, caps));
  }
  return p;
}

void write_profile_csv(std::ostream& out, const GowersProfile& p) {
  out << "d,abscissa,norm,log_norm\n";
  char buf[128];
  for (std::size_t i = 0; i < p.orders.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", p.orders[i], p.abscissae[i], p.norms[i],
                  std::log(p.norms[i]));
    out << buf;
  }
}

GowersProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "d,abscissa,norm,log_norm") throw SchemaError("unexpected profile header");
  GowersProfile p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[4];
    for (auto& c : cell)
      if (!std::getline(row, c, ',')) throw SchemaError("profile row needs four columns: " + line);
    try {
      p.orders.push_back(std::stoul(cell[0]));
      p.abscissae.push_back(std::stod(cell[1]));
      p.norms.push_back(std::stod(cell[2]));
    } catch (const std::exception&) {
      throw SchemaError("malformed profile row: " + line);
    }
  }
  return p;
}

double real_line_ratio(const std::vector<double>& samples) {
  std::vector<double> padded(samples);
  padded.resize(2 * samples.size() + 1, 0.0);
  double u1 = gowers_norm(padded, 1);
  double u2 = gowers_norm(padded, 2);
  double u3 = gowers_norm(padded, 3, GowersCaps{padded.size(), 64, 1u << 26});
  return u2 / std::sqrt(u1 * u3);
}

std::vector<ScanEntry> real_line_ratio_scan(std::size_t samples) {
  if (samples < 4) throw DomainError("scan needs at least 4 samples");
  auto sample = [&](auto fn) {
    std::vector<double> v(samples);
    for (std::size_t i = 0; i < samples; ++i) v[i] = fn((static_cast<double>(i) + 0.5) / static_cast<double>(samples));
    return v;
  };
  const double pi = std::numbers::pi;
  std::vector<ScanEntry> out;
  out.push_back({"indicator", real_line_ratio(sample([](double) { return 1.0; }))});
  out.push_back({"tent", real_line_ratio(sample([](double t) { return 1.0 - std::abs(2.0 * t - 1.0); }))});
  out.push_back({"gaussian", real_line_ratio(sample([&](double t) { return std::exp(-pi * 64.0 * (t - 0.5) * (t - 0.5)); }))});
  out.push_back({"half-cosine", real_line_ratio(sample([&](double t) { return std::sin(pi * t); }))});
  out.push_back({"exponential", real_line_ratio(sample([](double t) { return std::exp(-6.0 * t); }))});
  out.push_back({"two-bumps", real_line_ratio(sample([](double t) { return (t < 0.3 || t > 0.7) ? 1.0 : 0.0; }))});
  return out;
}

}  // namespace blq
