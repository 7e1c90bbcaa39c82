#include "blq/discrete.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "blq/error.hpp"

namespace blq {
namespace {

std::int64_t mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::size_t mask_words(std::uint32_t order) { return (order + 63) / 64; }

Subgroup make_subgroup(std::vector<std::uint32_t> elements, std::vector<std::uint32_t> generators,
                       std::uint32_t order) {
  Subgroup s;
  std::sort(elements.begin(), elements.end());
  s.mask.assign(mask_words(order), 0);
  for (auto x : elements) s.mask[x >> 6] |= std::uint64_t{1} << (x & 63);
  s.elements = std::move(elements);
  s.generators = std::move(generators);
  return s;
}

// <H, g> = union of the cosets H + k g until k g falls back into H.
std::vector<std::uint32_t> adjoin(const FiniteAbelianGroup& g, const Subgroup& h, std::uint32_t gen) {
  std::vector<std::uint32_t> out = h.elements;
  std::uint32_t cur = gen;
  while (!h.contains(cur)) {
    for (auto e : h.elements) out.push_back(g.add(e, cur));
    cur = g.add(cur, gen);
  }
  return out;
}

std::map<std::uint64_t, int> factorize(std::uint64_t n) {
  std::map<std::uint64_t, int> f;
  for (std::uint64_t q = 2; q * q <= n; ++q)
    while (n % q == 0) {
      ++f[q];
      n /= q;
    }
  if (n > 1) ++f[n];
  return f;
}

CountRatio make_ratio(std::uint64_t numerator, std::vector<std::uint64_t> denominators,
                      const DiscreteExponents& c) {
  CountRatio r;
  r.numerator = numerator;
  r.log_value = std::log(static_cast<double>(numerator));
  for (std::size_t i = 0; i < denominators.size(); ++i)
    r.log_value -= c.c[i] * std::log(static_cast<double>(denominators[i]));
  r.denominators = std::move(denominators);
  return r;
}

}  // namespace

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<std::int64_t> factors) : factors_(std::move(factors)) {
  std::uint64_t order = 1;
  for (auto n : factors_) {
    if (n < 1) throw DomainError("cyclic factor orders must be >= 1");
    order *= static_cast<std::uint64_t>(n);
    if (order > (std::uint64_t{1} << 31)) throw CapExceededError("group order exceeds 2^31");
  }
  order_ = static_cast<std::uint32_t>(order);
}

std::vector<std::int64_t> FiniteAbelianGroup::decode(std::uint32_t x) const {
  std::vector<std::int64_t> c(factors_.size());
  for (std::size_t j = factors_.size(); j-- > 0;) {
    c[j] = static_cast<std::int64_t>(x % static_cast<std::uint32_t>(factors_[j]));
    x /= static_cast<std::uint32_t>(factors_[j]);
  }
  return c;
}

std::uint32_t FiniteAbelianGroup::encode(const std::vector<std::int64_t>& coords) const {
  if (coords.size() != factors_.size()) throw DomainError("coordinate count does not match group rank");
  std::uint64_t x = 0;
  for (std::size_t j = 0; j < factors_.size(); ++j)
    x = x * static_cast<std::uint64_t>(factors_[j]) + static_cast<std::uint64_t>(mod(coords[j], factors_[j]));
  return static_cast<std::uint32_t>(x);
}

std::uint32_t FiniteAbelianGroup::add(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t out = 0, place = 1;
  for (std::size_t j = factors_.size(); j-- > 0;) {
    auto n = static_cast<std::uint32_t>(factors_[j]);
    out += ((a % n + b % n) % n) * place;
    a /= n;
    b /= n;
    place *= n;
  }
  return out;
}

std::uint32_t FiniteAbelianGroup::neg(std::uint32_t a) const {
  auto c = decode(a);
  for (auto& v : c) v = -v;
  return encode(c);
}

GroupHom::GroupHom(FiniteAbelianGroup source, FiniteAbelianGroup target,
                   std::vector<std::vector<std::int64_t>> matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.size() != target_.rank())
    throw DomainError("homomorphism matrix needs one row per target factor");
  for (const auto& row : matrix_)
    if (row.size() != source_.rank()) throw DomainError("homomorphism matrix needs one column per source factor");
  for (std::size_t r = 0; r < target_.rank(); ++r)
    for (std::size_t c = 0; c < source_.rank(); ++c)
      if (mod(source_.factors()[c] * matrix_[r][c], target_.factors()[r]) != 0)
        throw DomainError("matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") does not define a homomorphism: " + std::to_string(source_.factors()[c]) +
                          " * " + std::to_string(matrix_[r][c]) + " is not 0 mod " +
                          std::to_string(target_.factors()[r]));
  table_.resize(source_.order());
  for (std::uint32_t x = 0; x < source_.order(); ++x) {
    auto xc = source_.decode(x);
    std::vector<std::int64_t> y(target_.rank(), 0);
    for (std::size_t r = 0; r < target_.rank(); ++r)
      for (std::size_t c = 0; c < source_.rank(); ++c) y[r] = mod(y[r] + matrix_[r][c] * xc[c], target_.factors()[r]);
    table_[x] = target_.encode(y);
  }
}

std::vector<Subgroup> enumerate_subgroups(const FiniteAbelianGroup& g, const DiscreteCaps& caps) {
  if (g.order() > caps.max_order)
    throw CapExceededError("group order " + std::to_string(g.order()) + " exceeds cap " +
                           std::to_string(caps.max_order));
  std::vector<Subgroup> subs;
  std::set<std::vector<std::uint64_t>> seen;
  subs.push_back(make_subgroup({0}, {}, g.order()));
  seen.insert(subs.back().mask);
  for (std::size_t idx = 0; idx < subs.size(); ++idx) {
    std::vector<bool> covered(g.order(), false);
    for (auto e : subs[idx].elements) covered[e] = true;
    for (std::uint32_t gen = 0; gen < g.order(); ++gen) {
      if (covered[gen]) continue;
      const Subgroup& h = subs[idx];
      for (auto e : h.elements) covered[g.add(e, gen)] = true;
      std::vector<std::uint32_t> gens = h.generators;
      gens.push_back(gen);
      Subgroup k = make_subgroup(adjoin(g, h, gen), std::move(gens), g.order());
      if (seen.insert(k.mask).second) {
        subs.push_back(std::move(k));
        if (subs.size() > caps.max_subgroups)
          throw CapExceededError("more than " + std::to_string(caps.max_subgroups) + " subgroups");
      }
    }
  }
  std::sort(subs.begin(), subs.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.elements < b.elements;
  });
  return subs;
}

DiscreteExponents DiscreteExponents::from_doubles(std::vector<double> c) {
  for (double v : c)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("discrete exponents must be positive");
  return {std::move(c), std::nullopt};
}

DiscreteExponents DiscreteExponents::from_rationals(std::vector<Rational> c) {
  std::vector<double> d;
  for (const auto& r : c) {
    if (!(r > Rational(0))) throw DomainError("discrete exponents must be positive");
    d.push_back(r.to_double());
  }
  return {std::move(d), std::move(c)};
}

bool same_ratio(const CountRatio& a, const CountRatio& b, const DiscreteExponents& c) {
  if (!c.exact) return std::abs(a.log_value - b.log_value) <= 1e-12 * std::max(1.0, std::abs(a.log_value));
  // Compare prime-by-prime exponents: v_q(N) - sum c_i v_q(M_i).
  auto exponents = [&](const CountRatio& r) {
    std::map<std::uint64_t, Rational> e;
    for (auto [q, m] : factorize(r.numerator)) e[q] += Rational(m);
    for (std::size_t i = 0; i < r.denominators.size(); ++i)
      for (auto [q, m] : factorize(r.denominators[i])) e[q] -= (*c.exact)[i] * Rational(m);
    std::erase_if(e, [](const auto& kv) { return kv.second.is_zero(); });
    return e;
  };
  return exponents(a) == exponents(b);
}

BlsResult bls_constant(const FiniteAbelianGroup& g, const std::vector<GroupHom>& maps,
                       const DiscreteExponents& c, const DiscreteCaps& caps) {
  if (maps.size() != c.c.size()) throw DomainError("need one exponent per homomorphism");
  if (maps.empty()) throw DomainError("need at least one homomorphism");
  if (g.order() > caps.max_order) throw CapExceededError("group order exceeds cap");
  BlsResult res;
  const std::size_t words = mask_words(g.order());
  std::vector<std::vector<std::vector<std::uint64_t>>> preimages;
  std::size_t tuples = 1;
  for (const auto& b : maps) {
    if (b.source().factors() != g.factors()) throw DomainError("homomorphism source differs from G");
    res.target_subgroups.push_back(enumerate_subgroups(b.target(), caps));
    tuples *= res.target_subgroups.back().size();
    if (tuples > caps.max_tuples) throw CapExceededError("too many subgroup tuples");
    std::vector<std::vector<std::uint64_t>> pre;
    for (const auto& h : res.target_subgroups.back()) {
      std::vector<std::uint64_t> m(words, 0);
      for (std::uint32_t x = 0; x < g.order(); ++x)
        if (h.contains(b.apply(x))) m[x >> 6] |= std::uint64_t{1} << (x & 63);
      pre.push_back(std::move(m));
    }
    preimages.push_back(std::move(pre));
  }

  const std::size_t k = maps.size();
  std::vector<std::size_t> choice(k, 0);
  std::vector<std::vector<std::uint64_t>> running(k + 1, std::vector<std::uint64_t>(words, ~std::uint64_t{0}));
  double best = -std::numeric_limits<double>::infinity();
  auto recurse = [&](auto&& self, std::size_t level) -> void {
    if (level == k) {
      std::uint64_t count = 0;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t word = running[k][w];
        if (w + 1 == words && g.order() % 64 != 0) word &= (std::uint64_t{1} << (g.order() % 64)) - 1;
        count += static_cast<std::uint64_t>(std::popcount(word));
      }
      double v = std::log(static_cast<double>(count));
      for (std::size_t i = 0; i < k; ++i)
        v -= c.c[i] * std::log(static_cast<double>(res.target_subgroups[i][choice[i]].size()));
      if (v > best + 1e-14) {
        best = v;
        res.argmax = choice;
        std::vector<std::uint64_t> dens;
        for (std::size_t i = 0; i < k; ++i) dens.push_back(res.target_subgroups[i][choice[i]].size());
        res.ratio = make_ratio(count, std::move(dens), c);
      }
      return;
    }
    for (std::size_t s = 0; s < preimages[level].size(); ++s) {
      choice[level] = s;
      for (std::size_t w = 0; w < words; ++w) running[level + 1][w] = running[level][w] & preimages[level][s][w];
      self(self, level + 1);
    }
  };
  recurse(recurse, 0);
  res.value = std::exp(res.ratio.log_value);
  return res;
}

AblsResult abls_constant(const FiniteAbelianGroup& g, const std::vector<GroupHom>& maps,
                         const DiscreteExponents& c, double p, const DiscreteCaps& caps) {
  if (maps.size() != c.c.size()) throw DomainError("need one exponent per homomorphism");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("discrete adjoint constant needs 0 < p <= 1");
  std::vector<Subgroup> subs = enumerate_subgroups(g, caps);
  AblsResult res;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& h : subs) {
    std::vector<std::uint64_t> images;
    for (const auto& b : maps) {
      if (b.source().factors() != g.factors()) throw DomainError("homomorphism source differs from G");
      std::vector<bool> hit(b.target().order(), false);
      std::uint64_t n = 0;
      for (auto x : h.elements) {
        auto y = b.apply(x);
        if (!hit[y]) {
          hit[y] = true;
          ++n;
        }
      }
      images.push_back(n);
    }
    CountRatio r = make_ratio(h.size(), images, c);
    if (r.log_value > best + 1e-14) {
      best = r.log_value;
      res.ratio = r;
      res.argmax = h;
      res.image_sizes.assign(images.begin(), images.end());
    }
  }
  res.sup_ratio = std::exp(res.ratio.log_value);
  res.value = std::exp((1.0 - p) / p * res.ratio.log_value);
  return res;
}

std::vector<double> discrete_pushforward(const std::vector<double>& f, const GroupHom& b) {
  if (f.size() != b.source().order()) throw DomainError("function size does not match the group order");
  std::vector<double> out(b.target().order(), 0.0);
  for (std::uint32_t x = 0; x < f.size(); ++x) out[b.apply(x)] += f[x];
  return out;
}

namespace {

double lp_counting(const std::vector<double>& f, double p) {
  if (std::isinf(p)) return *std::max_element(f.begin(), f.end());
  double s = 0.0;
  for (double v : f)
    if (v > 0.0) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

InequalityMargin discrete_adjoint_margin(const std::vector<double>& f, const std::vector<GroupHom>& maps,
                                         const AdjointParams& params, double bl_value) {
  if (maps.size() != params.theta.size()) throw DomainError("need one weight per homomorphism");
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("discrete function must be finite and >= 0");
  double lhs = lp_counting(f, params.p);
  double log_rhs = std::isinf(params.p) ? -std::log(bl_value) : (1.0 / params.p - 1.0) * std::log(bl_value);
  for (std::size_t i = 0; i < maps.size(); ++i)
    log_rhs += params.theta[i] * std::log(lp_counting(discrete_pushforward(f, maps[i]), params.p_i[i]));
  InequalityMargin m = make_margin(lhs, std::exp(log_rhs), params.mode == AdjointMode::forward);
  return m;
}

AdjointParams derive_discrete_exponents(const DiscreteExponents& c, const std::vector<Rational>& theta,
                                        const Rational& p) {
  if (c.exact) return derive_adjoint_exponents(*c.exact, theta, p);
  std::vector<double> th;
  for (const auto& t : theta) th.push_back(t.to_double());
  return derive_adjoint_exponents(c.c, th, p.to_double());
}

}  // namespace blq
