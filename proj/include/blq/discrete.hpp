#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blq/bl_data.hpp"
#include "blq/grid.hpp"
#include "blq/rational.hpp"

namespace blq {

// Z_{n_1} x ... x Z_{n_m}. Elements are flat indices in mixed radix with the
// last factor fastest.
class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<std::int64_t> factors);

  const std::vector<std::int64_t>& factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  std::uint32_t order() const { return order_; }

  std::vector<std::int64_t> decode(std::uint32_t x) const;
  std::uint32_t encode(const std::vector<std::int64_t>& coords) const;  // reduces mod n_j
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const;

 private:
  std::vector<std::int64_t> factors_;
  std::uint32_t order_ = 1;
};

// Homomorphism given by an integer matrix acting on coordinates, reduced mod
// the target factors. Construction checks n_j * M[:, j] = 0 mod the targets.
class GroupHom {
 public:
  GroupHom(FiniteAbelianGroup source, FiniteAbelianGroup target,
           std::vector<std::vector<std::int64_t>> matrix);

  const FiniteAbelianGroup& source() const { return source_; }
  const FiniteAbelianGroup& target() const { return target_; }
  const std::vector<std::vector<std::int64_t>>& matrix() const { return matrix_; }
  std::uint32_t apply(std::uint32_t x) const { return table_[x]; }

 private:
  FiniteAbelianGroup source_;
  FiniteAbelianGroup target_;
  std::vector<std::vector<std::int64_t>> matrix_;
  std::vector<std::uint32_t> table_;
};

struct Subgroup {
  std::vector<std::uint32_t> elements;    // sorted
  std::vector<std::uint32_t> generators;  // as discovered by the enumeration
  std::vector<std::uint64_t> mask;        // bit x set iff x is an element
  std::size_t size() const { return elements.size(); }
  bool contains(std::uint32_t x) const { return mask[x >> 6] >> (x & 63) & 1U; }
};

struct DiscreteCaps {
  std::uint32_t max_order = 4096;
  std::size_t max_subgroups = 200000;
  std::size_t max_tuples = 20000000;
};

// All subgroups, ordered by size and then by bitmask.
std::vector<Subgroup> enumerate_subgroups(const FiniteAbelianGroup& g, const DiscreteCaps& caps = {});

// Exponents with optional exact values, as used by the discrete constants.
struct DiscreteExponents {
  std::vector<double> c;
  std::optional<std::vector<Rational>> exact;
  static DiscreteExponents from_doubles(std::vector<double> c);
  static DiscreteExponents from_rationals(std::vector<Rational> c);
};

// An exact ratio N / prod M_i^{c_i} kept as integers so two ratios can be
// compared without rounding when the exponents are rational.
struct CountRatio {
  std::uint64_t numerator = 1;
  std::vector<std::uint64_t> denominators;
  double log_value = 0.0;
};
// True iff both ratios are the same real number (exact when exponents are rational).
bool same_ratio(const CountRatio& a, const CountRatio& b, const DiscreteExponents& c);

struct BlsResult {
  double value = 0.0;
  CountRatio ratio;
  std::vector<std::size_t> argmax;  // index into each target's subgroup list
  std::vector<std::vector<Subgroup>> target_subgroups;
};

BlsResult bls_constant(const FiniteAbelianGroup& g, const std::vector<GroupHom>& maps,
                       const DiscreteExponents& c, const DiscreteCaps& caps = {});

struct AblsResult {
  double value = 0.0;         // (sup ratio)^{(1-p)/p}
  double sup_ratio = 0.0;     // sup_H #H / prod #(B_i H)^{c_i}
  CountRatio ratio;
  Subgroup argmax;
  std::vector<std::size_t> image_sizes;
};

AblsResult abls_constant(const FiniteAbelianGroup& g, const std::vector<GroupHom>& maps,
                         const DiscreteExponents& c, double p, const DiscreteCaps& caps = {});

// (B)_* f (y) = sum over x with Bx = y of f(x).
std::vector<double> discrete_pushforward(const std::vector<double>& f, const GroupHom& b);

// Forward margin bl^{1/p-1} prod ||(B_i)_* f||_{p_i}^{theta_i} - ||f||_p in counting measure.
InequalityMargin discrete_adjoint_margin(const std::vector<double>& f, const std::vector<GroupHom>& maps,
                                         const AdjointParams& params, double bl_value);

// Adjoint exponents for a discrete datum (same relation as the continuous case).
AdjointParams derive_discrete_exponents(const DiscreteExponents& c, const std::vector<Rational>& theta,
                                        const Rational& p);

}  // namespace blq
