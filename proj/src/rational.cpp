#include "blq/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "blq/error.hpp"

namespace blq {
namespace {

using i128 = __int128;

Rational from_wide(i128 num, i128 den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || num < -lim || den > lim) throw DomainError("rational arithmetic overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::try_parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = parse_int(trim(text.substr(0, slash)));
    auto d = parse_int(trim(text.substr(slash + 1)));
    if (!n || !d || *d == 0) return std::nullopt;
    return Rational(*n, *d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 17) return std::nullopt;
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.remove_prefix(1);
    std::int64_t w = 0;
    if (!whole.empty()) {
      auto parsed = parse_int(whole);
      if (!parsed || *parsed < 0) return std::nullopt;
      w = *parsed;
    }
    std::int64_t f = 0;
    std::int64_t scale = 1;
    if (!frac.empty()) {
      auto parsed = parse_int(frac);
      if (!parsed || *parsed < 0) return std::nullopt;
      f = *parsed;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    }
    if (whole.empty() && frac.empty()) return std::nullopt;
    try {
      Rational r = Rational(w) + Rational(f, scale);
      return negative ? -r : r;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  auto n = parse_int(text);
  if (!n) return std::nullopt;
  return Rational(*n);
}

Rational Rational::parse(std::string_view text) {
  auto r = try_parse(text);
  if (!r) throw DomainError("cannot parse rational '" + std::string(text) + "'");
  return *r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return from_wide(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return from_wide(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
  return from_wide(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw DomainError("rational division by zero");
  return from_wide(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 lhs = i128(a.num_) * b.den_;
  i128 rhs = i128(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace blq
