#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace blq {

// Largest N accepted per order d (counting measure on Z_N).
struct GowersCaps {
  std::size_t max_n_order3 = 256;
  std::size_t max_n_order4 = 64;
  // Work bound N^d for orders above 4.
  double max_work = 1u << 26;
};

// ||f||_{U^d} on Z_N with counting measure, f >= 0. Streams over
// (h_1..h_{d-1}) using sum_{h_d} sum_x D g(x) = (sum_x D g(x))^2.
double gowers_norm(const std::vector<double>& f, std::size_t d, const GowersCaps& caps = {});
// Literal sum over G^{d+1}; small N only.
double gowers_norm_direct(const std::vector<double>& f, std::size_t d);
// (N^{-1} sum |hat f|^4)^{1/4}.
double gowers_u2_fourier(const std::vector<double>& f);

// d / (3d - 2): the weight with (d+1)/2^d = w d/2^{d-1} + (1-w)(d+2)/2^{d+1}.
double logconvexity_weight(std::size_t d);
// ||f||_{U^{d-1}}^w ||f||_{U^{d+1}}^{1-w} - ||f||_{U^d}.
double gowers_logconvexity_margin(const std::vector<double>& f, std::size_t d, const GowersCaps& caps = {});

// Exhaustive counts of (x, h, k) and (x, h, k, l) with every vertex in A.
std::uint64_t count_parallelograms(const std::vector<bool>& a);
std::uint64_t count_parallelepipeds(const std::vector<bool>& a);

struct ParallelepipedCheck {
  std::uint64_t set_size = 0;
  std::uint64_t parallelograms = 0;
  std::uint64_t parallelepipeds = 0;
  // parallelepipeds * |A|^8 >= parallelograms^4 in exact integer arithmetic.
  bool holds = false;
};
ParallelepipedCheck parallelepiped_check(const std::vector<bool>& a);

struct GowersProfile {
  std::vector<std::size_t> orders;
  std::vector<double> abscissae;  // (d + 1) / 2^d
  std::vector<double> norms;
};
GowersProfile gowers_profile(const std::vector<double>& f, std::size_t max_order, const GowersCaps& caps = {});
// Columns d, abscissa, norm, log_norm with %.12g values.
void write_profile_csv(std::ostream& out, const GowersProfile& p);
GowersProfile read_profile_csv(std::istream& in);

struct ScanEntry {
  std::string name;
  double ratio = 0.0;  // ||f||_{U^2} / (||f||_{U^1} ||f||_{U^3})^{1/2}
};
// Ratio for samples of functions on the line, computed on a zero-padded
// cyclic group (padding at least doubles the support so no wrap-around
// occurs). The family is reported, not asserted.
std::vector<ScanEntry> real_line_ratio_scan(std::size_t samples);
double real_line_ratio(const std::vector<double>& samples);

}  // namespace blq
