#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blq/bl_data.hpp"
#include "blq/linalg.hpp"

namespace blq {

// Uniform box grid. Cells are indexed row-major with the last axis fastest;
// samples sit at cell centers.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> n;

  GridSpec() = default;
  GridSpec(std::vector<double> lo_, std::vector<double> hi_, std::vector<std::size_t> n_);
  static GridSpec cube(std::size_t d, double lo, double hi, std::size_t n);

  std::size_t dim() const { return n.size(); }
  std::size_t size() const;
  double width(std::size_t axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  double cell_volume() const;
  double center(std::size_t axis, std::size_t i) const {
    return lo[axis] + (static_cast<double>(i) + 0.5) * width(axis);
  }
  // Center of the cell with flat index `flat`.
  Vector point(std::size_t flat) const;
  // Flat index of the cell containing x, or nullopt outside the box.
  std::optional<std::size_t> locate(const Vector& x) const;

  // Same box, half the cells per axis (every count must be even).
  GridSpec coarsened() const;
  bool operator==(const GridSpec&) const = default;
};

class GridFunction {
 public:
  // Values must be finite and non-negative; entries below 1e-300 are stored as 0.
  GridFunction(GridSpec spec, std::vector<double> values);
  static GridFunction zeros(GridSpec spec);
  static GridFunction sample(GridSpec spec, const std::function<double(const Vector&)>& f);

  const GridSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.dim(); }
  const std::vector<double>& values() const { return values_; }
  double cell_volume() const { return spec_.cell_volume(); }
  double mass() const;
  double max_value() const;

  // Block average over 2^d cells; preserves mass exactly up to rounding.
  GridFunction coarsened() const;
  GridFunction scaled(double factor) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

// Smallest box containing B applied to the source box, padded by `pad`
// (relative to each extent) on both sides.
GridSpec image_grid(const GridSpec& source, const Matrix& b, std::vector<std::size_t> n,
                    double pad = 1e-6);
// Image grid whose cell widths match the largest source cell width.
GridSpec matched_image_grid(const GridSpec& source, const Matrix& b);

// nearest: all mass to the cell containing the image point. linear: mass
// split multilinearly between the neighbouring cell centers (clamped at the
// box edge), which suppresses aliasing between mismatched grids.
enum class DepositKernel { nearest, linear };

// Mass-deposit pushforward: each source cell sends f(x) vol_src to the target
// cell containing Bx. With subsamples = s > 1 the cell is split into s^d equal
// sub-cells, each depositing its share at the image of its own center.
// Throws CoverageError if any mass lands outside.
GridFunction grid_pushforward(const GridFunction& f, const Matrix& b, const GridSpec& target,
                              std::size_t subsamples = 1, DepositKernel kernel = DepositKernel::nearest);

// Sub-cell count per axis giving about `per_cell` deposits per target cell.
std::size_t deposit_subsamples(const GridSpec& source, const GridSpec& target,
                               double per_cell = 64.0);

// (sum f^p vol)^{1/p}; p = +inf gives the max.
double lp_norm(const GridFunction& f, double p);

struct InequalityMargin {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double relative_margin = 0.0;
  double quadrature_estimate = 0.0;
  bool holds() const { return margin >= -quadrature_estimate; }
};

// Margin from (lhs, rhs) with the orientation given by `forward`.
InequalityMargin make_margin(double lhs, double rhs, bool forward);

struct MarginOptions {
  // Pushforward grids per map; derived from the source box when empty.
  std::vector<GridSpec> targets;
  // Estimate quadrature error by repeating on the 2x coarser grids.
  bool estimate = true;
  // Sub-cells per axis for the deposit; 0 picks deposit_subsamples().
  std::size_t subsamples = 0;
};

// Forward: rhs - lhs with lhs = ||f||_p, rhs = bl^{1/p-1} prod ||(B_i)_* f||_{p_i}^{theta_i}.
// Reverse: lhs - rhs.
InequalityMargin adjoint_margin(const GridFunction& f, const BLDatum& datum,
                                const AdjointParams& params, double bl_value, AdjointMode mode,
                                const MarginOptions& opts = {});

// Piecewise-constant function on a blocks^d lattice covering the box; each
// block is zero with probability zero_prob, else uniform in [0, 1).
GridFunction random_piecewise_constant(const GridSpec& spec, std::size_t blocks, Rng& rng,
                                       double zero_prob = 0.2);

// Relative Frobenius distance of a 2-D grid function from its best rank-one
// (product) approximation.
double tensor_distance(const GridFunction& f);

enum class GridFormat { binary, csv };

// One JSON header line, then the payload: little-endian float64 values
// (binary) or one value per line (csv), row-major with the last axis fastest.
void write_grid(std::ostream& out, const GridFunction& f, GridFormat format);
GridFunction read_grid(std::istream& in);
void write_grid_file(const std::string& path, const GridFunction& f, GridFormat format);
GridFunction read_grid_file(const std::string& path);

}  // namespace blq
