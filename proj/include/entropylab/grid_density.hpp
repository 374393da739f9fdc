#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "entropylab/lattice_pmf.hpp"
#include "entropylab/nats.hpp"

namespace entropylab {

inline constexpr double kDensityTolerance = 1e-10;
/// Largest number of cells a single GridDensity may hold.
inline constexpr std::size_t kMaxGridCells = std::size_t{1} << 28;
/// Largest power of two accepted in the denominator of a dyadic coefficient.
inline constexpr int kMaxDyadicExponent = 24;

/// Piecewise-constant probability density on a dyadic grid.
///
/// At resolution k the cell with integer index c covers the half-open box
/// prod_i [c_i 2^-k, (c_i + 1) 2^-k). The density is stored densely over the
/// cell range [lo_cell, lo_cell + extent), row-major with the last coordinate
/// fastest; values are per unit volume.
class GridDensity {
 public:
  GridDensity(int resolution, Point lo_cell, Point extent, std::vector<double> values);

  /// Same layout, but given cell probabilities instead of density values.
  static GridDensity from_masses(int resolution, Point lo_cell, Point extent,
                                 std::span<const double> masses);
  /// Density whose cell probabilities are the masses of a pmf on cell labels.
  static GridDensity from_cell_pmf(const LatticePMF& cells, int resolution);

  std::size_t dim() const noexcept { return lo_.size(); }
  int resolution() const noexcept { return k_; }
  double cell_volume() const;
  const Point& lo_cell() const noexcept { return lo_; }
  const Point& extent() const noexcept { return extent_; }
  double box_lo(std::size_t i) const;
  double box_hi(std::size_t i) const;

  std::size_t cell_count() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  Point cell_at(std::size_t flat) const;
  std::optional<std::size_t> flat_index(PointView cell) const;
  double mass(std::size_t flat) const { return values_[flat] * cell_volume(); }
  /// Density value at a cell index, zero outside the box.
  double value_at(PointView cell) const;

  /// Cell probabilities as a pmf on cell labels.
  LatticePMF cell_pmf() const;
  /// The same density represented at a finer resolution.
  GridDensity refined(int resolution) const;

  friend bool operator==(const GridDensity& a, const GridDensity& b) = default;

 private:
  int k_;
  Point lo_;
  Point extent_;
  std::vector<double> values_;
};

/// Smallest s >= 0 with x * 2^s an integer, if s <= max_exponent.
std::optional<int> dyadic_exponent(double x, int max_exponent = kMaxDyadicExponent);

/// x * 2^k as an integer; throws if x is not on the 2^-k grid.
std::int64_t grid_units(double x, int k);

/// Exact value of sum over cells of v * vol * ln(1/v) for the representative.
Nats differential_entropy(const GridDensity& f);

/// Law of floor(2^k X) on Z^d. Requires k <= f.resolution().
LatticePMF quantize(const GridDensity& f, int k);

/// Density of {2^k X} on [0,1)^d at resolution f.resolution() - k.
GridDensity fractional_part(const GridDensity& f, int k);

/// Conditional density on [-N, N]^d. N must be a positive dyadic rational.
GridDensity truncate(const GridDensity& f, double half_width);

/// Density of a*X for a nonzero dyadic a; exact for the representative.
GridDensity scale(const GridDensity& f, double a);

/// Density of X + shift for a shift on the 2^-resolution grid.
GridDensity translate(const GridDensity& f, std::span<const double> shift);

/// Exact cell probabilities of sum_j a_j X_j at the given resolution, as a pmf
/// on cell labels. Coefficients must be nonzero dyadic rationals.
LatticePMF linear_combination_cells(std::span<const GridDensity> fs, std::span<const double> coeffs,
                                    int resolution);

/// Density of sum_j a_j X_j for independent X_j with exact cell probabilities.
/// The output resolution defaults to the smallest resolution among the scaled
/// inputs.
GridDensity density_linear_combination(std::span<const GridDensity> fs,
                                       std::span<const double> coeffs,
                                       std::optional<int> resolution = std::nullopt);

/// H(quantize(f, k)) - d k ln 2 - h(f).
Nats renyi_gap(const GridDensity& f, int k);
/// Same with a caller-supplied reference differential entropy in place of h(f).
Nats renyi_gap(const GridDensity& f, int k, double reference_h);

/// H(floor(2^k sum a_i X_i)) - H(sum a_i floor(2^k X_i)) for densities on
/// [0,1]^d and relatively prime integer coefficients.
Nats quantization_commutation_gap(std::span<const GridDensity> fs,
                                  std::span<const std::int64_t> coeffs, int k);

/// Law of floor(2^k Theta) mod 2^k for an angle density on [0,1)^n, k >= 1.
CyclicPMF torus_quantize(const GridDensity& f, int k);

/// Torus analog of the commutation gap:
/// H(floor(2^k sum a_i Theta_i) mod 2^k) - H(sum a_i floor(2^k Theta_i) mod 2^k).
Nats cyclic_commutation_gap(std::span<const GridDensity> fs,
                            std::span<const std::int64_t> coeffs, int k);

/// Exact joints of (Z_k, A_k) and (Z_k, B_k), where
/// A_k = floor(2^k sum a_i X_i), B_k = sum a_i floor(2^k X_i), and
/// Z_k = floor(sum a_i {2^k X_i}) = A_k - B_k.
struct CommutationJoints {
  JointPMF z_a;
  JointPMF z_b;
};
CommutationJoints commutation_joints(std::span<const GridDensity> fs,
                                     std::span<const std::int64_t> coeffs, int k);

/// Greatest common divisor of the absolute values of the nonzero entries.
std::int64_t gcd_of(std::span<const std::int64_t> values);

}  // namespace entropylab
