#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "entropylab/nats.hpp"

namespace entropylab {

using Point = std::vector<std::int64_t>;
using PointView = std::span<const std::int64_t>;

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kPruneThreshold = 1e-15;

/// Finite-support probability mass function on Z^d.
///
/// Atoms are kept sorted lexicographically by point with strictly positive
/// masses; coordinates live in one flat array with stride `dim()`.
class LatticePMF {
 public:
  /// Merges duplicate points, drops zero masses, and checks that the masses sum
  /// to one within kMassTolerance. Throws std::invalid_argument otherwise.
  LatticePMF(std::size_t dim, std::vector<std::pair<Point, double>> atoms);

  static LatticePMF point_mass(Point p);
  /// Uniform distribution over the given distinct points.
  static LatticePMF uniform(std::size_t dim, const std::vector<Point>& points);
  /// One-dimensional pmf with masses[i] at start + i.
  static LatticePMF from_masses(std::int64_t start, std::span<const double> masses);

  /// Builds from accumulated (possibly noisy) masses: negative and tiny entries
  /// below kPruneThreshold are dropped and the rest renormalized.
  static LatticePMF from_accumulated(std::size_t dim, std::vector<std::int64_t> coords,
                                     std::vector<double> masses,
                                     double prune_below = kPruneThreshold);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return masses_.size(); }
  PointView point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double mass(std::size_t i) const { return masses_[i]; }
  std::span<const double> masses() const noexcept { return masses_; }
  std::span<const std::int64_t> coords() const noexcept { return coords_; }

  /// Mass at `x`, zero when x is not in the support.
  double mass_at(PointView x) const;

  /// Per-coordinate minimum and maximum of the support.
  std::pair<Point, Point> bounds() const;

  friend bool operator==(const LatticePMF& a, const LatticePMF& b) = default;

 private:
  LatticePMF() = default;
  void sort_and_merge();

  std::size_t dim_ = 0;
  std::vector<std::int64_t> coords_;
  std::vector<double> masses_;
};

/// Probability mass function on (Z / 2^k Z)^n as a dense table.
///
/// Residue tuples are indexed row-major, last coordinate fastest.
class CyclicPMF {
 public:
  CyclicPMF(int modulus_log2, std::size_t dim, std::vector<double> table);

  static CyclicPMF point_mass(int modulus_log2, const Point& residues);
  static CyclicPMF uniform(int modulus_log2, std::size_t dim);

  int modulus_log2() const noexcept { return k_; }
  std::int64_t modulus() const noexcept { return std::int64_t{1} << k_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> table() const noexcept { return table_; }
  std::size_t size() const noexcept { return table_.size(); }

  double mass_at(const Point& residues) const;
  std::size_t index_of(PointView residues) const;
  Point residues_of(std::size_t index) const;

  friend bool operator==(const CyclicPMF& a, const CyclicPMF& b) = default;

 private:
  int k_;
  std::size_t dim_;
  std::vector<double> table_;
};

/// Joint distribution of a pair (X, Y) of lattice-valued variables.
class JointPMF {
 public:
  struct Atom {
    Point first;
    Point second;
    double mass;
  };

  JointPMF(std::size_t dim_first, std::size_t dim_second, std::vector<Atom> atoms);

  static JointPMF product(const LatticePMF& p, const LatticePMF& q);

  std::size_t dim_first() const noexcept { return d1_; }
  std::size_t dim_second() const noexcept { return d2_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  LatticePMF first_marginal() const;
  LatticePMF second_marginal() const;
  /// The joint as a pmf on Z^(d1+d2) by concatenating coordinates.
  LatticePMF flattened() const;

 private:
  std::size_t d1_;
  std::size_t d2_;
  std::vector<Atom> atoms_;
};

using PointMap = std::function<Point(PointView)>;

Nats shannon_entropy(const LatticePMF& p);
Nats shannon_entropy(const CyclicPMF& p);
Nats shannon_entropy(std::span<const double> masses);

/// Pushforward under x -> a*x. Throws for a == 0.
LatticePMF dilate(const LatticePMF& p, std::int64_t a);
/// Pushforward under x -> x + shift.
LatticePMF translate(const LatticePMF& p, PointView shift);
/// Pushforward under an arbitrary map into Z^out_dim.
LatticePMF pushforward(const LatticePMF& p, const PointMap& f, std::size_t out_dim);

/// Distribution of X + Y for independent X ~ p, Y ~ q.
LatticePMF convolve(const LatticePMF& p, const LatticePMF& q);

/// Distribution of sum_j coeffs[j] * X_j for independent X_j ~ ps[j].
/// Zero coefficients are skipped; all-zero coefficients throw.
LatticePMF linear_combination(std::span<const LatticePMF> ps,
                              std::span<const std::int64_t> coeffs);

/// Componentwise sum_j coeffs[j] * X_j mod 2^k.
CyclicPMF cyclic_linear_combination(std::span<const CyclicPMF> ps,
                                    std::span<const std::int64_t> coeffs);

/// Reduction of a lattice pmf mod 2^k in every coordinate.
CyclicPMF reduce_mod(const LatticePMF& p, int modulus_log2);

/// Joint law of (X, f(X)) for X ~ p.
JointPMF joint_of(const PointMap& f, const LatticePMF& p, std::size_t out_dim);

/// H(first) + H(second) - H(joint), clamped to zero when within -1e-10.
Nats mutual_information(const JointPMF& j);

}  // namespace entropylab
