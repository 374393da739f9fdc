#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "entropylab/grid_density.hpp"
#include "entropylab/lattice_pmf.hpp"
#include "entropylab/nats.hpp"

namespace entropylab {

/// Finite set of points of Z^n, sorted lexicographically without duplicates.
class LatticeSet {
 public:
  /// Throws std::invalid_argument on duplicates or mixed dimensions.
  LatticeSet(std::size_t dim, std::vector<Point> points);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  bool contains(const Point& x) const;

  friend bool operator==(const LatticeSet&, const LatticeSet&) = default;

 private:
  std::size_t dim_;
  std::vector<Point> points_;
};

/// {x in Z^n_{>=0} : sum x_i <= L}, the simplex at scale 1/L.
LatticeSet simplex_lattice(std::size_t n, std::int64_t L);

enum class SumSign { plus, minus };

/// A + B or A - B.
LatticeSet sumset(const LatticeSet& a, const LatticeSet& b, SumSign sign);

struct SumsetCounts {
  std::uint64_t a = 0;
  std::uint64_t sum = 0;   ///< |A + A|
  std::uint64_t diff = 0;  ///< |A - A|
  bool enumerated = false;
};

/// Cardinalities for A = simplex_lattice(n, L). Enumerates when
/// n |A|^2 <= 1e9, otherwise counts the half-space descriptions
/// A + A = simplex(n, 2L) and A - A = {d : sum d+ <= L, sum d- <= L}.
SumsetCounts simplex_sumset_counts(std::size_t n, std::int64_t L);

/// ln(|A-A|/|A|) / ln(|A+A|/|A|) for A = simplex_lattice(n, L).
double ruzsa_ratio(std::size_t n, std::int64_t L);

/// Integer matrix with one row per linear combination.
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Smallest modulus for which the default embedding is collision-free by
/// construction: 1 + the largest support diameter over the rows of A and the
/// single variables.
std::int64_t default_embedding_modulus(const std::vector<LatticePMF>& pmfs, const IntMatrix& a);

/// U_j^(k) = f_M(U_j1, ..., U_jk) for k iid copies, f_M(x) = sum_i x_i M^(i-1)
/// coordinatewise. Throws if f_M collides on a row combination or overflows.
std::vector<LatticePMF> embed(const std::vector<LatticePMF>& pmfs, const IntMatrix& a, int k,
                              std::optional<std::int64_t> modulus = std::nullopt);

/// h(U + eps Z) - h(Z) - d ln eps - H(U) for the exact mixture density.
/// Requires Z to span at least 64 cells per dimension.
Nats smoothing_gap(const LatticePMF& u, const GridDensity& z, double eps);

/// k-fold iid product on Z^(dk).
LatticePMF tensor_iid(const LatticePMF& p, int k);

}  // namespace entropylab
