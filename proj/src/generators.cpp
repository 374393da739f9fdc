#include "entropylab/generators.hpp"
#include "entropylab/error.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace entropylab::gen {

namespace {

// P[a <= Z < b] for a standard normal, accurate in both tails.
double normal_interval(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a / std::sqrt(2.0)) - std::erfc(b / std::sqrt(2.0)));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / std::sqrt(2.0)) - std::erfc(-a / std::sqrt(2.0)));
  return 0.5 * (std::erf(b / std::sqrt(2.0)) - std::erf(a / std::sqrt(2.0)));
}

GridDensity from_1d_masses(int k, std::int64_t lo, std::vector<double> masses) {
  double total = 0.0;
  for (double m : masses) total += m;
  if (!(total > 0.0)) throw std::invalid_argument("generator: no mass on the grid");
  for (double& m : masses) m /= total;
  const auto n = static_cast<std::int64_t>(masses.size());
  return GridDensity::from_masses(k, {lo}, {n}, masses);
}

}  // namespace

GridDensity uniform(std::span<const double> lo, std::span<const double> hi, int k) {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("uniform: box dimension mismatch");
  Point lo_cell(lo.size());
  Point extent(lo.size());
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo_cell[i] = grid_units(lo[i], k);
    extent[i] = grid_units(hi[i], k) - lo_cell[i];
    if (extent[i] <= 0) throw std::invalid_argument("uniform: empty box");
    n *= static_cast<std::size_t>(extent[i]);
    if (n > kMaxGridCells) throw ResourceError("uniform: box has too many cells");
  }
  std::vector<double> masses(n, 1.0 / static_cast<double>(n));
  return GridDensity::from_masses(k, std::move(lo_cell), std::move(extent), masses);
}

GridDensity uniform(double lo, double hi, int k) {
  const double l[1] = {lo};
  const double h[1] = {hi};
  return uniform(std::span<const double>(l), std::span<const double>(h), k);
}

GridDensity gaussian(double mean, double sigma, double half_width, int k) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: variance must be positive");
  if (!(half_width > 0.0)) throw std::invalid_argument("gaussian: half width must be positive");
  const std::int64_t lo = -grid_units(half_width, k);
  const std::int64_t hi = -lo;
  if (static_cast<std::size_t>(hi - lo) > kMaxGridCells) {
    throw ResourceError("gaussian: box has too many cells");
  }
  std::vector<double> masses(static_cast<std::size_t>(hi - lo));
  for (std::int64_t c = lo; c < hi; ++c) {
    const double a = (std::ldexp(static_cast<double>(c), -k) - mean) / sigma;
    const double b = (std::ldexp(static_cast<double>(c + 1), -k) - mean) / sigma;
    masses[static_cast<std::size_t>(c - lo)] = normal_interval(a, b);
  }
  return from_1d_masses(k, lo, std::move(masses));
}

GridDensity gaussian(std::span<const double> mean, double sigma, double half_width, int k) {
  std::vector<GridDensity> factors;
  for (double m : mean) factors.push_back(gaussian(m, sigma, half_width, k));
  return product(factors);
}

GridDensity triangular(double lo, double hi, int k) {
  if (!(hi > lo)) throw std::invalid_argument("triangular: need lo < hi");
  const std::int64_t a = grid_units(lo, k);
  const std::int64_t b = grid_units(hi, k);
  const double w = 0.5 * (hi - lo);
  auto cdf = [&](double x) {
    const double u = (x - lo) / w;
    return u <= 1.0 ? 0.5 * u * u : 1.0 - 0.5 * (2.0 - u) * (2.0 - u);
  };
  std::vector<double> masses(static_cast<std::size_t>(b - a));
  for (std::int64_t c = a; c < b; ++c) {
    masses[static_cast<std::size_t>(c - a)] =
        cdf(std::ldexp(static_cast<double>(c + 1), -k)) - cdf(std::ldexp(static_cast<double>(c), -k));
  }
  return from_1d_masses(k, a, std::move(masses));
}

GridDensity power(double p, int k) {
  if (!(p > -1.0)) throw std::invalid_argument("power: exponent must exceed -1");
  if (k < 0 || k > 28) throw std::invalid_argument("power: resolution out of range");
  const std::int64_t n = std::int64_t{1} << k;
  std::vector<double> masses(static_cast<std::size_t>(n));
  for (std::int64_t c = 0; c < n; ++c) {
    const double x0 = std::ldexp(static_cast<double>(c), -k);
    const double x1 = std::ldexp(static_cast<double>(c + 1), -k);
    masses[static_cast<std::size_t>(c)] = std::pow(x1, p + 1.0) - std::pow(x0, p + 1.0);
  }
  return from_1d_masses(k, 0, std::move(masses));
}

GridDensity product(std::span<const GridDensity> factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  const int k = factors.front().resolution();
  Point lo;
  Point extent;
  std::size_t n = 1;
  for (const auto& f : factors) {
    if (f.dim() != 1 || f.resolution() != k) {
      throw std::invalid_argument("product: factors must be one-dimensional at a common resolution");
    }
    lo.push_back(f.lo_cell()[0]);
    extent.push_back(f.extent()[0]);
    n *= f.cell_count();
    if (n > kMaxGridCells) throw ResourceError("product: box has too many cells");
  }
  std::vector<double> masses(n);
  const std::size_t d = factors.size();
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    double m = 1.0;
    for (std::size_t i = 0; i < d; ++i) m *= factors[i].mass(digit[i]);
    masses[flat] = m;
    for (std::size_t i = d; i-- > 0;) {
      if (++digit[i] < factors[i].cell_count()) break;
      digit[i] = 0;
    }
  }
  return GridDensity::from_masses(k, std::move(lo), std::move(extent), masses);
}

}  // namespace entropylab::gen
