#include "entropylab/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "entropylab/error.hpp"
#include "point_hash.hpp"

namespace entropylab {

namespace {

constexpr int kMinResolution = -40;
constexpr int kMaxResolution = 40;

std::size_t checked_volume(const Point& extent) {
  long double v = 1.0L;
  for (auto e : extent) {
    if (e <= 0) throw std::invalid_argument("GridDensity: extents must be positive");
    v *= static_cast<long double>(e);
  }
  if (v > static_cast<long double>(kMaxGridCells)) {
    throw ResourceError("GridDensity: " + std::to_string(static_cast<double>(v)) +
                        " cells exceed the limit of 2^28");
  }
  return static_cast<std::size_t>(v);
}

// Visits every cell in row-major order with its integer index.
template <typename Fn>
void for_each_cell(const GridDensity& f, Fn&& fn) {
  const std::size_t d = f.dim();
  Point cell = f.lo_cell();
  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    fn(static_cast<const Point&>(cell), flat);
    for (std::size_t i = d; i-- > 0;) {
      if (++cell[i] < f.lo_cell()[i] + f.extent()[i]) break;
      cell[i] = f.lo_cell()[i];
    }
  }
}

// P[floor(U_1 + ... + U_m) = t] for iid uniforms, t = 0..m-1 (Eulerian numbers / m!).
std::vector<double> irwin_hall_cells(std::size_t m) {
  std::vector<long double> row{1.0L};
  for (std::size_t n = 2; n <= m; ++n) {
    std::vector<long double> next(n, 0.0L);
    for (std::size_t t = 0; t < n; ++t) {
      const long double keep = t < row.size() ? static_cast<long double>(t + 1) * row[t] : 0.0L;
      const long double step = t >= 1 ? static_cast<long double>(n - t) * row[t - 1] : 0.0L;
      next[t] = keep + step;
    }
    row = std::move(next);
  }
  long double fact = 1.0L;
  for (std::size_t n = 2; n <= m; ++n) fact *= static_cast<long double>(n);
  std::vector<double> out(row.size());
  for (std::size_t t = 0; t < row.size(); ++t) out[t] = static_cast<double>(row[t] / fact);
  return out;
}

// d-fold product of a one-dimensional pmf given as masses on start..start+n-1.
LatticePMF product_kernel(std::int64_t start, const std::vector<double>& masses, std::size_t d) {
  const LatticePMF one = LatticePMF::from_masses(start, masses);
  std::vector<std::int64_t> coords;
  std::vector<double> out;
  coords.reserve(static_cast<std::size_t>(std::pow(one.size(), d)) * d);
  std::vector<std::size_t> digit(d, 0);
  while (true) {
    double m = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      coords.push_back(one.point(digit[i])[0]);
      m *= one.mass(digit[i]);
    }
    out.push_back(m);
    std::size_t i = d;
    while (i-- > 0) {
      if (++digit[i] < one.size()) break;
      digit[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return LatticePMF::from_accumulated(d, std::move(coords), std::move(out), 0.0);
}

// Cell c at resolution r mapped to resolution k <= r.
LatticePMF coarsen(const LatticePMF& cells, int shift) {
  if (shift == 0) return cells;
  std::vector<std::int64_t> coords(cells.coords().begin(), cells.coords().end());
  for (auto& c : coords) c >>= shift;
  return LatticePMF::from_accumulated(cells.dim(), std::move(coords),
                                      std::vector<double>(cells.masses().begin(), cells.masses().end()),
                                      0.0);
}

void require_unit_box(const GridDensity& f, const char* who, bool half_open) {
  const std::int64_t n = std::int64_t{1} << std::max(0, f.resolution());
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const bool ok = f.resolution() >= 0 && f.lo_cell()[i] >= 0 && f.lo_cell()[i] + f.extent()[i] <= n;
    if (!ok) {
      throw std::invalid_argument(std::string(who) + ": density must live on [0,1" +
                                  (half_open ? ")" : "]") + "^d");
    }
  }
}

}  // namespace

// --------------------------------------------------------------- GridDensity

GridDensity::GridDensity(int resolution, Point lo_cell, Point extent, std::vector<double> values)
    : k_(resolution), lo_(std::move(lo_cell)), extent_(std::move(extent)), values_(std::move(values)) {
  if (k_ < kMinResolution || k_ > kMaxResolution) {
    throw std::invalid_argument("GridDensity: resolution out of range");
  }
  if (lo_.empty() || lo_.size() != extent_.size()) {
    throw std::invalid_argument("GridDensity: box dimension mismatch");
  }
  if (values_.size() != checked_volume(extent_)) {
    throw std::invalid_argument("GridDensity: value count does not match the box");
  }
  CompensatedSum total;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("GridDensity: density values must be finite and nonnegative");
    }
    total += v;
  }
  const double integral = total.value() * cell_volume();
  if (!(std::abs(integral - 1.0) <= kDensityTolerance)) {
    throw std::invalid_argument("GridDensity: density integrates to " + std::to_string(integral));
  }
}

GridDensity GridDensity::from_masses(int resolution, Point lo_cell, Point extent,
                                     std::span<const double> masses) {
  const double vol = std::ldexp(1.0, -resolution * static_cast<int>(lo_cell.size()));
  std::vector<double> values(masses.begin(), masses.end());
  for (double& v : values) v /= vol;
  return GridDensity(resolution, std::move(lo_cell), std::move(extent), std::move(values));
}

GridDensity GridDensity::from_cell_pmf(const LatticePMF& cells, int resolution) {
  auto [lo, hi] = cells.bounds();
  Point extent(cells.dim());
  for (std::size_t i = 0; i < cells.dim(); ++i) extent[i] = hi[i] - lo[i] + 1;
  const std::size_t n = checked_volume(extent);
  std::vector<double> masses(n, 0.0);
  std::vector<std::int64_t> strides(cells.dim(), 1);
  for (std::size_t i = cells.dim(); i-- > 1;) strides[i - 1] = strides[i] * extent[i];
  for (std::size_t a = 0; a < cells.size(); ++a) {
    std::int64_t idx = 0;
    const auto c = cells.point(a);
    for (std::size_t i = 0; i < cells.dim(); ++i) idx += (c[i] - lo[i]) * strides[i];
    masses[static_cast<std::size_t>(idx)] = cells.mass(a);
  }
  return from_masses(resolution, std::move(lo), std::move(extent), masses);
}

double GridDensity::cell_volume() const { return std::ldexp(1.0, -k_ * static_cast<int>(dim())); }
double GridDensity::box_lo(std::size_t i) const { return std::ldexp(static_cast<double>(lo_[i]), -k_); }
double GridDensity::box_hi(std::size_t i) const {
  return std::ldexp(static_cast<double>(lo_[i] + extent_[i]), -k_);
}

Point GridDensity::cell_at(std::size_t flat) const {
  Point c(dim());
  for (std::size_t i = dim(); i-- > 0;) {
    const auto e = static_cast<std::size_t>(extent_[i]);
    c[i] = lo_[i] + static_cast<std::int64_t>(flat % e);
    flat /= e;
  }
  return c;
}

std::optional<std::size_t> GridDensity::flat_index(PointView cell) const {
  if (cell.size() != dim()) throw std::invalid_argument("GridDensity: dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::int64_t off = cell[i] - lo_[i];
    if (off < 0 || off >= extent_[i]) return std::nullopt;
    flat = flat * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(off);
  }
  return flat;
}

double GridDensity::value_at(PointView cell) const {
  const auto idx = flat_index(cell);
  return idx ? values_[*idx] : 0.0;
}

LatticePMF GridDensity::cell_pmf() const {
  std::vector<std::int64_t> coords;
  std::vector<double> masses;
  const double vol = cell_volume();
  for_each_cell(*this, [&](const Point& c, std::size_t flat) {
    if (values_[flat] <= 0.0) return;
    coords.insert(coords.end(), c.begin(), c.end());
    masses.push_back(values_[flat] * vol);
  });
  return LatticePMF::from_accumulated(dim(), std::move(coords), std::move(masses), 0.0);
}

GridDensity GridDensity::refined(int resolution) const {
  if (resolution < k_) throw std::invalid_argument("refined: target resolution is coarser");
  if (resolution == k_) return *this;
  const int shift = resolution - k_;
  Point lo(dim());
  Point extent(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = lo_[i] << shift;
    extent[i] = extent_[i] << shift;
  }
  const std::size_t n = checked_volume(extent);
  std::vector<double> values(n);
  Point cell(dim());
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    std::size_t src = 0;
    std::size_t mult = 1;
    for (std::size_t i = dim(); i-- > 0;) {
      const auto e = static_cast<std::size_t>(extent[i]);
      const std::size_t off = rem % e;
      rem /= e;
      src += (off >> shift) * mult;
      mult *= static_cast<std::size_t>(extent_[i]);
    }
    values[flat] = values_[src];
  }
  return GridDensity(resolution, std::move(lo), std::move(extent), std::move(values));
}

// ------------------------------------------------------------------- helpers

std::optional<int> dyadic_exponent(double x, int max_exponent) {
  if (!std::isfinite(x)) return std::nullopt;
  for (int s = 0; s <= max_exponent; ++s) {
    const double scaled = std::ldexp(x, s);
    if (scaled == std::trunc(scaled)) return s;
  }
  return std::nullopt;
}

std::int64_t grid_units(double x, int k) {
  const double scaled = std::ldexp(x, k);
  if (!std::isfinite(scaled) || scaled != std::trunc(scaled) || std::abs(scaled) > 0x1p52) {
    throw std::invalid_argument("value " + std::to_string(x) + " is not on the 2^-" +
                                std::to_string(k) + " grid");
  }
  return static_cast<std::int64_t>(scaled);
}

std::int64_t gcd_of(std::span<const std::int64_t> values) {
  std::int64_t g = 0;
  for (auto v : values) g = std::gcd(g, v < 0 ? -v : v);
  return g;
}

// ---------------------------------------------------------------- operations

Nats differential_entropy(const GridDensity& f) {
  CompensatedSum h;
  const double vol = f.cell_volume();
  std::size_t terms = 0;
  double magnitude = 0.0;
  for (double v : f.values()) {
    if (v <= 0.0) continue;
    const double t = v * vol * -std::log(v);
    h += t;
    magnitude += std::abs(t);
    ++terms;
  }
  return {h.value(), summation_error(terms, magnitude)};
}

LatticePMF quantize(const GridDensity& f, int k) {
  if (k > f.resolution()) {
    throw std::invalid_argument("quantize: k = " + std::to_string(k) + " exceeds the resolution " +
                                std::to_string(f.resolution()));
  }
  const int shift = f.resolution() - k;
  if (shift > 62) throw std::invalid_argument("quantize: k too small");
  Point lo(f.dim());
  Point hi(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) {
    lo[i] = f.lo_cell()[i] >> shift;
    hi[i] = (f.lo_cell()[i] + f.extent()[i] - 1) >> shift;
  }
  detail::MassAccumulator acc(f.dim(), lo, hi);
  Point q(f.dim());
  const double vol = f.cell_volume();
  for_each_cell(f, [&](const Point& c, std::size_t flat) {
    const double v = f.values()[flat];
    if (v <= 0.0) return;
    for (std::size_t i = 0; i < f.dim(); ++i) q[i] = c[i] >> shift;
    acc.add(q, v * vol);
  });
  return std::move(acc).finish(0.0);
}

GridDensity fractional_part(const GridDensity& f, int k) {
  if (k < 0 || k >= f.resolution()) {
    throw std::invalid_argument("fractional_part: need 0 <= k < resolution");
  }
  const int r = f.resolution() - k;
  const std::int64_t m = std::int64_t{1} << r;
  Point lo(f.dim(), 0);
  Point extent(f.dim(), m);
  std::vector<double> masses(checked_volume(extent), 0.0);
  const double vol = f.cell_volume();
  for_each_cell(f, [&](const Point& c, std::size_t flat) {
    const double v = f.values()[flat];
    if (v <= 0.0) return;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < f.dim(); ++i) idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(c[i] & (m - 1));
    masses[idx] += v * vol;
  });
  return GridDensity::from_masses(r, std::move(lo), std::move(extent), masses);
}

GridDensity truncate(const GridDensity& f, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("truncate: N must be positive");
  const auto s = dyadic_exponent(half_width);
  if (!s) throw std::invalid_argument("truncate: N must be a dyadic rational");
  bool inside = true;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    inside = inside && f.box_lo(i) >= -half_width && f.box_hi(i) <= half_width;
  }
  if (inside) return f;
  const GridDensity g = f.refined(std::max(f.resolution(), *s));
  const std::int64_t n = grid_units(half_width, g.resolution());
  Point lo(g.dim());
  Point extent(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) {
    lo[i] = std::max(g.lo_cell()[i], -n);
    const std::int64_t hi = std::min(g.lo_cell()[i] + g.extent()[i], n);
    if (hi <= lo[i]) throw std::invalid_argument("truncate: zero mass in [-N, N]^d");
    extent[i] = hi - lo[i];
  }
  std::vector<double> masses(checked_volume(extent), 0.0);
  CompensatedSum total;
  Point c(g.dim());
  for (std::size_t flat = 0; flat < masses.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t i = g.dim(); i-- > 0;) {
      c[i] = lo[i] + static_cast<std::int64_t>(rem % static_cast<std::size_t>(extent[i]));
      rem /= static_cast<std::size_t>(extent[i]);
    }
    masses[flat] = g.value_at(c) * g.cell_volume();
    total += masses[flat];
  }
  if (!(total.value() > 0.0)) throw std::invalid_argument("truncate: zero mass in [-N, N]^d");
  for (double& m : masses) m /= total.value();
  return GridDensity::from_masses(g.resolution(), std::move(lo), std::move(extent), masses);
}

GridDensity scale(const GridDensity& f, double a) {
  if (a == 0.0) throw std::invalid_argument("scale: factor must be nonzero");
  const auto s = dyadic_exponent(a);
  if (!s) throw std::invalid_argument("scale: factor must be a dyadic rational");
  std::int64_t p = grid_units(a, *s);
  int shift = *s;
  while (p % 2 == 0 && f.resolution() + shift > kMinResolution) {
    p /= 2;
    --shift;
  }
  const std::int64_t ap = p < 0 ? -p : p;
  const std::size_t d = f.dim();
  Point lo(d);
  Point extent(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = p > 0 ? p * f.lo_cell()[i] : p * (f.lo_cell()[i] + f.extent()[i]);
    extent[i] = ap * f.extent()[i];
  }
  const int res = f.resolution() + shift;
  // Cell masses spread over |p|^d cells whose volume changes by 2^(-shift d).
  const double spread =
      std::ldexp(std::pow(static_cast<double>(ap), static_cast<double>(d)), -shift * static_cast<int>(d));
  if (p == 1) {
    std::vector<double> values(f.values().begin(), f.values().end());
    for (double& v : values) v /= spread;
    return GridDensity(res, f.lo_cell(), f.extent(), std::move(values));
  }
  const std::size_t n = checked_volume(extent);
  std::vector<double> values(n);
  Point src(d);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (std::size_t i = d; i-- > 0;) {
      const std::int64_t c = lo[i] + static_cast<std::int64_t>(rem % static_cast<std::size_t>(extent[i]));
      rem /= static_cast<std::size_t>(extent[i]);
      // p > 0: c in [p*x, p*x + p - 1]; p < 0: c in [p*(x+1), p*x - 1].
      std::int64_t q = c / p;
      if (p > 0) {
        if (c % p != 0 && c < 0) --q;
      } else {
        if (c % p != 0 && c < 0) ++q;  // ceil(c / p) for c < 0, p < 0
        q -= 1;
      }
      src[i] = q;
    }
    values[flat] = f.value_at(src) / spread;
  }
  return GridDensity(res, std::move(lo), std::move(extent), std::move(values));
}

GridDensity translate(const GridDensity& f, std::span<const double> shift) {
  if (shift.size() != f.dim()) throw std::invalid_argument("translate: dimension mismatch");
  Point lo = f.lo_cell();
  for (std::size_t i = 0; i < f.dim(); ++i) lo[i] += grid_units(shift[i], f.resolution());
  return GridDensity(f.resolution(), std::move(lo), f.extent(),
                     std::vector<double>(f.values().begin(), f.values().end()));
}

LatticePMF linear_combination_cells(std::span<const GridDensity> fs, std::span<const double> coeffs,
                                    int resolution) {
  if (fs.empty() || fs.size() != coeffs.size()) {
    throw std::invalid_argument("density_linear_combination: need one coefficient per density");
  }
  const std::size_t d = fs.front().dim();
  std::vector<GridDensity> scaled;
  scaled.reserve(fs.size());
  int work = resolution;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (fs[j].dim() != d) throw std::invalid_argument("density_linear_combination: dimension mismatch");
    if (coeffs[j] == 0.0) throw std::invalid_argument("density_linear_combination: zero coefficient");
    if (!dyadic_exponent(coeffs[j])) {
      throw std::invalid_argument("density_linear_combination: coefficient " +
                                  std::to_string(coeffs[j]) + " is not dyadic");
    }
    scaled.push_back(scale(fs[j], coeffs[j]));
    work = std::max(work, scaled.back().resolution());
  }
  std::optional<LatticePMF> sum;
  for (const auto& g : scaled) {
    LatticePMF cells = g.refined(work).cell_pmf();
    sum = sum ? convolve(*sum, cells) : std::move(cells);
  }
  if (scaled.size() > 1) {
    sum = convolve(*sum, product_kernel(0, irwin_hall_cells(scaled.size()), d));
  }
  return coarsen(*sum, work - resolution);
}

GridDensity density_linear_combination(std::span<const GridDensity> fs, std::span<const double> coeffs,
                                       std::optional<int> resolution) {
  if (fs.empty() || fs.size() != coeffs.size()) {
    throw std::invalid_argument("density_linear_combination: need one coefficient per density");
  }
  int out = 0;
  if (resolution) {
    out = *resolution;
  } else {
    out = kMaxResolution;
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const auto s = dyadic_exponent(coeffs[j]);
      out = std::min(out, fs[j].resolution() + (s ? *s : 0));
    }
  }
  return GridDensity::from_cell_pmf(linear_combination_cells(fs, coeffs, out), out);
}

Nats renyi_gap(const GridDensity& f, int k) {
  return renyi_gap(f, k, 0.0) - differential_entropy(f);
}

Nats renyi_gap(const GridDensity& f, int k, double reference_h) {
  const Nats h = shannon_entropy(quantize(f, k));
  const double dk = static_cast<double>(f.dim()) * static_cast<double>(k) * kLn2;
  return {h.value - dk - reference_h, h.err + 4.0 * kEps * std::abs(dk)};
}

Nats quantization_commutation_gap(std::span<const GridDensity> fs,
                                  std::span<const std::int64_t> coeffs, int k) {
  if (fs.empty() || fs.size() != coeffs.size()) {
    throw std::invalid_argument("quantization_commutation_gap: need one coefficient per density");
  }
  if (gcd_of(coeffs) != 1) {
    throw std::invalid_argument("quantization_commutation_gap: coefficients must be relatively prime");
  }
  int work = k;
  std::vector<GridDensity> used;
  std::vector<double> a;
  std::vector<LatticePMF> quantized;
  std::vector<std::int64_t> qa;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    require_unit_box(fs[j], "quantization_commutation_gap", false);
    if (k > fs[j].resolution()) {
      throw std::invalid_argument("quantization_commutation_gap: k exceeds a resolution");
    }
    work = std::max(work, fs[j].resolution());
    if (coeffs[j] == 0) continue;
    used.push_back(fs[j]);
    a.push_back(static_cast<double>(coeffs[j]));
    quantized.push_back(quantize(fs[j], k));
    qa.push_back(coeffs[j]);
  }
  const LatticePMF sum_cells = linear_combination_cells(used, a, work);
  const Nats ha = shannon_entropy(coarsen(sum_cells, work - k));
  const Nats hb = shannon_entropy(linear_combination(quantized, qa));
  return ha - hb;
}

CyclicPMF torus_quantize(const GridDensity& f, int k) {
  require_unit_box(f, "torus_quantize", true);
  if (k < 1) throw std::invalid_argument("torus_quantize: k must be at least 1");
  return reduce_mod(quantize(f, k), k);
}

Nats cyclic_commutation_gap(std::span<const GridDensity> fs, std::span<const std::int64_t> coeffs,
                            int k) {
  if (fs.empty() || fs.size() != coeffs.size()) {
    throw std::invalid_argument("cyclic_commutation_gap: need one coefficient per density");
  }
  if (gcd_of(coeffs) != 1) {
    throw std::invalid_argument("cyclic_commutation_gap: coefficients must be relatively prime");
  }
  int work = k;
  std::vector<GridDensity> used;
  std::vector<double> a;
  std::vector<CyclicPMF> angles;
  std::vector<std::int64_t> ca;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    angles.push_back(torus_quantize(fs[j], k));
    ca.push_back(coeffs[j]);
    work = std::max(work, fs[j].resolution());
    if (coeffs[j] == 0) continue;
    used.push_back(fs[j]);
    a.push_back(static_cast<double>(coeffs[j]));
  }
  const LatticePMF sum_cells = linear_combination_cells(used, a, work);
  const Nats ha = shannon_entropy(reduce_mod(coarsen(sum_cells, work - k), k));
  const Nats hb = shannon_entropy(cyclic_linear_combination(angles, ca));
  return ha - hb;
}

CommutationJoints commutation_joints(std::span<const GridDensity> fs,
                                     std::span<const std::int64_t> coeffs, int k) {
  if (fs.empty() || fs.size() != coeffs.size()) {
    throw std::invalid_argument("commutation_joints: need one coefficient per density");
  }
  const std::size_t d = fs.front().dim();
  int work = k;
  for (const auto& f : fs) {
    if (f.dim() != d) throw std::invalid_argument("commutation_joints: dimension mismatch");
    if (k > f.resolution()) throw std::invalid_argument("commutation_joints: k exceeds a resolution");
    work = std::max(work, f.resolution());
  }
  const int shift = work - k;
  const std::int64_t sub = std::int64_t{1} << shift;

  // (a_j q_j, a_j s_j) on Z^(2d), with cell c = q * 2^shift + s at the working resolution.
  std::optional<LatticePMF> pairs;
  std::vector<double> t_masses{1.0};
  std::int64_t t_start = 0;
  std::size_t terms = 0;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const std::int64_t a = coeffs[j];
    if (a == 0) continue;
    ++terms;
    const LatticePMF cells = fs[j].refined(work).cell_pmf();
    LatticePMF qs = pushforward(
        cells,
        [&](PointView c) {
          Point y(2 * d);
          for (std::size_t i = 0; i < d; ++i) {
            y[i] = a * (c[i] >> shift);
            y[d + i] = a * (c[i] & (sub - 1));
          }
          return y;
        },
        2 * d);
    pairs = pairs ? convolve(*pairs, qs) : std::move(qs);

    // floor(a U) for U uniform on [0,1): uniform on {min(0,a), ..., max(0,a) - 1}.
    const std::int64_t lo = std::min<std::int64_t>(0, a);
    const std::int64_t width = a < 0 ? -a : a;
    std::vector<double> next(t_masses.size() + static_cast<std::size_t>(width) - 1, 0.0);
    for (std::size_t x = 0; x < t_masses.size(); ++x) {
      for (std::int64_t y = 0; y < width; ++y) next[x + static_cast<std::size_t>(y)] += t_masses[x] / static_cast<double>(width);
    }
    t_masses = std::move(next);
    t_start += lo;
  }
  if (!pairs) throw std::invalid_argument("commutation_joints: all coefficients are zero");
  // Remaining fractional parts of the a_j U_j sum to an Irwin-Hall variable.
  const LatticePMF ih = LatticePMF::from_masses(0, irwin_hall_cells(terms));
  const LatticePMF t1 = convolve(LatticePMF::from_masses(t_start, t_masses), ih);
  const auto [tlo, thi] = t1.bounds();
  std::vector<double> dense(static_cast<std::size_t>(thi[0] - tlo[0] + 1), 0.0);
  for (std::size_t i = 0; i < t1.size(); ++i) dense[static_cast<std::size_t>(t1.point(i)[0] - tlo[0])] = t1.mass(i);
  const LatticePMF t_kernel = product_kernel(tlo[0], dense, d);
  const LatticePMF t_embedded = pushforward(
      t_kernel,
      [&](PointView t) {
        Point y(2 * d, 0);
        for (std::size_t i = 0; i < d; ++i) y[d + i] = t[i];
        return y;
      },
      2 * d);
  const LatticePMF bs = convolve(*pairs, t_embedded);

  std::vector<JointPMF::Atom> za;
  std::vector<JointPMF::Atom> zb;
  za.reserve(bs.size());
  zb.reserve(bs.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const auto x = bs.point(i);
    Point b(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
    Point z(d);
    Point a(d);
    for (std::size_t c = 0; c < d; ++c) {
      z[c] = x[d + c] >> shift;
      a[c] = b[c] + z[c];
    }
    za.push_back({z, std::move(a), bs.mass(i)});
    zb.push_back({std::move(z), std::move(b), bs.mass(i)});
  }
  return {JointPMF(d, d, std::move(za)), JointPMF(d, d, std::move(zb))};
}

}  // namespace entropylab
