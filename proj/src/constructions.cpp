#include "entropylab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "entropylab/error.hpp"
#include "point_hash.hpp"

namespace entropylab {

namespace {

using u128 = unsigned __int128;

constexpr double kEnumerationBudget = 1e9;
constexpr std::size_t kBitmapLimit = std::size_t{1} << 27;
constexpr std::size_t kMaxSetSize = std::size_t{1} << 26;
constexpr std::size_t kMaxTensorAtoms = std::size_t{1} << 24;

std::uint64_t narrow(u128 x) {
  if (x > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("sumset count overflows 64 bits");
  return static_cast<std::uint64_t>(x);
}

// Number of x in Z^n_{>=0} with sum x <= s.
u128 simplex_count(std::size_t n, std::int64_t s) {
  std::vector<u128> c(static_cast<std::size_t>(s) + 1, 0);
  c[0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 1; t < c.size(); ++t) c[t] += c[t - 1];
  }
  u128 total = 0;
  for (auto v : c) total += v;
  return total;
}

// Number of d in Z^n with sum of positive parts <= L and of negative parts <= L.
u128 difference_count(std::size_t n, std::int64_t L) {
  const auto w = static_cast<std::size_t>(L) + 1;
  std::vector<u128> c(w * w, 0);
  c[0] = 1;
  std::vector<u128> next(w * w);
  for (std::size_t i = 0; i < n; ++i) {
    // next[a][b] = c[a][b] + sum_{a' < a} c[a'][b] + sum_{b' < b} c[a][b']
    for (std::size_t a = 0; a < w; ++a) {
      u128 row = 0;
      for (std::size_t b = 0; b < w; ++b) {
        next[a * w + b] = c[a * w + b] + row;
        row += c[a * w + b];
      }
    }
    for (std::size_t b = 0; b < w; ++b) {
      u128 col = 0;
      for (std::size_t a = 0; a < w; ++a) {
        next[a * w + b] += col;
        col += c[a * w + b];
      }
    }
    std::swap(c, next);
  }
  u128 total = 0;
  for (auto v : c) total += v;
  return total;
}

void simplex_points(std::size_t n, std::int64_t remaining, Point& prefix, std::vector<Point>& out) {
  if (prefix.size() == n) {
    out.push_back(prefix);
    return;
  }
  for (std::int64_t x = 0; x <= remaining; ++x) {
    prefix.push_back(x);
    simplex_points(n, remaining - x, prefix, out);
    prefix.pop_back();
  }
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::invalid_argument("embed: f_M overflows 64-bit integers");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::invalid_argument("embed: f_M overflows 64-bit integers");
  return r;
}

// f_M applied blockwise to a point of Z^(dk).
PointMap embedding_map(std::size_t d, int k, std::int64_t m) {
  return [d, k, m](PointView x) {
    Point y(d, 0);
    for (std::size_t c = 0; c < d; ++c) {
      std::int64_t acc = 0;
      for (int i = k; i-- > 0;) acc = checked_add(checked_mul(acc, m), x[static_cast<std::size_t>(i) * d + c]);
      y[c] = acc;
    }
    return y;
  };
}

std::int64_t diameter(const LatticePMF& p) {
  const auto [lo, hi] = p.bounds();
  std::int64_t d = 0;
  for (std::size_t c = 0; c < lo.size(); ++c) d = std::max(d, hi[c] - lo[c]);
  return d;
}

std::vector<LatticePMF> row_combinations(const std::vector<LatticePMF>& pmfs, const IntMatrix& a) {
  std::vector<LatticePMF> out;
  for (const auto& row : a) {
    if (row.size() != pmfs.size()) throw std::invalid_argument("embed: matrix width must equal the number of pmfs");
    out.push_back(linear_combination(pmfs, row));
  }
  for (std::size_t j = 0; j < pmfs.size(); ++j) out.push_back(pmfs[j]);
  return out;
}

// True when f separates every atom of t.
bool injective_on(const LatticePMF& t, const PointMap& f) {
  std::vector<Point> images;
  images.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) images.push_back(f(t.point(i)));
  std::sort(images.begin(), images.end());
  return std::adjacent_find(images.begin(), images.end()) == images.end();
}

// Pushforward under an injective map, keeping every atom however small.
LatticePMF relabel(const LatticePMF& t, const PointMap& f, std::size_t d) {
  std::vector<std::int64_t> coords;
  coords.reserve(t.size() * d);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Point y = f(t.point(i));
    coords.insert(coords.end(), y.begin(), y.end());
  }
  return LatticePMF::from_accumulated(d, std::move(coords), std::vector<double>(t.masses().begin(), t.masses().end()),
                                      0.0);
}

}  // namespace

LatticeSet::LatticeSet(std::size_t dim, std::vector<Point> points) : dim_(dim), points_(std::move(points)) {
  if (dim_ == 0) throw std::invalid_argument("LatticeSet: dimension must be positive");
  for (const auto& p : points_) {
    if (p.size() != dim_) throw std::invalid_argument("LatticeSet: inconsistent point dimension");
  }
  std::sort(points_.begin(), points_.end());
  if (std::adjacent_find(points_.begin(), points_.end()) != points_.end()) {
    throw std::invalid_argument("LatticeSet: duplicate points");
  }
}

bool LatticeSet::contains(const Point& x) const { return std::binary_search(points_.begin(), points_.end(), x); }

LatticeSet simplex_lattice(std::size_t n, std::int64_t L) {
  if (n < 1 || L < 1) throw std::invalid_argument("simplex_lattice: need n >= 1 and L >= 1");
  if (simplex_count(n, L) > kMaxSetSize) throw ResourceError("simplex_lattice: too many points");
  std::vector<Point> pts;
  Point prefix;
  simplex_points(n, L, prefix, pts);
  return LatticeSet(n, std::move(pts));
}

LatticeSet sumset(const LatticeSet& a, const LatticeSet& b, SumSign sign) {
  if (a.dim() != b.dim()) throw std::invalid_argument("sumset: dimension mismatch");
  const std::size_t d = a.dim();
  const std::int64_t s = sign == SumSign::plus ? 1 : -1;
  Point lo(d, std::numeric_limits<std::int64_t>::max());
  Point hi(d, std::numeric_limits<std::int64_t>::min());
  Point blo = lo;
  Point bhi = hi;
  for (const auto& p : a.points()) {
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  for (const auto& p : b.points()) {
    for (std::size_t c = 0; c < d; ++c) {
      blo[c] = std::min(blo[c], s * p[c]);
      bhi[c] = std::max(bhi[c], s * p[c]);
    }
  }
  long double volume = 1.0L;
  Point extent(d);
  for (std::size_t c = 0; c < d; ++c) {
    lo[c] += blo[c];
    hi[c] += bhi[c];
    extent[c] = hi[c] - lo[c] + 1;
    volume *= static_cast<long double>(extent[c]);
  }
  std::vector<Point> out;
  if (volume <= static_cast<long double>(kBitmapLimit)) {
    std::vector<std::int64_t> stride(d, 1);
    for (std::size_t c = d; c-- > 1;) stride[c - 1] = stride[c] * extent[c];
    std::vector<unsigned char> hit(static_cast<std::size_t>(volume), 0);
    std::vector<std::int64_t> aoff(a.size(), 0);
    std::vector<std::int64_t> boff(b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) aoff[i] += (a.points()[i][c] - lo[c]) * stride[c];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) boff[i] += s * b.points()[i][c] * stride[c];
    }
    for (auto x : aoff) {
      for (auto y : boff) hit[static_cast<std::size_t>(x + y)] = 1;
    }
    for (std::size_t idx = 0; idx < hit.size(); ++idx) {
      if (!hit[idx]) continue;
      Point p(d);
      auto rem = static_cast<std::int64_t>(idx);
      for (std::size_t c = 0; c < d; ++c) {
        p[c] = lo[c] + rem / stride[c];
        rem %= stride[c];
      }
      out.push_back(std::move(p));
    }
  } else {
    std::unordered_set<Point, detail::PointHash> seen;
    Point p(d);
    for (const auto& x : a.points()) {
      for (const auto& y : b.points()) {
        for (std::size_t c = 0; c < d; ++c) p[c] = x[c] + s * y[c];
        seen.insert(p);
      }
      if (seen.size() > kMaxSetSize) throw ResourceError("sumset: result too large");
    }
    out.assign(seen.begin(), seen.end());
  }
  return LatticeSet(d, std::move(out));
}

SumsetCounts simplex_sumset_counts(std::size_t n, std::int64_t L) {
  if (n < 1 || L < 1) throw std::invalid_argument("simplex_sumset_counts: need n >= 1 and L >= 1");
  SumsetCounts out;
  out.a = narrow(simplex_count(n, L));
  const double work = static_cast<double>(n) * static_cast<double>(out.a) * static_cast<double>(out.a);
  if (work <= kEnumerationBudget) {
    const LatticeSet a = simplex_lattice(n, L);
    out.sum = sumset(a, a, SumSign::plus).size();
    out.diff = sumset(a, a, SumSign::minus).size();
    out.enumerated = true;
  } else {
    out.sum = narrow(simplex_count(n, 2 * L));
    out.diff = narrow(difference_count(n, L));
  }
  return out;
}

double ruzsa_ratio(std::size_t n, std::int64_t L) {
  if (n == 0) throw std::invalid_argument("ruzsa_ratio: degenerate denominator for n = 0");
  const SumsetCounts c = simplex_sumset_counts(n, L);
  const auto a = static_cast<double>(c.a);
  return std::log(static_cast<double>(c.diff) / a) / std::log(static_cast<double>(c.sum) / a);
}

std::int64_t default_embedding_modulus(const std::vector<LatticePMF>& pmfs, const IntMatrix& a) {
  std::int64_t diam = 0;
  for (const auto& w : row_combinations(pmfs, a)) diam = std::max(diam, diameter(w));
  return diam + 1;
}

std::vector<LatticePMF> embed(const std::vector<LatticePMF>& pmfs, const IntMatrix& a, int k,
                              std::optional<std::int64_t> modulus) {
  if (pmfs.empty()) throw std::invalid_argument("embed: no pmfs");
  if (k < 1) throw std::invalid_argument("embed: k must be at least 1");
  const std::size_t d = pmfs.front().dim();
  for (const auto& p : pmfs) {
    if (p.dim() != d) throw std::invalid_argument("embed: dimension mismatch");
  }
  const std::int64_t m = modulus ? *modulus : std::max<std::int64_t>(2, default_embedding_modulus(pmfs, a));
  if (m < 1) throw std::invalid_argument("embed: M must be a positive integer");
  const PointMap f = embedding_map(d, k, m);
  for (const auto& w : row_combinations(pmfs, a)) {
    if (!injective_on(tensor_iid(w, k), f)) {
      throw std::invalid_argument("embed: M = " + std::to_string(m) + " is too small (f_M collides)");
    }
  }
  std::vector<LatticePMF> out;
  for (const auto& p : pmfs) out.push_back(relabel(tensor_iid(p, k), f, d));
  return out;
}

Nats smoothing_gap(const LatticePMF& u, const GridDensity& z, double eps) {
  if (u.dim() != z.dim()) throw std::invalid_argument("smoothing_gap: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing_gap: eps must be positive");
  for (auto e : z.extent()) {
    if (e < 64) throw std::invalid_argument("smoothing_gap: grid too coarse (Z spans fewer than 64 cells)");
  }
  const GridDensity ez = scale(z, eps);
  const int r = ez.resolution();
  if (r < 0) throw std::invalid_argument("smoothing_gap: grid too coarse for integer translates");
  const LatticePMF cells = ez.cell_pmf();
  const std::int64_t unit = std::int64_t{1} << r;
  std::vector<std::int64_t> coords;
  std::vector<double> masses;
  coords.reserve(u.size() * cells.size() * u.dim());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      for (std::size_t c = 0; c < u.dim(); ++c) coords.push_back(cells.point(j)[c] + u.point(i)[c] * unit);
      masses.push_back(u.mass(i) * cells.mass(j));
    }
  }
  const GridDensity mix =
      GridDensity::from_cell_pmf(LatticePMF::from_accumulated(u.dim(), std::move(coords), std::move(masses), 0.0), r);
  const double dlog = static_cast<double>(z.dim()) * std::log(eps);
  return differential_entropy(mix) - differential_entropy(z) - Nats{dlog, 0.0} - shannon_entropy(u);
}

LatticePMF tensor_iid(const LatticePMF& p, int k) {
  if (k < 1) throw std::invalid_argument("tensor_iid: k must be at least 1");
  if (std::pow(static_cast<double>(p.size()), k) > static_cast<double>(kMaxTensorAtoms)) {
    throw ResourceError("tensor_iid: product has too many atoms");
  }
  const std::size_t d = p.dim();
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::int64_t> coords;
  std::vector<double> masses;
  std::vector<std::size_t> digit(kk, 0);
  while (true) {
    double m = 1.0;
    for (std::size_t i = 0; i < kk; ++i) {
      const auto x = p.point(digit[i]);
      coords.insert(coords.end(), x.begin(), x.end());
      m *= p.mass(digit[i]);
    }
    masses.push_back(m);
    std::size_t i = kk;
    while (i-- > 0) {
      if (++digit[i] < p.size()) break;
      digit[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return LatticePMF::from_accumulated(d * kk, std::move(coords), std::move(masses), 0.0);
}

}  // namespace entropylab
