#include "entropylab/lattice_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "convolution.hpp"
#include "point_hash.hpp"

namespace entropylab {

namespace {

bool lex_less(PointView a, PointView b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_total(double total, const char* what) {
  if (!(std::abs(total - 1.0) <= kMassTolerance)) {
    throw std::invalid_argument(std::string(what) + ": masses sum to " + std::to_string(total) +
                                ", expected 1");
  }
}

std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

}  // namespace

// ---------------------------------------------------------------- LatticePMF

LatticePMF::LatticePMF(std::size_t dim, std::vector<std::pair<Point, double>> atoms) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("LatticePMF: dimension must be positive");
  coords_.reserve(atoms.size() * dim);
  masses_.reserve(atoms.size());
  for (auto& [pt, m] : atoms) {
    if (pt.size() != dim) throw std::invalid_argument("LatticePMF: inconsistent point dimension");
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("LatticePMF: masses must be finite and nonnegative");
    }
    if (m == 0.0) continue;
    coords_.insert(coords_.end(), pt.begin(), pt.end());
    masses_.push_back(m);
  }
  sort_and_merge();
  CompensatedSum total;
  for (double m : masses_) total += m;
  check_total(total.value(), "LatticePMF");
}

LatticePMF LatticePMF::point_mass(Point p) {
  const std::size_t d = p.size();
  return LatticePMF(d, {{std::move(p), 1.0}});
}

LatticePMF LatticePMF::uniform(std::size_t dim, const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("LatticePMF::uniform: empty support");
  std::vector<std::pair<Point, double>> atoms;
  const double m = 1.0 / static_cast<double>(points.size());
  for (const auto& p : points) atoms.emplace_back(p, m);
  LatticePMF out(dim, std::move(atoms));
  if (out.size() != points.size()) {
    throw std::invalid_argument("LatticePMF::uniform: duplicate support points");
  }
  return out;
}

LatticePMF LatticePMF::from_masses(std::int64_t start, std::span<const double> masses) {
  std::vector<std::pair<Point, double>> atoms;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    atoms.push_back({{start + static_cast<std::int64_t>(i)}, masses[i]});
  }
  return LatticePMF(1, std::move(atoms));
}

LatticePMF LatticePMF::from_accumulated(std::size_t dim, std::vector<std::int64_t> coords,
                                        std::vector<double> masses, double prune_below) {
  LatticePMF out;
  out.dim_ = dim;
  std::size_t w = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0) || masses[i] < prune_below) continue;
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(i * dim), dim,
                coords.begin() + static_cast<std::ptrdiff_t>(w * dim));
    masses[w++] = masses[i];
  }
  coords.resize(w * dim);
  masses.resize(w);
  if (masses.empty()) throw std::invalid_argument("LatticePMF: all mass was pruned");
  out.coords_ = std::move(coords);
  out.masses_ = std::move(masses);
  out.sort_and_merge();
  CompensatedSum total;
  for (double m : out.masses_) total += m;
  const double t = total.value();
  for (double& m : out.masses_) m /= t;
  return out;
}

void LatticePMF::sort_and_merge() {
  const std::size_t n = masses_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i) sorted = lex_less(point(i - 1), point(i));
  if (sorted) return;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(point(a), point(b)); });
  std::vector<std::int64_t> coords;
  std::vector<double> masses;
  coords.reserve(coords_.size());
  masses.reserve(n);
  for (std::size_t idx : order) {
    const PointView p = point(idx);
    if (!masses.empty() &&
        std::equal(p.begin(), p.end(), coords.end() - static_cast<std::ptrdiff_t>(dim_))) {
      masses.back() += masses_[idx];
      continue;
    }
    coords.insert(coords.end(), p.begin(), p.end());
    masses.push_back(masses_[idx]);
  }
  coords_ = std::move(coords);
  masses_ = std::move(masses);
}

double LatticePMF::mass_at(PointView x) const {
  if (x.size() != dim_) throw std::invalid_argument("mass_at: dimension mismatch");
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less(point(mid), x)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size()) {
    const PointView p = point(lo);
    if (std::equal(p.begin(), p.end(), x.begin())) return masses_[lo];
  }
  return 0.0;
}

std::pair<Point, Point> LatticePMF::bounds() const {
  Point lo(coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(dim_));
  Point hi = lo;
  for (std::size_t i = 1; i < size(); ++i) {
    const PointView p = point(i);
    for (std::size_t c = 0; c < dim_; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  return {lo, hi};
}

// ----------------------------------------------------------------- CyclicPMF

CyclicPMF::CyclicPMF(int modulus_log2, std::size_t dim, std::vector<double> table)
    : k_(modulus_log2), dim_(dim), table_(std::move(table)) {
  if (k_ < 1 || k_ > 30) throw std::invalid_argument("CyclicPMF: modulus_log2 must be in [1, 30]");
  if (dim_ == 0) throw std::invalid_argument("CyclicPMF: dimension must be positive");
  if (static_cast<double>(k_) * static_cast<double>(dim_) > 30.0) {
    throw std::invalid_argument("CyclicPMF: table of 2^(k*n) entries is too large");
  }
  const std::size_t expected = std::size_t{1} << (static_cast<std::size_t>(k_) * dim_);
  if (table_.size() != expected) throw std::invalid_argument("CyclicPMF: table size must be 2^(k*n)");
  CompensatedSum total;
  for (double m : table_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("CyclicPMF: masses must be finite and nonnegative");
    }
    total += m;
  }
  check_total(total.value(), "CyclicPMF");
}

CyclicPMF CyclicPMF::point_mass(int modulus_log2, const Point& residues) {
  const std::size_t n = residues.size();
  if (n == 0 || modulus_log2 < 1 || modulus_log2 * static_cast<int>(n) > 30) {
    throw std::invalid_argument("CyclicPMF::point_mass: bad shape");
  }
  std::vector<double> table(std::size_t{1} << (static_cast<std::size_t>(modulus_log2) * n), 0.0);
  const std::int64_t m = std::int64_t{1} << modulus_log2;
  std::size_t idx = 0;
  for (auto r : residues) idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(floor_mod(r, m));
  table[idx] = 1.0;
  return CyclicPMF(modulus_log2, n, std::move(table));
}

CyclicPMF CyclicPMF::uniform(int modulus_log2, std::size_t dim) {
  if (modulus_log2 < 1 || dim == 0 || modulus_log2 * static_cast<int>(dim) > 30) {
    throw std::invalid_argument("CyclicPMF::uniform: bad shape");
  }
  const std::size_t n = std::size_t{1} << (static_cast<std::size_t>(modulus_log2) * dim);
  return CyclicPMF(modulus_log2, dim, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t CyclicPMF::index_of(PointView residues) const {
  if (residues.size() != dim_) throw std::invalid_argument("CyclicPMF: dimension mismatch");
  std::size_t idx = 0;
  for (auto r : residues) {
    idx = (idx << k_) | static_cast<std::size_t>(floor_mod(r, modulus()));
  }
  return idx;
}

Point CyclicPMF::residues_of(std::size_t index) const {
  Point r(dim_);
  const std::size_t mask = static_cast<std::size_t>(modulus() - 1);
  for (std::size_t i = dim_; i-- > 0;) {
    r[i] = static_cast<std::int64_t>(index & mask);
    index >>= k_;
  }
  return r;
}

double CyclicPMF::mass_at(const Point& residues) const { return table_[index_of(residues)]; }

// ------------------------------------------------------------------ JointPMF

JointPMF::JointPMF(std::size_t dim_first, std::size_t dim_second, std::vector<Atom> atoms)
    : d1_(dim_first), d2_(dim_second) {
  if (d1_ == 0 || d2_ == 0) throw std::invalid_argument("JointPMF: dimensions must be positive");
  for (const auto& a : atoms) {
    if (a.first.size() != d1_ || a.second.size() != d2_) {
      throw std::invalid_argument("JointPMF: inconsistent point dimension");
    }
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) {
      throw std::invalid_argument("JointPMF: masses must be finite and nonnegative");
    }
  }
  std::erase_if(atoms, [](const Atom& a) { return a.mass == 0.0; });
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  CompensatedSum total;
  for (auto& a : atoms) {
    total += a.mass;
    if (!atoms_.empty() && atoms_.back().first == a.first && atoms_.back().second == a.second) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(std::move(a));
    }
  }
  check_total(total.value(), "JointPMF");
}

JointPMF JointPMF::product(const LatticePMF& p, const LatticePMF& q) {
  std::vector<Atom> atoms;
  atoms.reserve(p.size() * q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto a = p.point(i);
      const auto b = q.point(j);
      atoms.push_back({Point(a.begin(), a.end()), Point(b.begin(), b.end()), p.mass(i) * q.mass(j)});
    }
  }
  return JointPMF(p.dim(), q.dim(), std::move(atoms));
}

LatticePMF JointPMF::first_marginal() const {
  std::vector<std::pair<Point, double>> atoms;
  for (const auto& a : atoms_) atoms.emplace_back(a.first, a.mass);
  return LatticePMF(d1_, std::move(atoms));
}

LatticePMF JointPMF::second_marginal() const {
  std::vector<std::pair<Point, double>> atoms;
  for (const auto& a : atoms_) atoms.emplace_back(a.second, a.mass);
  return LatticePMF(d2_, std::move(atoms));
}

LatticePMF JointPMF::flattened() const {
  std::vector<std::pair<Point, double>> atoms;
  for (const auto& a : atoms_) {
    Point x = a.first;
    x.insert(x.end(), a.second.begin(), a.second.end());
    atoms.emplace_back(std::move(x), a.mass);
  }
  return LatticePMF(d1_ + d2_, std::move(atoms));
}

// ---------------------------------------------------------------- operations

Nats shannon_entropy(std::span<const double> masses) {
  CompensatedSum h;
  std::size_t terms = 0;
  for (double p : masses) {
    if (p > 0.0) {
      h += -p * std::log(p);
      ++terms;
    }
  }
  const double v = std::max(0.0, h.value());
  return {v, summation_error(terms, v) + 8.0 * kEps * v};
}

Nats shannon_entropy(const LatticePMF& p) { return shannon_entropy(p.masses()); }
Nats shannon_entropy(const CyclicPMF& p) { return shannon_entropy(p.table()); }

LatticePMF dilate(const LatticePMF& p, std::int64_t a) {
  if (a == 0) throw std::invalid_argument("dilate: factor must be nonzero");
  std::vector<std::int64_t> coords(p.coords().begin(), p.coords().end());
  for (auto& c : coords) c *= a;
  return LatticePMF::from_accumulated(p.dim(), std::move(coords),
                                      std::vector<double>(p.masses().begin(), p.masses().end()));
}

LatticePMF translate(const LatticePMF& p, PointView shift) {
  if (shift.size() != p.dim()) throw std::invalid_argument("translate: dimension mismatch");
  std::vector<std::int64_t> coords(p.coords().begin(), p.coords().end());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += shift[i % p.dim()];
  return LatticePMF::from_accumulated(p.dim(), std::move(coords),
                                      std::vector<double>(p.masses().begin(), p.masses().end()));
}

LatticePMF pushforward(const LatticePMF& p, const PointMap& f, std::size_t out_dim) {
  std::vector<std::int64_t> coords;
  coords.reserve(p.size() * out_dim);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point y = f(p.point(i));
    if (y.size() != out_dim) throw std::invalid_argument("pushforward: map returned wrong dimension");
    coords.insert(coords.end(), y.begin(), y.end());
  }
  return LatticePMF::from_accumulated(out_dim, std::move(coords),
                                      std::vector<double>(p.masses().begin(), p.masses().end()));
}

LatticePMF convolve(const LatticePMF& p, const LatticePMF& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  return detail::convolve_pmfs(p, q);
}

LatticePMF linear_combination(std::span<const LatticePMF> ps, std::span<const std::int64_t> coeffs) {
  if (ps.size() != coeffs.size()) {
    throw std::invalid_argument("linear_combination: need one coefficient per pmf");
  }
  const LatticePMF* first = nullptr;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (ps[j].dim() != ps.front().dim()) {
      throw std::invalid_argument("linear_combination: dimension mismatch");
    }
    if (coeffs[j] != 0 && first == nullptr) first = &ps[j];
  }
  if (first == nullptr) throw std::invalid_argument("linear_combination: all coefficients are zero");
  std::optional<LatticePMF> acc;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (coeffs[j] == 0) continue;
    LatticePMF term = coeffs[j] == 1 ? ps[j] : dilate(ps[j], coeffs[j]);
    acc = acc ? convolve(*acc, term) : std::move(term);
  }
  return *std::move(acc);
}

CyclicPMF cyclic_linear_combination(std::span<const CyclicPMF> ps, std::span<const std::int64_t> coeffs) {
  if (ps.empty() || ps.size() != coeffs.size()) {
    throw std::invalid_argument("cyclic_linear_combination: need one coefficient per pmf");
  }
  const int k = ps.front().modulus_log2();
  const std::size_t n = ps.front().dim();
  for (const auto& p : ps) {
    if (p.modulus_log2() != k || p.dim() != n) {
      throw std::invalid_argument("cyclic_linear_combination: modulus mismatch");
    }
  }
  const std::int64_t m = std::int64_t{1} << k;
  const std::size_t size = ps.front().size();

  // Residue tuples of every table index, computed once.
  std::vector<std::int64_t> residues(size * n);
  for (std::size_t idx = 0; idx < size; ++idx) {
    const Point r = ps.front().residues_of(idx);
    std::copy(r.begin(), r.end(), residues.begin() + static_cast<std::ptrdiff_t>(idx * n));
  }
  auto index_of = [&](const std::int64_t* r) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) idx = (idx << k) | static_cast<std::size_t>(floor_mod(r[i], m));
    return idx;
  };

  std::vector<double> acc(size, 0.0);
  acc[0] = 1.0;
  std::vector<std::int64_t> tmp(n);
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const auto table = ps[j].table();
    std::vector<double> scaled(size, 0.0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      if (table[idx] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) tmp[i] = residues[idx * n + i] * coeffs[j];
      scaled[index_of(tmp.data())] += table[idx];
    }
    std::vector<std::size_t> nz_a;
    std::vector<std::size_t> nz_b;
    for (std::size_t idx = 0; idx < size; ++idx) {
      if (acc[idx] > 0.0) nz_a.push_back(idx);
      if (scaled[idx] > 0.0) nz_b.push_back(idx);
    }
    std::vector<double> next(size, 0.0);
    for (std::size_t a : nz_a) {
      for (std::size_t b : nz_b) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = residues[a * n + i] + residues[b * n + i];
        next[index_of(tmp.data())] += acc[a] * scaled[b];
      }
    }
    acc = std::move(next);
  }
  CompensatedSum total;
  for (double v : acc) total += v;
  for (double& v : acc) v /= total.value();
  return CyclicPMF(k, n, std::move(acc));
}

CyclicPMF reduce_mod(const LatticePMF& p, int modulus_log2) {
  if (modulus_log2 < 1 || modulus_log2 * static_cast<int>(p.dim()) > 30) {
    throw std::invalid_argument("reduce_mod: bad modulus");
  }
  const std::int64_t m = std::int64_t{1} << modulus_log2;
  std::vector<double> table(std::size_t{1} << (static_cast<std::size_t>(modulus_log2) * p.dim()), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t idx = 0;
    for (auto c : p.point(i)) idx = (idx << modulus_log2) | static_cast<std::size_t>(floor_mod(c, m));
    table[idx] += p.mass(i);
  }
  CompensatedSum total;
  for (double v : table) total += v;
  for (double& v : table) v /= total.value();
  return CyclicPMF(modulus_log2, p.dim(), std::move(table));
}

JointPMF joint_of(const PointMap& f, const LatticePMF& p, std::size_t out_dim) {
  std::vector<JointPMF::Atom> atoms;
  atoms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto x = p.point(i);
    Point y = f(x);
    if (y.size() != out_dim) throw std::invalid_argument("joint_of: map returned wrong dimension");
    atoms.push_back({Point(x.begin(), x.end()), std::move(y), p.mass(i)});
  }
  return JointPMF(p.dim(), out_dim, std::move(atoms));
}

Nats mutual_information(const JointPMF& j) {
  const Nats i = shannon_entropy(j.first_marginal()) + shannon_entropy(j.second_marginal()) -
                 shannon_entropy(j.flattened());
  if (i.value < 0.0 && i.value >= -1e-10) return {0.0, i.err};
  return i;
}

}  // namespace entropylab
