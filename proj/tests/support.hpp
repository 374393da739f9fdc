#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "entropylab/lattice_pmf.hpp"

namespace testing {

// Small deterministic generator so property suites replay identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t s_;
};

inline std::vector<double> random_masses(Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  double total = 0.0;
  for (auto& x : m) {
    x = -std::log(1.0 - rng.uniform()) + 1e-6;
    total += x;
  }
  for (auto& x : m) x /= total;
  return m;
}

/// Random pmf on distinct integers in [lo, hi] with 1..max_support atoms.
inline entropylab::LatticePMF random_pmf(Rng& rng, std::size_t max_support, std::int64_t lo = -6,
                                         std::int64_t hi = 6) {
  const auto n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_support)));
  std::vector<std::int64_t> pts;
  while (pts.size() < n) {
    const auto x = rng.between(lo, hi);
    bool dup = false;
    for (auto p : pts) dup = dup || p == x;
    if (!dup) pts.push_back(x);
  }
  const auto m = random_masses(rng, n);
  std::vector<std::pair<entropylab::Point, double>> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({{pts[i]}, m[i]});
  return entropylab::LatticePMF(1, std::move(atoms));
}

}  // namespace testing
