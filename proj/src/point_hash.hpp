#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "entropylab/lattice_pmf.hpp"

namespace entropylab::detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto c : p) h = mix64(h ^ static_cast<std::uint64_t>(c));
    return static_cast<std::size_t>(h);
  }
};

/// Sums masses keyed by lattice point. Uses a dense array when the bounding box
/// is small, a hash map otherwise; `finish` yields a normalized LatticePMF.
class MassAccumulator {
 public:
  static constexpr std::size_t kDenseLimit = std::size_t{1} << 25;

  MassAccumulator(std::size_t dim, const Point& lo, const Point& hi) : dim_(dim), lo_(lo) {
    extent_.resize(dim);
    long double volume = 1.0L;
    for (std::size_t i = 0; i < dim; ++i) {
      extent_[i] = hi[i] - lo[i] + 1;
      volume *= static_cast<long double>(extent_[i]);
    }
    dense_ = volume <= static_cast<long double>(kDenseLimit);
    if (dense_) {
      strides_.assign(dim, 1);
      for (std::size_t i = dim; i-- > 1;) strides_[i - 1] = strides_[i] * extent_[i];
      cells_.assign(static_cast<std::size_t>(volume), 0.0);
    }
  }

  bool dense() const noexcept { return dense_; }

  void add(PointView x, double m) {
    if (dense_) {
      std::int64_t idx = 0;
      for (std::size_t i = 0; i < dim_; ++i) idx += (x[i] - lo_[i]) * strides_[i];
      cells_[static_cast<std::size_t>(idx)] += m;
    } else {
      sparse_[Point(x.begin(), x.end())] += m;
    }
  }

  LatticePMF finish(double prune_below = kPruneThreshold) && {
    std::vector<std::int64_t> coords;
    std::vector<double> masses;
    if (dense_) {
      Point x(dim_);
      for (std::size_t idx = 0; idx < cells_.size(); ++idx) {
        if (cells_[idx] <= 0.0) continue;
        auto rem = static_cast<std::int64_t>(idx);
        for (std::size_t i = 0; i < dim_; ++i) {
          x[i] = lo_[i] + rem / strides_[i];
          rem %= strides_[i];
        }
        coords.insert(coords.end(), x.begin(), x.end());
        masses.push_back(cells_[idx]);
      }
    } else {
      for (auto& [pt, m] : sparse_) {
        coords.insert(coords.end(), pt.begin(), pt.end());
        masses.push_back(m);
      }
    }
    return LatticePMF::from_accumulated(dim_, std::move(coords), std::move(masses), prune_below);
  }

 private:
  std::size_t dim_;
  Point lo_;
  std::vector<std::int64_t> extent_;
  std::vector<std::int64_t> strides_;
  bool dense_ = false;
  std::vector<double> cells_;
  std::unordered_map<Point, double, PointHash> sparse_;
};

}  // namespace entropylab::detail
