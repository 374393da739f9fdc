#include "convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "point_hash.hpp"

namespace entropylab::detail {

namespace {

// FFTW's planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct Box {
  Point lo;
  std::vector<std::int64_t> extent;
  long double volume = 1.0L;
};

Box sum_box(const LatticePMF& p, const LatticePMF& q) {
  const auto [plo, phi] = p.bounds();
  const auto [qlo, qhi] = q.bounds();
  Box b;
  b.lo.resize(p.dim());
  b.extent.resize(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    b.lo[i] = plo[i] + qlo[i];
    b.extent[i] = (phi[i] - plo[i]) + (qhi[i] - qlo[i]) + 1;
    b.volume *= static_cast<long double>(b.extent[i]);
  }
  return b;
}

}  // namespace

ConvolutionPath choose_path(const LatticePMF& p, const LatticePMF& q) {
  const long double pairs = static_cast<long double>(p.size()) * static_cast<long double>(q.size());
  if (pairs <= static_cast<long double>(kSparseProductLimit)) return ConvolutionPath::Sparse;
  if (sum_box(p, q).volume > static_cast<long double>(kFftBoxLimit)) return ConvolutionPath::Sparse;
  return ConvolutionPath::Fft;
}

LatticePMF convolve_pmfs(const LatticePMF& p, const LatticePMF& q) {
  return choose_path(p, q) == ConvolutionPath::Fft ? convolve_fft(p, q) : convolve_sparse(p, q);
}

LatticePMF convolve_sparse(const LatticePMF& p, const LatticePMF& q) {
  const std::size_t d = p.dim();
  const auto [plo, phi] = p.bounds();
  const auto [qlo, qhi] = q.bounds();
  Point lo(d);
  Point hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = plo[i] + qlo[i];
    hi[i] = phi[i] + qhi[i];
  }
  MassAccumulator acc(d, lo, hi);
  Point x(d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto a = p.point(i);
    const double ma = p.mass(i);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const auto b = q.point(j);
      for (std::size_t c = 0; c < d; ++c) x[c] = a[c] + b[c];
      acc.add(x, ma * q.mass(j));
    }
  }
  return std::move(acc).finish();
}

LatticePMF convolve_fft(const LatticePMF& p, const LatticePMF& q) {
  const std::size_t d = p.dim();
  const Box box = sum_box(p, q);
  if (box.volume > static_cast<long double>(kFftBoxLimit)) {
    throw std::invalid_argument("convolve_fft: dense box too large");
  }
  const auto n = static_cast<std::size_t>(box.volume);
  std::vector<std::int64_t> strides(d, 1);
  for (std::size_t i = d; i-- > 1;) strides[i - 1] = strides[i] * box.extent[i];

  // Both operands are embedded relative to their own minimum corner so that
  // flat indices add without carries across coordinates.
  const auto [plo, phi] = p.bounds();
  const auto [qlo, qhi] = q.bounds();
  const std::size_t nc = n / 2 + 1;
  auto a = fftw_alloc<double>(n);
  auto b = fftw_alloc<double>(n);
  auto fa = fftw_alloc<fftw_complex>(nc);
  auto fb = fftw_alloc<fftw_complex>(nc);
  std::fill_n(a.get(), n, 0.0);
  std::fill_n(b.get(), n, 0.0);
  auto flat = [&](PointView x, const Point& lo) {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < d; ++i) idx += (x[i] - lo[i]) * strides[i];
    return static_cast<std::size_t>(idx);
  };
  for (std::size_t i = 0; i < p.size(); ++i) a[flat(p.point(i), plo)] += p.mass(i);
  for (std::size_t j = 0; j < q.size(); ++j) b[flat(q.point(j), qlo)] += q.mass(j);

  fftw_plan fwd_a;
  fftw_plan fwd_b;
  fftw_plan inv;
  {
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    fwd_a = fftw_plan_dft_r2c_1d(len, a.get(), fa.get(), FFTW_ESTIMATE);
    fwd_b = fftw_plan_dft_r2c_1d(len, b.get(), fb.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(len, fa.get(), a.get(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd_a);
  fftw_execute(fwd_b);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(inv);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(inv);
  }

  const double scale = 1.0 / static_cast<double>(n);
  std::vector<std::int64_t> coords;
  std::vector<double> masses;
  Point x(d);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double m = a[idx] * scale;
    if (m < kPruneThreshold) continue;
    auto rem = static_cast<std::int64_t>(idx);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = box.lo[i] + rem / strides[i];
      rem %= strides[i];
    }
    coords.insert(coords.end(), x.begin(), x.end());
    masses.push_back(m);
  }
  return LatticePMF::from_accumulated(d, std::move(coords), std::move(masses));
}

}  // namespace entropylab::detail
