#pragma once

#include <cstddef>

#include "entropylab/lattice_pmf.hpp"

namespace entropylab::detail {

/// Pairs of atoms above which the dense FFT path is taken.
inline constexpr std::size_t kSparseProductLimit = std::size_t{1} << 22;
/// Largest dense box (cells) the FFT path will allocate.
inline constexpr std::size_t kFftBoxLimit = std::size_t{1} << 27;

enum class ConvolutionPath { Sparse, Fft };

ConvolutionPath choose_path(const LatticePMF& p, const LatticePMF& q);

LatticePMF convolve_pmfs(const LatticePMF& p, const LatticePMF& q);
LatticePMF convolve_sparse(const LatticePMF& p, const LatticePMF& q);
LatticePMF convolve_fft(const LatticePMF& p, const LatticePMF& q);

}  // namespace entropylab::detail
