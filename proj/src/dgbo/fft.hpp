// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace dgbo {

using cplx = std::complex<double>;

// Unnormalized in-place DFTs backed by FFTW. Plans are cached per length and
// shared across threads; execution uses the new-array interface so callers
// may pass any buffer of the planned length.
void fft_forward(std::span<cplx> data);   // sum_n x_n e^{-2 pi i m n / N}
void fft_backward(std::span<cplx> data);  // sum_m X_m e^{+2 pi i m n / N}

inline constexpr int kForwardSign = -1;
inline constexpr int kBackwardSign = +1;

// Strided batch over `count` sequences of length `n`, element stride
// `stride`, sequence distance `dist`.
void fft_many(cplx* data, std::size_t n, std::size_t count, std::size_t stride,
              std::size_t dist, int sign);

}  // namespace dgbo
