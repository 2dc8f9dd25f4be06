// Copyright 2026 The dgbo Authors
// SPDX-License-Identifier: Apache-2.0

#include "dgbo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace dgbo {
namespace {

using PlanKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, std::size_t count, std::size_t stride,
                std::size_t dist, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const PlanKey key{n, count, stride, dist, sign};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    // FFTW_ESTIMATE never touches the buffer and always picks the same
    // algorithm, so results are reproducible run to run.
    const std::size_t span = (n - 1) * stride + (count - 1) * dist + 1;
    auto* scratch = fftw_alloc_complex(span);
    int len = static_cast<int>(n);
    fftw_plan plan = fftw_plan_many_dft(
        1, &len, static_cast<int>(count), scratch, nullptr,
        static_cast<int>(stride), static_cast<int>(dist), scratch, nullptr,
        static_cast<int>(stride), static_cast<int>(dist), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_many(cplx* data, std::size_t n, std::size_t count, std::size_t stride,
              std::size_t dist, int sign) {
  if (n == 0 || count == 0) return;
  fftw_plan plan = cache().get(n, count, stride, dist, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buf, buf);
}

void fft_forward(std::span<cplx> data) {
  fft_many(data.data(), data.size(), 1, 1, data.size(), FFTW_FORWARD);
}

void fft_backward(std::span<cplx> data) {
  fft_many(data.data(), data.size(), 1, 1, data.size(), FFTW_BACKWARD);
}

}  // namespace dgbo
