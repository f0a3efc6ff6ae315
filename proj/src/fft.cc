/* Copyright 2026 The urgent-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "urgent/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "urgent/error.h"

namespace urgent {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// fftw planning is not thread-safe; execution of an existing plan on new
// arrays is. All scratch arrays come from fftw_malloc so they share the
// alignment the plans were made with.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const int len = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  fftw_free(real);
  fftw_free(spec);
  if (p.forward == nullptr || p.inverse == nullptr) {
    throw Error(ErrorCode::kInternal, "fftw planning failed for size " + std::to_string(n));
  }
  return cache.emplace(n, p).first->second;
}

}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  const PlanPair* plans = nullptr;

  ~Impl() {
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw Error(ErrorCode::kParameter, "FFT size must be positive");
  impl_->plans = &plans_for(n);
  impl_->real = fftw_alloc_real(n);
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  if (in.size() > n_ || out.size() != num_bins()) {
    throw Error(ErrorCode::kParameter, "RealFft::forward size mismatch");
  }
  std::copy(in.begin(), in.end(), impl_->real);
  std::fill(impl_->real + in.size(), impl_->real + n_, 0.0);
  fftw_execute_dft_r2c(impl_->plans->forward, impl_->real, impl_->spec);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
  }
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  if (in.size() != num_bins() || out.size() != n_) {
    throw Error(ErrorCode::kParameter, "RealFft::inverse size mismatch");
  }
  for (std::size_t k = 0; k < in.size(); ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  fftw_execute_dft_c2r(impl_->plans->inverse, impl_->spec, impl_->real);
  std::copy(impl_->real, impl_->real + n_, out.begin());
}

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace urgent
