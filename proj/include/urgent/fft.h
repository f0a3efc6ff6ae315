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

#ifndef URGENT_FFT_H_
#define URGENT_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace urgent {

// Real-input DFT of arbitrary length n, backed by FFTW with plans shared
// across instances. An instance owns its scratch buffers, so one instance
// per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t num_bins() const noexcept { return n_ / 2 + 1; }

  // in.size() <= n; the remainder is zero-filled. out.size() == num_bins().
  void forward(std::span<const double> in, std::span<std::complex<double>> out);

  // Unnormalized inverse: forward followed by inverse scales by n.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

// Smallest m >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t next_fast_size(std::size_t n);

}  // namespace urgent

#endif  // URGENT_FFT_H_
