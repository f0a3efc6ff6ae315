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

#ifndef URGENT_STFT_H_
#define URGENT_STFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "urgent/audio_io.h"

namespace urgent {

enum class WindowFunction { kHann, kSqrtHann, kRectangular };

// Periodic windows (DFT-even), so hann at hop n/2 sums to a constant.
std::vector<double> make_window(WindowFunction fn, std::size_t n);

// T x F one-sided spectra, row-major by frame.
struct Spectrogram {
  std::size_t num_frames = 0;
  std::size_t num_bins = 0;
  int sample_rate_hz = 0;
  std::size_t n_fft = 0;
  std::size_t hop_samples = 0;
  std::vector<std::complex<double>> data;

  std::span<const std::complex<double>> frame(std::size_t t) const {
    return std::span(data).subspan(t * num_bins, num_bins);
  }
  std::span<std::complex<double>> frame(std::size_t t) {
    return std::span(data).subspan(t * num_bins, num_bins);
  }
};

struct StftParams {
  std::size_t n_fft = 0;
  std::size_t hop = 0;
  WindowFunction window = WindowFunction::kHann;
  // Reflect-pad n_fft/2 samples on both sides; T = 1 + floor(len / hop).
  // Without centering, T = 1 + floor((len - n_fft) / hop) and a signal
  // shorter than n_fft yields one zero-padded frame.
  bool center = true;
};

Spectrogram stft(std::span<const double> x, int sample_rate_hz, const StftParams& params);

// Weighted overlap-add with window-square normalization. Throws kConfig
// when the summed squared window vanishes somewhere inside the output.
std::vector<double> istft(const Spectrogram& spec, const StftParams& params,
                          std::size_t target_len);

// Window and hop fixed in seconds, so the frame covers the same physical
// span at every sampling rate.
struct SfiStftConfig {
  double window_duration_s = 0.020;
  double hop_duration_s = 0.010;
  WindowFunction window = WindowFunction::kHann;

  // round(window_duration_s * sf), bumped to the next even integer when odd
  // (441 -> 442 at 22.05 kHz).
  std::size_t n_fft(int sample_rate_hz) const;
  std::size_t hop_samples(int sample_rate_hz) const;
  StftParams params(int sample_rate_hz) const;
  void validate() const;
};

Spectrogram sfi_stft(const AudioBuffer& x, const SfiStftConfig& cfg);
AudioBuffer sfi_istft(const Spectrogram& spec, const SfiStftConfig& cfg, std::size_t target_len);

}  // namespace urgent

#endif  // URGENT_STFT_H_
