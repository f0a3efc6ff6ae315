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

// Kaiser-window FIR design and linear convolution.

#ifndef URGENT_FIR_H_
#define URGENT_FIR_H_

#include <cstddef>
#include <span>
#include <vector>

#include "urgent/audio_io.h"

namespace urgent {

inline constexpr double kStopbandAttenuationDb = 80.0;

// Linear-phase FIR. Designs produced here have an odd tap count.
struct FirFilter {
  std::vector<double> taps;

  std::size_t delay_samples() const noexcept {
    return taps.empty() ? 0 : (taps.size() - 1) / 2;
  }
};

// Kaiser window shape parameter for a given stopband attenuation.
double kaiser_beta(double attenuation_db);

// Symmetric Kaiser window of n points.
std::vector<double> kaiser_window(std::size_t n, double beta);

// Kaiser-windowed sinc low-pass. Passband extends to cutoff_hz, stopband
// (>= 80 dB) begins at cutoff_hz + transition_hz. Taps sum to one.
FirFilter design_lowpass(double cutoff_hz, int sample_rate_hz, double transition_hz);

enum class ConvolveMode {
  kFull,                  // len(x) + len(h) - 1 samples
  kSameDelayCompensated,  // drop (len(h)-1)/2 leading samples, keep len(x)
};

// Kernels up to this length are convolved directly, longer ones via FFT.
inline constexpr std::size_t kDirectConvolutionMaxTaps = 64;

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h);
std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h);
std::vector<double> convolve_full(std::span<const double> x, std::span<const double> h);

AudioBuffer convolve(const AudioBuffer& x, std::span<const double> h, ConvolveMode mode);

}  // namespace urgent

#endif  // URGENT_FIR_H_
