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

#include "urgent/fir.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "urgent/error.h"
#include "urgent/fft.h"

namespace urgent {

namespace {

// Extra attenuation requested from the Kaiser length formula, which is
// known to undershoot by a dB or two near the band edge.
constexpr double kDesignMarginDb = 5.0;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

double kaiser_beta(double attenuation_db) {
  if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
  if (attenuation_db >= 21.0) {
    return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
  }
  return 0.0;
}

std::vector<double> kaiser_window(std::size_t n, double beta) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double denom = std::cyl_bessel_i(0.0, beta);
  const double half = static_cast<double>(n - 1) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) - half) / half;
    w[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

FirFilter design_lowpass(double cutoff_hz, int sample_rate_hz, double transition_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  if (sample_rate_hz <= 0 || !(cutoff_hz > 0.0) || !(cutoff_hz < nyquist)) {
    throw Error(ErrorCode::kParameter,
                "low-pass cutoff must lie in (0, " + std::to_string(nyquist) + ") Hz");
  }
  if (!(transition_hz > 0.0)) {
    throw Error(ErrorCode::kParameter, "transition width must be positive");
  }
  const double atten = kStopbandAttenuationDb + kDesignMarginDb;
  const double delta_omega = 2.0 * std::numbers::pi * transition_hz / sample_rate_hz;
  auto n = static_cast<std::size_t>(std::ceil((atten - 7.95) / (2.285 * delta_omega))) + 1;
  if (n % 2 == 0) ++n;

  const double fc = (cutoff_hz + transition_hz / 2.0) / sample_rate_hz;
  const auto window = kaiser_window(n, kaiser_beta(atten));
  const double center = static_cast<double>(n - 1) / 2.0;
  FirFilter filter;
  filter.taps.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - center;
    filter.taps[i] = 2.0 * fc * sinc(2.0 * fc * t) * window[i];
    sum += filter.taps[i];
  }
  for (double& v : filter.taps) v /= sum;
  return filter;
}

std::vector<double> convolve_direct(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double* out = y.data() + i;
    for (std::size_t j = 0; j < h.size(); ++j) out[j] += xi * h[j];
  }
  return y;
}

std::vector<double> convolve_fft(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  // Overlap-add once the signal is much longer than the kernel; a single
  // transform otherwise.
  std::size_t nfft = next_fast_size(out_len);
  const std::size_t block_nfft = next_fast_size(std::max<std::size_t>(8 * h.size(), 1 << 15));
  if (block_nfft < nfft) nfft = block_nfft;
  const std::size_t block = nfft - h.size() + 1;

  RealFft fft(nfft);
  std::vector<std::complex<double>> kernel(fft.num_bins());
  std::vector<std::complex<double>> spec(fft.num_bins());
  std::vector<double> frame(nfft);
  fft.forward(h, kernel);

  std::vector<double> y(out_len, 0.0);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    fft.forward(x.subspan(start, len), spec);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= kernel[k];
    fft.inverse(spec, frame);
    const std::size_t valid = std::min(len + h.size() - 1, out_len - start);
    for (std::size_t i = 0; i < valid; ++i) y[start + i] += frame[i] * scale;
  }
  return y;
}

std::vector<double> convolve_full(std::span<const double> x, std::span<const double> h) {
  return h.size() <= kDirectConvolutionMaxTaps ? convolve_direct(x, h) : convolve_fft(x, h);
}

AudioBuffer convolve(const AudioBuffer& x, std::span<const double> h, ConvolveMode mode) {
  if (h.empty()) throw Error(ErrorCode::kParameter, "convolution kernel is empty");
  auto full = convolve_full(x.samples(), h);
  if (mode == ConvolveMode::kFull) return AudioBuffer(std::move(full), x.sample_rate_hz());

  const std::size_t delay = (h.size() - 1) / 2;
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size() && i + delay < full.size(); ++i) out[i] = full[i + delay];
  return AudioBuffer(std::move(out), x.sample_rate_hz());
}

}  // namespace urgent
