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

#include "urgent/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "urgent/error.h"
#include "urgent/fft.h"

namespace urgent {

namespace {

// Reflection without edge repeat, folded as often as needed.
double reflected(std::span<const double> x, long i) {
  const long n = static_cast<long>(x.size());
  if (n == 1) return x[0];
  const long period = 2 * (n - 1);
  long k = i % period;
  if (k < 0) k += period;
  if (k >= n) k = period - k;
  return x[static_cast<std::size_t>(k)];
}

}  // namespace

std::vector<double> make_window(WindowFunction fn, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (fn == WindowFunction::kRectangular) return w;
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
    w[i] = fn == WindowFunction::kHann ? hann : std::sqrt(hann);
  }
  return w;
}

Spectrogram stft(std::span<const double> x, int sample_rate_hz, const StftParams& params) {
  if (x.empty()) throw Error(ErrorCode::kParameter, "STFT of an empty signal");
  if (params.n_fft == 0 || params.hop == 0) {
    throw Error(ErrorCode::kParameter, "STFT size and hop must be positive");
  }
  const std::size_t n = params.n_fft;
  const long pad = params.center ? static_cast<long>(n / 2) : 0;
  std::size_t frames;
  if (params.center) {
    frames = 1 + x.size() / params.hop;
  } else {
    frames = x.size() >= n ? 1 + (x.size() - n) / params.hop : 1;
  }

  Spectrogram spec;
  spec.num_frames = frames;
  spec.num_bins = n / 2 + 1;
  spec.sample_rate_hz = sample_rate_hz;
  spec.n_fft = n;
  spec.hop_samples = params.hop;
  spec.data.resize(frames * spec.num_bins);

  const auto window = make_window(params.window, n);
  RealFft fft(n);
  std::vector<double> buf(n);
  const long len = static_cast<long>(x.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t * params.hop) - pad;
    for (std::size_t i = 0; i < n; ++i) {
      const long idx = start + static_cast<long>(i);
      double v;
      if (idx >= 0 && idx < len) {
        v = x[static_cast<std::size_t>(idx)];
      } else {
        v = params.center ? reflected(x, idx) : 0.0;
      }
      buf[i] = v * window[i];
    }
    fft.forward(buf, spec.frame(t));
  }
  return spec;
}

std::vector<double> istft(const Spectrogram& spec, const StftParams& params,
                          std::size_t target_len) {
  const std::size_t n = params.n_fft;
  if (n == 0 || params.hop == 0 || spec.n_fft != n || spec.num_bins != n / 2 + 1) {
    throw Error(ErrorCode::kParameter, "spectrogram does not match the STFT parameters");
  }
  if (params.hop > n) {
    throw Error(ErrorCode::kConfig, "hop exceeds the window; overlap-add leaves gaps");
  }
  const auto window = make_window(params.window, n);
  const std::size_t pad = params.center ? n / 2 : 0;
  const std::size_t total = n + params.hop * (spec.num_frames == 0 ? 0 : spec.num_frames - 1);
  std::vector<double> acc(total, 0.0);
  std::vector<double> env(total, 0.0);

  RealFft fft(n);
  std::vector<double> buf(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < spec.num_frames; ++t) {
    fft.inverse(spec.frame(t), buf);
    const std::size_t start = t * params.hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[start + i] += buf[i] * scale * window[i];
      env[start + i] += window[i] * window[i];
    }
  }

  std::vector<double> y(target_len, 0.0);
  const std::size_t covered = spec.num_frames == 0 ? 0 : total - pad;
  const std::size_t limit = std::min(target_len, covered);
  double env_max = 0.0;
  for (double e : env) env_max = std::max(env_max, e);
  for (std::size_t i = 0; i < limit; ++i) {
    const double e = env[i + pad];
    if (!(e > 1e-10 * env_max)) {
      throw Error(ErrorCode::kConfig,
                  "window/hop combination violates the overlap-add condition at sample " +
                      std::to_string(i));
    }
    y[i] = acc[i + pad] / e;
  }
  return y;
}

std::size_t SfiStftConfig::n_fft(int sample_rate_hz) const {
  auto n = static_cast<std::size_t>(std::llround(window_duration_s * sample_rate_hz));
  if (n % 2 == 1) ++n;
  return n;
}

std::size_t SfiStftConfig::hop_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(hop_duration_s * sample_rate_hz));
}

StftParams SfiStftConfig::params(int sample_rate_hz) const {
  validate();
  StftParams p;
  p.n_fft = n_fft(sample_rate_hz);
  p.hop = hop_samples(sample_rate_hz);
  p.window = window;
  p.center = true;
  if (p.n_fft == 0 || p.hop == 0) {
    throw Error(ErrorCode::kConfig, "STFT durations resolve to zero samples at " +
                                        std::to_string(sample_rate_hz) + " Hz");
  }
  return p;
}

void SfiStftConfig::validate() const {
  if (!(hop_duration_s > 0.0) || !(hop_duration_s <= window_duration_s)) {
    throw Error(ErrorCode::kConfig, "SFI STFT requires 0 < hop <= window duration");
  }
}

Spectrogram sfi_stft(const AudioBuffer& x, const SfiStftConfig& cfg) {
  if (x.empty()) throw Error(ErrorCode::kParameter, "STFT of an empty signal");
  return stft(x.samples(), x.sample_rate_hz(), cfg.params(x.sample_rate_hz()));
}

AudioBuffer sfi_istft(const Spectrogram& spec, const SfiStftConfig& cfg, std::size_t target_len) {
  return AudioBuffer(istft(spec, cfg.params(spec.sample_rate_hz), target_len), spec.sample_rate_hz);
}

}  // namespace urgent
