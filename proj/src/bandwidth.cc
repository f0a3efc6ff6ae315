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

#include "urgent/bandwidth.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "urgent/error.h"
#include "urgent/fft.h"
#include "urgent/resample.h"
#include "urgent/stft.h"

namespace urgent {

BandwidthEstimate estimate_effective_bandwidth(const AudioBuffer& x,
                                               const BandwidthOptions& options) {
  const int sf = x.sample_rate_hz();
  const auto n = static_cast<std::size_t>(std::llround(options.frame_duration_s * sf));
  if (n < 2 || x.size() < n) {
    throw Error(ErrorCode::kParameter, "bandwidth estimation needs at least one " +
                                           std::to_string(options.frame_duration_s) +
                                           " s frame");
  }
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - options.overlap))));
  const std::size_t frames = 1 + (x.size() - n) / hop;
  const std::size_t bins = n / 2 + 1;

  const auto window = make_window(WindowFunction::kHann, n);
  const double window_sum = std::accumulate(window.begin(), window.end(), 0.0);
  RealFft fft(n);
  std::vector<double> buf(n);
  std::vector<std::complex<double>> spec(bins);
  std::vector<double> power(frames * bins);
  std::vector<double> energy(frames, 0.0);
  const auto samples = x.samples();
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = samples[t * hop + i] * window[i];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < bins; ++k) {
      // A full-scale sinusoid reads 0 dBFS in its bin.
      const double p = 4.0 * std::norm(spec[k]) / (window_sum * window_sum);
      power[t * bins + k] = p;
      energy[t] += p;
    }
  }

  std::vector<std::size_t> order(frames);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });
  const auto used = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options.loudest_fraction * static_cast<double>(frames))));

  std::vector<double> mean(bins, 0.0);
  for (std::size_t r = 0; r < used; ++r) {
    const std::size_t t = order[r];
    for (std::size_t k = 0; k < bins; ++k) mean[k] += power[t * bins + k];
  }
  std::vector<double> level_db(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    level_db[k] = 10.0 * std::log10(mean[k] / static_cast<double>(used) + 1e-30);
  }
  const double peak_db = *std::max_element(level_db.begin(), level_db.end());
  if (peak_db < options.silence_floor_dbfs) {
    throw Error(ErrorCode::kSilence, "input is silent (spectral peak " +
                                         std::to_string(peak_db) + " dBFS)");
  }

  const double floor_db = peak_db + options.threshold_db;
  const auto need = static_cast<std::size_t>(std::max(1, options.hysteresis_bins));
  std::size_t edge = 0;
  for (std::size_t k = bins; k-- > 0;) {
    if (k + 1 < need) break;
    bool run = true;
    for (std::size_t j = 0; j < need; ++j) run = run && level_db[k - j] >= floor_db;
    if (run) {
      edge = k;
      break;
    }
  }

  BandwidthEstimate est;
  est.analyzed_frames = used;
  est.effective_bw_hz = std::min(static_cast<double>(edge) * sf / static_cast<double>(n), sf / 2.0);
  std::vector<double> below(level_db.begin(), level_db.begin() + static_cast<long>(edge) + 1);
  std::nth_element(below.begin(), below.begin() + static_cast<long>(below.size() / 2), below.end());
  const double plateau = below[below.size() / 2];
  if (edge + 1 < bins) {
    const double above = std::accumulate(level_db.begin() + static_cast<long>(edge) + 1,
                                         level_db.end(), 0.0) /
                         static_cast<double>(bins - edge - 1);
    est.confidence_db = plateau - above;
  }
  return est;
}

int best_matching_sf(double bw_hz, std::span<const int> allowed) {
  if (allowed.empty()) throw Error(ErrorCode::kParameter, "allowed rate set is empty");
  for (int sf : allowed) {
    if (sf / 2.0 >= bw_hz) return sf;
  }
  return allowed.back();
}

AudioBuffer normalize_to_effective_sf(const AudioBuffer& x, const BandwidthOptions& options,
                                      std::span<const int> allowed) {
  const auto est = estimate_effective_bandwidth(x, options);
  return resample(x, best_matching_sf(est.effective_bw_hz, allowed));
}

}  // namespace urgent
