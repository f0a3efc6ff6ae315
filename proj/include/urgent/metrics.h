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

// Intrusive signal-level metrics. Every function takes (reference,
// estimate) at one sampling rate; a shorter signal is zero-padded to the
// longer one with a warning.

#ifndef URGENT_METRICS_H_
#define URGENT_METRICS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "urgent/audio_io.h"

namespace urgent {

inline constexpr double kSdrCapDb = 60.0;
inline constexpr double kLogPowerFloor = 1e-10;

// 10 log10(sum ref^2 / sum (ref - est)^2), never above kSdrCapDb.
// Throws kUndefinedMetric for a silent reference.
double sdr(const AudioBuffer& reference, const AudioBuffer& estimate);

// Extended STOI on 10 kHz signals: silent-frame removal (40 dB range),
// 256-sample frames in 512-point spectra, 15 third-octave bands from 150 Hz,
// 30-frame segments, row then column normalization of each segment.
// Throws kDuration when fewer than 30 frames survive.
double estoi(const AudioBuffer& reference, const AudioBuffer& estimate);

inline constexpr std::size_t kMelBands = 80;
inline constexpr std::size_t kCepstralOrder = 13;
using MelCepstrum = std::array<double, kCepstralOrder>;  // c1..c13

// 25 ms hann frames, 10 ms hop, 80 HTK mel bands up to Nyquist, natural log
// energies floored at kLogPowerFloor, orthonormal DCT-II; c0 dropped.
std::vector<MelCepstrum> mel_cepstra(const AudioBuffer& x);

// Triangular mel weights, kMelBands x (n_fft/2 + 1), row-major.
std::vector<double> mel_filterbank(int sample_rate_hz, std::size_t n_fft);
std::size_t mcd_fft_size(int sample_rate_hz);

// Mean over frames of (10 / ln 10) sqrt(2 sum_d (c_d - c'_d)^2).
double mcd_from_cepstra(std::span<const MelCepstrum> reference, std::span<const MelCepstrum> estimate);
double mcd(const AudioBuffer& reference, const AudioBuffer& estimate);

// Mean over frames of the RMS (over bins) of the log power ratio in dB.
// 2048/512 hann STFT at >= 32 kHz, 1024/256 below.
double lsd(const AudioBuffer& reference, const AudioBuffer& estimate);

inline constexpr std::array<std::size_t, 4> kMultiResolutionWindows = {256, 512, 768, 1024};

// mean|ref - est| plus the average over kMultiResolutionWindows of the mean
// absolute magnitude-spectrogram difference (hann, hop = window / 2).
double multires_l1_loss(const AudioBuffer& reference, const AudioBuffer& estimate);

enum class Metric { kSdr, kEstoi, kMcd, kLsd, kMultiresL1 };
inline constexpr std::size_t kMetricCount = 5;

struct MetricInfo {
  Metric metric;
  std::string_view key;    // machine name
  std::string_view label;  // table heading
  bool higher_is_better;
  std::string_view variant;
};

inline constexpr std::array<MetricInfo, kMetricCount> kMetricInfo = {{
    {Metric::kSdr, "sdr_db", "SDR (dB)", true, "plain energy ratio, capped at 60 dB"},
    {Metric::kEstoi, "estoi", "ESTOI", true, "10 kHz, 15 third-octave bands, N=30"},
    {Metric::kMcd, "mcd_db", "MCD (dB)", false, "80 mel bands, c1..c13, no time warping"},
    {Metric::kLsd, "lsd_db", "LSD (dB)", false, "hann 2048/512 (>=32 kHz) or 1024/256, eps 1e-10"},
    {Metric::kMultiresL1, "multires_l1", "MR-L1", false, "time L1 + STFT magnitude L1 {256,512,768,1024}"},
}};

double compute_metric(Metric metric, const AudioBuffer& reference, const AudioBuffer& estimate);

}  // namespace urgent

#endif  // URGENT_METRICS_H_
