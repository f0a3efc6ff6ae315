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

// Effective-bandwidth estimation and best-matching sampling rate.

#ifndef URGENT_BANDWIDTH_H_
#define URGENT_BANDWIDTH_H_

#include <array>
#include <cstddef>
#include <span>

#include "urgent/audio_io.h"

namespace urgent {

inline constexpr std::array<int, 7> kSupportedSampleRates = {8000,  16000, 22050, 24000,
                                                             32000, 44100, 48000};

struct BandwidthOptions {
  double threshold_db = -50.0;    // relative to the spectral peak
  double frame_duration_s = 0.050;
  double overlap = 0.75;
  double loudest_fraction = 0.5;  // frames averaged, ranked by energy
  int hysteresis_bins = 3;
  double silence_floor_dbfs = -100.0;
};

struct BandwidthEstimate {
  double effective_bw_hz = 0.0;
  // Plateau level below the edge minus the mean level above it.
  double confidence_db = 0.0;
  std::size_t analyzed_frames = 0;
};

// Throws kParameter for input shorter than one frame, kSilence when the peak
// of the averaged spectrum is below the silence floor.
BandwidthEstimate estimate_effective_bandwidth(const AudioBuffer& x,
                                               const BandwidthOptions& options = {});

// Lowest allowed rate whose Nyquist covers bw_hz; the highest allowed rate
// when none does. The allowed set must be sorted ascending and non-empty.
int best_matching_sf(double bw_hz, std::span<const int> allowed = kSupportedSampleRates);

AudioBuffer normalize_to_effective_sf(const AudioBuffer& x, const BandwidthOptions& options = {},
                                      std::span<const int> allowed = kSupportedSampleRates);

}  // namespace urgent

#endif  // URGENT_BANDWIDTH_H_
