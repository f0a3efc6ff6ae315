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

// Distortion generators: additive noise, reverberation, clipping and
// bandwidth limitation, and their composition into a degraded/reference
// pair.

#ifndef URGENT_DISTORTION_H_
#define URGENT_DISTORTION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "urgent/audio_io.h"

namespace urgent {

enum class DistortionKind { kNone, kBandwidthLimitation, kClipping };

std::string_view to_string(DistortionKind kind);
DistortionKind parse_distortion_kind(std::string_view name);

// Noise is always added and reverberation is optional; `kind` selects the
// extra distortion applied to the mixture.
struct DistortionSpec {
  DistortionKind kind = DistortionKind::kNone;
  std::optional<double> cutoff_hz;   // kBandwidthLimitation only
  std::optional<double> clip_ratio;  // kClipping only, in (0, 1]
  double snr_db = 0.0;
  std::optional<std::string> rir_path;
  std::string noise_path;
  double noise_offset_s = 0.0;
  std::uint64_t seed = 0;

  // Throws kParameter when the kind-specific fields are inconsistent.
  void validate() const;
};

struct DegradedPair {
  AudioBuffer degraded;
  AudioBuffer reference;
};

struct MixResult {
  AudioBuffer mixture;
  AudioBuffer speech;       // speech component as mixed, after peak rescale
  AudioBuffer noise;        // scaled noise component, after peak rescale
  double noise_gain = 1.0;  // applied to the raw noise segment, before rescale
  double peak_scale = 1.0;  // 1, or 0.99 / peak when the mixture exceeded 1
};

inline constexpr double kMixturePeakTarget = 0.99;
inline constexpr double kNoiseCrossfadeSeconds = 0.010;

// Extracts `length` samples of noise starting at offset_s (wrapped to the
// noise length). Short noise is tiled cyclically, each seam blended with a
// linear crossfade of kNoiseCrossfadeSeconds.
AudioBuffer noise_segment(const AudioBuffer& noise, std::size_t length, double offset_s);

// Scales the noise so that 10 log10(sum s^2 / sum (g n)^2) == snr_db over the
// full speech length. When the mixture's peak exceeds 1 the mixture and both
// components are rescaled together to peak 0.99. Throws kDegenerateSpeech /
// kDegenerateNoise for zero-power inputs, kParameter for rate mismatch.
MixResult mix_noise_at_snr(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db,
                           double offset_s);

struct ReverbOptions {
  // Reference keeps the RIR up to this many ms after the direct path
  // instead of the direct path alone.
  std::optional<double> early_reflections_ms;
};

struct ReverbResult {
  AudioBuffer reverberant;
  AudioBuffer reference;
  std::size_t direct_path_index = 0;
  double direct_path_gain = 0.0;
};

// Convolves with the RIR, drops the samples before the direct path (largest
// |rir|) and truncates to len(speech). The reference is the dry speech
// scaled by the direct-path coefficient.
ReverbResult apply_reverb(const AudioBuffer& speech, const AudioBuffer& rir,
                          const ReverbOptions& options = {});

// Hard clipping at clip_ratio * max|x|.
AudioBuffer apply_clipping(const AudioBuffer& x, double clip_ratio);

// Low-pass at cutoff_hz with a 0.05 * cutoff transition, delay compensated.
// Rate and length are unchanged; a cutoff at Nyquist passes through.
AudioBuffer apply_bandwidth_limitation(const AudioBuffer& x, double cutoff_hz);

struct DegradeOptions {
  ReverbOptions reverb;
  bool reverberate_noise = false;
};

// Composition: reverb (when rir is given), noise at spec.snr_db, then the
// kind-specific distortion on the mixture only. Noise and RIR are resampled
// to the speech rate first. Bitwise deterministic in its inputs.
DegradedPair degrade(const AudioBuffer& speech, const DistortionSpec& spec, const AudioBuffer* rir,
                     const AudioBuffer& noise, const DegradeOptions& options = {});

}  // namespace urgent

#endif  // URGENT_DISTORTION_H_
