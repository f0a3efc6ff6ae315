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

#include "urgent/distortion.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "urgent/error.h"
#include "urgent/fir.h"
#include "urgent/resample.h"

namespace urgent {

namespace {

double energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

void scale_in_place(AudioBuffer& x, double g) {
  for (double& v : x.mutable_samples()) v *= g;
}

void require_same_rate(const AudioBuffer& a, const AudioBuffer& b, const char* what) {
  if (a.sample_rate_hz() != b.sample_rate_hz()) {
    throw Error(ErrorCode::kParameter,
                std::string(what) + ": sampling rates differ (" + std::to_string(a.sample_rate_hz()) +
                    " vs " + std::to_string(b.sample_rate_hz()) + ")");
  }
}

}  // namespace

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kNone: return "none";
    case DistortionKind::kBandwidthLimitation: return "bandwidth_limitation";
    case DistortionKind::kClipping: return "clipping";
  }
  return "none";
}

DistortionKind parse_distortion_kind(std::string_view name) {
  if (name == "none") return DistortionKind::kNone;
  if (name == "bandwidth_limitation") return DistortionKind::kBandwidthLimitation;
  if (name == "clipping") return DistortionKind::kClipping;
  throw Error(ErrorCode::kConfig, "unknown distortion kind '" + std::string(name) + "'");
}

void DistortionSpec::validate() const {
  if (!std::isfinite(snr_db)) throw Error(ErrorCode::kParameter, "snr_db must be finite");
  if (!std::isfinite(noise_offset_s)) throw Error(ErrorCode::kParameter, "noise offset must be finite");
  switch (kind) {
    case DistortionKind::kNone:
      if (cutoff_hz || clip_ratio) {
        throw Error(ErrorCode::kParameter, "kind 'none' takes neither cutoff_hz nor clip_ratio");
      }
      break;
    case DistortionKind::kBandwidthLimitation:
      if (!cutoff_hz || clip_ratio || !(*cutoff_hz > 0.0)) {
        throw Error(ErrorCode::kParameter,
                    "bandwidth_limitation requires a positive cutoff_hz and no clip_ratio");
      }
      break;
    case DistortionKind::kClipping:
      if (!clip_ratio || cutoff_hz || !(*clip_ratio > 0.0 && *clip_ratio <= 1.0)) {
        throw Error(ErrorCode::kParameter, "clipping requires clip_ratio in (0, 1] and no cutoff_hz");
      }
      break;
  }
}

AudioBuffer noise_segment(const AudioBuffer& noise, std::size_t length, double offset_s) {
  const std::size_t n = noise.size();
  if (n == 0) throw Error(ErrorCode::kDegenerateNoise, "noise signal is empty");
  const auto s = noise.samples();
  auto offset = static_cast<long long>(std::llround(offset_s * noise.sample_rate_hz()));
  offset %= static_cast<long long>(n);
  if (offset < 0) offset += static_cast<long long>(n);
  const auto start = static_cast<std::size_t>(offset);

  std::vector<double> out;
  out.reserve(length + n);
  if (n - start >= length) {
    out.assign(s.begin() + static_cast<long>(start), s.begin() + static_cast<long>(start + length));
    return AudioBuffer(std::move(out), noise.sample_rate_hz());
  }

  const auto fade_nominal = static_cast<std::size_t>(
      std::llround(kNoiseCrossfadeSeconds * noise.sample_rate_hz()));
  out.assign(s.begin() + static_cast<long>(start), s.end());
  while (out.size() < length) {
    const std::size_t fade = std::min({fade_nominal, n / 2, out.size()});
    const std::size_t base = out.size() - fade;
    for (std::size_t i = 0; i < fade; ++i) {
      const double r = static_cast<double>(i + 1) / static_cast<double>(fade + 1);
      out[base + i] = out[base + i] * (1.0 - r) + s[i] * r;
    }
    out.insert(out.end(), s.begin() + static_cast<long>(fade), s.end());
  }
  out.resize(length);
  return AudioBuffer(std::move(out), noise.sample_rate_hz());
}

MixResult mix_noise_at_snr(const AudioBuffer& speech, const AudioBuffer& noise, double snr_db,
                           double offset_s) {
  require_same_rate(speech, noise, "mix_noise_at_snr");
  if (!std::isfinite(snr_db)) throw Error(ErrorCode::kParameter, "snr_db must be finite");
  const double speech_power = energy(speech.samples());
  if (!(speech_power > 0.0)) throw Error(ErrorCode::kDegenerateSpeech, "speech has zero power");
  AudioBuffer segment = noise_segment(noise, speech.size(), offset_s);
  const double noise_power = energy(segment.samples());
  if (!(noise_power > 0.0)) throw Error(ErrorCode::kDegenerateNoise, "noise segment has zero power");

  const double gain = std::sqrt(speech_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
  scale_in_place(segment, gain);

  std::vector<double> mix(speech.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix[i] = speech[i] + segment[i];
    peak = std::max(peak, std::abs(mix[i]));
  }
  MixResult result{AudioBuffer(std::move(mix), speech.sample_rate_hz()), speech, std::move(segment),
                   gain, 1.0};
  if (peak > 1.0) {
    result.peak_scale = kMixturePeakTarget / peak;
    scale_in_place(result.mixture, result.peak_scale);
    scale_in_place(result.speech, result.peak_scale);
    scale_in_place(result.noise, result.peak_scale);
  }
  return result;
}

ReverbResult apply_reverb(const AudioBuffer& speech, const AudioBuffer& rir,
                          const ReverbOptions& options) {
  require_same_rate(speech, rir, "apply_reverb");
  const auto h = rir.samples();
  std::size_t direct = 0;
  double direct_abs = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (std::abs(h[i]) > direct_abs) {
      direct_abs = std::abs(h[i]);
      direct = i;
    }
  }
  if (!(direct_abs > 0.0)) throw Error(ErrorCode::kDegenerateRir, "room impulse response is all zero");

  const auto full = convolve_full(speech.samples(), h);
  std::vector<double> wet(speech.size(), 0.0);
  for (std::size_t i = 0; i < wet.size() && i + direct < full.size(); ++i) wet[i] = full[i + direct];

  ReverbResult result{AudioBuffer(std::move(wet), speech.sample_rate_hz()), speech, direct, h[direct]};
  if (options.early_reflections_ms) {
    const auto extra = static_cast<std::size_t>(
        std::llround(*options.early_reflections_ms * 1e-3 * speech.sample_rate_hz()));
    const std::size_t end = std::min(h.size(), direct + extra + 1);
    const auto early = convolve_full(speech.samples(), h.subspan(direct, end - direct));
    std::vector<double> ref(early.begin(), early.begin() + static_cast<long>(speech.size()));
    result.reference = AudioBuffer(std::move(ref), speech.sample_rate_hz());
  } else {
    scale_in_place(result.reference, h[direct]);
  }
  return result;
}

AudioBuffer apply_clipping(const AudioBuffer& x, double clip_ratio) {
  if (!(clip_ratio > 0.0 && clip_ratio <= 1.0)) {
    throw Error(ErrorCode::kParameter, "clip_ratio must lie in (0, 1]");
  }
  double peak = 0.0;
  for (double v : x.samples()) peak = std::max(peak, std::abs(v));
  const double c = clip_ratio * peak;
  if (c == 0.0) return x;
  AudioBuffer out = x;
  for (double& v : out.mutable_samples()) v = std::min(std::max(v, -c), c);
  return out;
}

AudioBuffer apply_bandwidth_limitation(const AudioBuffer& x, double cutoff_hz) {
  const double nyquist = x.sample_rate_hz() / 2.0;
  if (!(cutoff_hz > 0.0) || cutoff_hz > nyquist) {
    throw Error(ErrorCode::kParameter, "bandwidth-limitation cutoff must lie in (0, Nyquist]");
  }
  if (cutoff_hz == nyquist || x.empty()) return x;
  const double transition = std::min(0.05 * cutoff_hz, nyquist - cutoff_hz);
  const FirFilter lp = design_lowpass(cutoff_hz, x.sample_rate_hz(), transition);
  return convolve(x, lp.taps, ConvolveMode::kSameDelayCompensated);
}

DegradedPair degrade(const AudioBuffer& speech, const DistortionSpec& spec, const AudioBuffer* rir,
                     const AudioBuffer& noise, const DegradeOptions& options) {
  spec.validate();
  const int sf = speech.sample_rate_hz();
  const AudioBuffer noise_at_sf = resample(noise, sf);

  AudioBuffer component = speech;
  AudioBuffer reference = speech;
  std::optional<AudioBuffer> rir_at_sf;
  if (rir != nullptr) {
    rir_at_sf = resample(*rir, sf);
    ReverbResult rev = apply_reverb(speech, *rir_at_sf, options.reverb);
    component = std::move(rev.reverberant);
    reference = std::move(rev.reference);
  }

  MixResult mixed = [&] {
    if (options.reverberate_noise && rir_at_sf) {
      AudioBuffer seg = noise_segment(noise_at_sf, speech.size(), spec.noise_offset_s);
      AudioBuffer wet_noise = apply_reverb(seg, *rir_at_sf).reverberant;
      return mix_noise_at_snr(component, wet_noise, spec.snr_db, 0.0);
    }
    return mix_noise_at_snr(component, noise_at_sf, spec.snr_db, spec.noise_offset_s);
  }();
  scale_in_place(reference, mixed.peak_scale);

  AudioBuffer degraded = std::move(mixed.mixture);
  switch (spec.kind) {
    case DistortionKind::kNone:
      break;
    case DistortionKind::kClipping:
      degraded = apply_clipping(degraded, *spec.clip_ratio);
      break;
    case DistortionKind::kBandwidthLimitation:
      degraded = apply_bandwidth_limitation(degraded, *spec.cutoff_hz);
      break;
  }
  if (degraded.sample_rate_hz() != reference.sample_rate_hz() || degraded.size() != reference.size()) {
    throw Error(ErrorCode::kInternal, "degraded and reference signals are misaligned");
  }
  return {std::move(degraded), std::move(reference)};
}

}  // namespace urgent
