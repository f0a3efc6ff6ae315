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

#include "urgent/resample.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "urgent/error.h"

namespace urgent {

namespace {

constexpr double kRolloff = 1.0 - kResamplerPassbandFraction;
constexpr double kHalfWidth = 256.0;   // lower-rate samples on each side
constexpr double kWindowBeta = 8.0;
constexpr int kMaxTabulatedPhases = 4096;

// Root-raised-cosine pulse with unit symbol period and unity DC gain.
double root_raised_cosine(double t) {
  constexpr double b = kRolloff;
  constexpr double pi = std::numbers::pi;
  if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / pi;
  const double q = 4.0 * b * t;
  if (std::abs(1.0 - q * q) < 1e-10) {
    return b / std::numbers::sqrt2 *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
  }
  return (std::sin(pi * t * (1.0 - b)) + q * std::cos(pi * t * (1.0 + b))) /
         (pi * t * (1.0 - q * q));
}

double prototype(double t) {
  if (std::abs(t) >= kHalfWidth) return 0.0;
  static const double norm = std::cyl_bessel_i(0.0, kWindowBeta);
  const double r = t / kHalfWidth;
  return root_raised_cosine(t) * std::cyl_bessel_i(0.0, kWindowBeta * std::sqrt(1.0 - r * r)) / norm;
}

}  // namespace

Resampler::Resampler(int source_sf, int target_sf)
    : source_sf_(source_sf), target_sf_(target_sf) {
  if (source_sf <= 0 || target_sf <= 0) {
    throw Error(ErrorCode::kParameter, "resampling rates must be positive");
  }
  const int g = std::gcd(source_sf, target_sf);
  up_ = target_sf / g;
  down_ = source_sf / g;
  scale_ = std::min(1.0, static_cast<double>(target_sf) / source_sf);
  const auto reach = static_cast<long>(std::floor(kHalfWidth / scale_));
  first_offset_ = -reach;
  taps_per_phase_ = static_cast<std::size_t>(2 * reach + 2);
  if (up_ <= kMaxTabulatedPhases) {
    table_.resize(static_cast<std::size_t>(up_) * taps_per_phase_);
    for (int p = 0; p < up_; ++p) {
      for (std::size_t j = 0; j < taps_per_phase_; ++j) {
        table_[p * taps_per_phase_ + j] = tap(p, first_offset_ + static_cast<long>(j));
      }
    }
  }
}

double Resampler::tap(int phase, long offset) const {
  const double tau = static_cast<double>(phase) / up_ - static_cast<double>(offset);
  return scale_ * prototype(tau * scale_);
}

std::size_t Resampler::output_length(std::size_t input_length) const {
  // round(n * target / source), halves away from zero
  const auto num = static_cast<unsigned __int128>(input_length) * static_cast<unsigned>(target_sf_);
  const auto den = static_cast<unsigned __int128>(source_sf_);
  return static_cast<std::size_t>((2 * num + den) / (2 * den));
}

std::vector<double> Resampler::process(std::span<const double> x) const {
  const std::size_t n_out = output_length(x.size());
  std::vector<double> y(n_out, 0.0);
  const auto n_in = static_cast<long>(x.size());
  std::vector<double> scratch;
  if (table_.empty()) scratch.resize(taps_per_phase_);
  for (std::size_t m = 0; m < n_out; ++m) {
    const auto pos = static_cast<unsigned long long>(m) * static_cast<unsigned long long>(down_);
    const auto base = static_cast<long>(pos / static_cast<unsigned long long>(up_));
    const auto phase = static_cast<int>(pos % static_cast<unsigned long long>(up_));
    const double* taps;
    if (table_.empty()) {
      for (std::size_t j = 0; j < taps_per_phase_; ++j) {
        scratch[j] = tap(phase, first_offset_ + static_cast<long>(j));
      }
      taps = scratch.data();
    } else {
      taps = table_.data() + static_cast<std::size_t>(phase) * taps_per_phase_;
    }
    const long lo = std::max(0L, base + first_offset_);
    const long hi = std::min(n_in - 1, base + first_offset_ + static_cast<long>(taps_per_phase_) - 1);
    double acc = 0.0;
    for (long n = lo; n <= hi; ++n) acc += x[static_cast<std::size_t>(n)] * taps[n - base - first_offset_];
    y[m] = acc;
  }
  return y;
}

AudioBuffer resample(const AudioBuffer& x, int target_sf) {
  if (target_sf <= 0) {
    throw Error(ErrorCode::kParameter, "target rate must be positive, got " + std::to_string(target_sf));
  }
  if (target_sf == x.sample_rate_hz()) return x;
  if (x.empty()) return AudioBuffer(target_sf);
  const Resampler r(x.sample_rate_hz(), target_sf);
  return AudioBuffer(r.process(x.samples()), target_sf);
}

}  // namespace urgent
