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

#include "urgent/metrics.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <utility>

#include "urgent/error.h"
#include "urgent/fft.h"
#include "urgent/resample.h"
#include "urgent/stft.h"

namespace urgent {

namespace {

struct AlignedPair {
  std::vector<double> ref;
  std::vector<double> est;
  int sample_rate_hz;
};

AlignedPair align(const AudioBuffer& reference, const AudioBuffer& estimate) {
  if (reference.sample_rate_hz() != estimate.sample_rate_hz()) {
    throw Error(ErrorCode::kParameter, "reference and estimate sampling rates differ");
  }
  AlignedPair p{{reference.samples().begin(), reference.samples().end()},
                {estimate.samples().begin(), estimate.samples().end()},
                reference.sample_rate_hz()};
  if (p.ref.size() != p.est.size()) {
    spdlog::warn("length mismatch (reference {} vs estimate {} samples); zero-padding the shorter",
                 p.ref.size(), p.est.size());
    const std::size_t n = std::max(p.ref.size(), p.est.size());
    p.ref.resize(n, 0.0);
    p.est.resize(n, 0.0);
  }
  if (p.ref.empty()) throw Error(ErrorCode::kUndefinedMetric, "empty signals");
  return p;
}

// ---- ESTOI ---------------------------------------------------------------

constexpr int kStoiRate = 10000;
constexpr std::size_t kStoiFrame = 256;
constexpr std::size_t kStoiFft = 512;
constexpr std::size_t kStoiHop = 128;
constexpr std::size_t kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr std::size_t kStoiSegment = 30;
constexpr double kStoiDynRange = 40.0;

// Symmetric hann without the zero end points.
std::vector<double> matlab_hanning(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                static_cast<double>(n + 1));
  }
  return w;
}

// Drops frames more than kStoiDynRange below the loudest reference frame
// and overlap-adds what remains.
std::pair<std::vector<double>, std::vector<double>> remove_silent_frames(
    const std::vector<double>& x, const std::vector<double>& y) {
  const auto w = matlab_hanning(kStoiFrame);
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i + kStoiFrame <= x.size(); i += kStoiHop) starts.push_back(i);
  std::vector<double> level(starts.size());
  for (std::size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (std::size_t i = 0; i < kStoiFrame; ++i) {
      const double v = w[i] * x[starts[f] + i];
      e += v * v;
    }
    level[f] = 20.0 * std::log10(std::sqrt(e) + std::numeric_limits<double>::epsilon());
  }
  std::vector<std::size_t> keep;
  if (!level.empty()) {
    const double top = *std::max_element(level.begin(), level.end());
    for (std::size_t f = 0; f < starts.size(); ++f) {
      if (top - kStoiDynRange - level[f] < 0.0) keep.push_back(starts[f]);
    }
  }
  if (keep.empty()) return {};
  const std::size_t out_len = (keep.size() - 1) * kStoiHop + kStoiFrame;
  std::vector<double> xs(out_len, 0.0);
  std::vector<double> ys(out_len, 0.0);
  for (std::size_t f = 0; f < keep.size(); ++f) {
    for (std::size_t i = 0; i < kStoiFrame; ++i) {
      xs[f * kStoiHop + i] += w[i] * x[keep[f] + i];
      ys[f * kStoiHop + i] += w[i] * y[keep[f] + i];
    }
  }
  return {std::move(xs), std::move(ys)};
}

// Band index ranges [lo, hi) of rfft bins for each third-octave band.
std::vector<std::pair<std::size_t, std::size_t>> third_octave_bands() {
  const std::size_t bins = kStoiFft / 2 + 1;
  std::vector<double> f(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    f[k] = static_cast<double>(k) * kStoiRate / static_cast<double>(kStoiFft);
  }
  auto nearest = [&](double target) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < bins; ++k) {
      if ((f[k] - target) * (f[k] - target) < (f[best] - target) * (f[best] - target)) best = k;
    }
    return best;
  };
  std::vector<std::pair<std::size_t, std::size_t>> bands;
  for (std::size_t j = 0; j < kStoiBands; ++j) {
    const double k = static_cast<double>(j);
    const double lo = kStoiMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0);
    const double hi = kStoiMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0);
    bands.emplace_back(nearest(lo), nearest(hi));
  }
  return bands;
}

// J x T matrix (row-major) of third-octave band amplitudes.
std::vector<double> band_envelopes(const std::vector<double>& x, std::size_t& frames) {
  const auto w = matlab_hanning(kStoiFrame);
  const auto bands = third_octave_bands();
  frames = 0;
  for (std::size_t i = 0; i + kStoiFrame < x.size(); i += kStoiHop) ++frames;
  std::vector<double> env(kStoiBands * frames);
  RealFft fft(kStoiFft);
  std::vector<double> buf(kStoiFrame);
  std::vector<std::complex<double>> spec(fft.num_bins());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < kStoiFrame; ++i) buf[i] = w[i] * x[t * kStoiHop + i];
    fft.forward(buf, spec);
    for (std::size_t j = 0; j < kStoiBands; ++j) {
      double e = 0.0;
      for (std::size_t k = bands[j].first; k < bands[j].second; ++k) e += std::norm(spec[k]);
      env[j * frames + t] = std::sqrt(e);
    }
  }
  return env;
}

void normalize_segment(std::vector<double>& seg) {
  constexpr std::size_t J = kStoiBands;
  constexpr std::size_t N = kStoiSegment;
  auto unit = [](double norm) { return norm > 0.0 ? 1.0 / norm : 0.0; };
  for (std::size_t j = 0; j < J; ++j) {
    double* row = seg.data() + j * N;
    const double mean = std::accumulate(row, row + N, 0.0) / N;
    double ss = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      row[n] -= mean;
      ss += row[n] * row[n];
    }
    const double s = unit(std::sqrt(ss));
    for (std::size_t n = 0; n < N; ++n) row[n] *= s;
  }
  for (std::size_t n = 0; n < N; ++n) {
    double mean = 0.0;
    for (std::size_t j = 0; j < J; ++j) mean += seg[j * N + n];
    mean /= J;
    double ss = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      seg[j * N + n] -= mean;
      ss += seg[j * N + n] * seg[j * N + n];
    }
    const double s = unit(std::sqrt(ss));
    for (std::size_t j = 0; j < J; ++j) seg[j * N + n] *= s;
  }
}

// ---- MCD -----------------------------------------------------------------

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// ---- shared --------------------------------------------------------------

std::vector<double> magnitudes(const Spectrogram& s) {
  std::vector<double> m(s.data.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(s.data[i]);
  return m;
}

}  // namespace

double sdr(const AudioBuffer& reference, const AudioBuffer& estimate) {
  const auto p = align(reference, estimate);
  double e_ref = 0.0;
  double e_res = 0.0;
  for (std::size_t i = 0; i < p.ref.size(); ++i) {
    const double d = p.ref[i] - p.est[i];
    e_ref += p.ref[i] * p.ref[i];
    e_res += d * d;
  }
  if (!(e_ref > 0.0)) throw Error(ErrorCode::kUndefinedMetric, "SDR is undefined for a silent reference");
  if (e_res <= 1e-12 * e_ref) return kSdrCapDb;
  return std::min(kSdrCapDb, 10.0 * std::log10(e_ref / e_res));
}

double estoi(const AudioBuffer& reference, const AudioBuffer& estimate) {
  const auto p = align(reference, estimate);
  std::vector<double> x = p.ref;
  std::vector<double> y = p.est;
  if (p.sample_rate_hz != kStoiRate) {
    const Resampler r(p.sample_rate_hz, kStoiRate);
    x = r.process(x);
    y = r.process(y);
  }
  auto [xs, ys] = remove_silent_frames(x, y);
  std::size_t frames = 0;
  const auto xe = band_envelopes(xs, frames);
  std::size_t frames_y = 0;
  const auto ye = band_envelopes(ys, frames_y);
  if (frames < kStoiSegment) {
    throw Error(ErrorCode::kDuration,
                "ESTOI needs at least 30 frames (~384 ms) of non-silent reference speech");
  }

  constexpr std::size_t J = kStoiBands;
  constexpr std::size_t N = kStoiSegment;
  std::vector<double> xseg(J * N);
  std::vector<double> yseg(J * N);
  double total = 0.0;
  const std::size_t segments = frames - N + 1;
  for (std::size_t m = 0; m < segments; ++m) {
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t n = 0; n < N; ++n) {
        xseg[j * N + n] = xe[j * frames + m + n];
        yseg[j * N + n] = ye[j * frames + m + n];
      }
    }
    normalize_segment(xseg);
    normalize_segment(yseg);
    total += std::inner_product(xseg.begin(), xseg.end(), yseg.begin(), 0.0) / N;
  }
  return total / static_cast<double>(segments);
}

std::size_t mcd_fft_size(int sample_rate_hz) {
  const auto frame = static_cast<std::size_t>(std::llround(0.025 * sample_rate_hz));
  return std::bit_ceil(4 * std::max<std::size_t>(frame, 1));
}

std::vector<double> mel_filterbank(int sample_rate_hz, std::size_t n_fft) {
  const std::size_t bins = n_fft / 2 + 1;
  const double top = hz_to_mel(sample_rate_hz / 2.0);
  std::vector<double> edges(kMelBands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(kMelBands + 1));
  }
  std::vector<double> fb(kMelBands * bins, 0.0);
  for (std::size_t m = 0; m < kMelBands; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb[m * bins + k] = w;
    }
  }
  return fb;
}

std::vector<MelCepstrum> mel_cepstra(const AudioBuffer& x) {
  const int sf = x.sample_rate_hz();
  const auto frame = static_cast<std::size_t>(std::llround(0.025 * sf));
  const auto hop = static_cast<std::size_t>(std::llround(0.010 * sf));
  const std::size_t n_fft = mcd_fft_size(sf);
  const std::size_t bins = n_fft / 2 + 1;
  const auto fb = mel_filterbank(sf, n_fft);
  const auto window = make_window(WindowFunction::kHann, frame);

  const auto s = x.samples();
  const std::size_t frames = s.size() >= frame ? 1 + (s.size() - frame) / hop : 1;
  RealFft fft(n_fft);
  std::vector<double> buf(frame);
  std::vector<std::complex<double>> spec(bins);
  std::vector<double> logmel(kMelBands);
  std::vector<MelCepstrum> out(frames);
  const double norm0 = std::sqrt(2.0 / static_cast<double>(kMelBands));
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t i = 0; i < frame; ++i) {
      const std::size_t idx = t * hop + i;
      buf[i] = idx < s.size() ? s[idx] * window[i] : 0.0;
    }
    fft.forward(buf, spec);
    for (std::size_t m = 0; m < kMelBands; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += fb[m * bins + k] * std::norm(spec[k]);
      logmel[m] = std::log(std::max(e, kLogPowerFloor));
    }
    for (std::size_t d = 1; d <= kCepstralOrder; ++d) {
      double c = 0.0;
      for (std::size_t m = 0; m < kMelBands; ++m) {
        c += logmel[m] * std::cos(std::numbers::pi * static_cast<double>(d) *
                                  (static_cast<double>(m) + 0.5) / static_cast<double>(kMelBands));
      }
      out[t][d - 1] = norm0 * c;
    }
  }
  return out;
}

double mcd_from_cepstra(std::span<const MelCepstrum> reference, std::span<const MelCepstrum> estimate) {
  if (reference.size() != estimate.size() || reference.empty()) {
    throw Error(ErrorCode::kParameter, "cepstral sequences must be non-empty and of equal length");
  }
  const double k = 10.0 / std::numbers::ln10;
  double total = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    double ss = 0.0;
    for (std::size_t d = 0; d < kCepstralOrder; ++d) {
      const double diff = reference[t][d] - estimate[t][d];
      ss += diff * diff;
    }
    total += k * std::sqrt(2.0 * ss);
  }
  return total / static_cast<double>(reference.size());
}

double mcd(const AudioBuffer& reference, const AudioBuffer& estimate) {
  const auto p = align(reference, estimate);
  const auto rc = mel_cepstra(AudioBuffer(p.ref, p.sample_rate_hz));
  const auto ec = mel_cepstra(AudioBuffer(p.est, p.sample_rate_hz));
  return mcd_from_cepstra(rc, ec);
}

double lsd(const AudioBuffer& reference, const AudioBuffer& estimate) {
  const auto p = align(reference, estimate);
  StftParams params;
  params.n_fft = p.sample_rate_hz >= 32000 ? 2048 : 1024;
  params.hop = params.n_fft / 4;
  params.window = WindowFunction::kHann;
  params.center = true;
  const auto rs = stft(p.ref, p.sample_rate_hz, params);
  const auto es = stft(p.est, p.sample_rate_hz, params);
  double total = 0.0;
  for (std::size_t t = 0; t < rs.num_frames; ++t) {
    const auto a = rs.frame(t);
    const auto b = es.frame(t);
    double ss = 0.0;
    for (std::size_t k = 0; k < rs.num_bins; ++k) {
      const double d = 10.0 * std::log10((std::norm(a[k]) + kLogPowerFloor) /
                                         (std::norm(b[k]) + kLogPowerFloor));
      ss += d * d;
    }
    total += std::sqrt(ss / static_cast<double>(rs.num_bins));
  }
  return total / static_cast<double>(rs.num_frames);
}

double multires_l1_loss(const AudioBuffer& reference, const AudioBuffer& estimate) {
  const auto p = align(reference, estimate);
  double time_term = 0.0;
  for (std::size_t i = 0; i < p.ref.size(); ++i) time_term += std::abs(p.ref[i] - p.est[i]);
  time_term /= static_cast<double>(p.ref.size());

  double spec_term = 0.0;
  for (std::size_t w : kMultiResolutionWindows) {
    StftParams params{w, w / 2, WindowFunction::kHann, true};
    const auto a = magnitudes(stft(p.ref, p.sample_rate_hz, params));
    const auto b = magnitudes(stft(p.est, p.sample_rate_hz, params));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    spec_term += acc / static_cast<double>(a.size());
  }
  return time_term + spec_term / static_cast<double>(kMultiResolutionWindows.size());
}

double compute_metric(Metric metric, const AudioBuffer& reference, const AudioBuffer& estimate) {
  switch (metric) {
    case Metric::kSdr: return sdr(reference, estimate);
    case Metric::kEstoi: return estoi(reference, estimate);
    case Metric::kMcd: return mcd(reference, estimate);
    case Metric::kLsd: return lsd(reference, estimate);
    case Metric::kMultiresL1: return multires_l1_loss(reference, estimate);
  }
  throw Error(ErrorCode::kInternal, "unknown metric");
}

}  // namespace urgent
