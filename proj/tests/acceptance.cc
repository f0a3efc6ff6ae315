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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below and do not come from the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "support.h"
#include "urgent/bandwidth.h"
#include "urgent/distortion.h"
#include "urgent/fir.h"
#include "urgent/manifest.h"
#include "urgent/metrics.h"
#include "urgent/simulate.h"
#include "urgent/stft.h"

using namespace urgent;
namespace ut = urgent::testing;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kDeterminismEntries = 200;
constexpr double kDeterminismChunkS = 4.0;
constexpr double kRuntimeTargetS = 60.0;
constexpr std::size_t kSnrPairs = 100;
constexpr double kSnrTolDb = 1e-6;
constexpr double kRoundTripTol = 1e-6;
constexpr double kMinStopbandDb = 60.0;
constexpr double kMaxPassbandRippleDb = 0.1;
constexpr std::size_t kIdentityBuffers = 50;
constexpr double kEstoiIdentityTol = 1e-6;
constexpr double kLsdTarget = 10.0;
constexpr double kLsdTol = 1e-3;
constexpr double kSdrTarget = 20.0;
constexpr double kSdrTol = 0.05;
constexpr double kMcdGainTol = 1e-6;
constexpr double kReverbTol = 1e-10;
constexpr double kOutOfBandMax = 1e-6;
constexpr std::size_t kStatEntries = 10000;
constexpr double kReverbFracLo = 0.47;
constexpr double kReverbFracHi = 0.53;
constexpr double kSnrMeanTarget = 7.5;
constexpr double kSnrMeanTol = 0.5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double snr_db(std::span<const double> s, std::span<const double> n) {
  return 10.0 * std::log10(ut::energy(s) / ut::energy(n));
}

AudioBuffer scaled(const AudioBuffer& x, double g) {
  std::vector<double> s(x.samples().begin(), x.samples().end());
  for (double& v : s) v *= g;
  return AudioBuffer(std::move(s), x.sample_rate_hz());
}

// Exponentially decaying noise tail behind a unit direct path.
std::vector<double> synthetic_rir(int sf, double seconds, std::size_t pre_delay, std::uint64_t seed) {
  auto h = ut::white_noise(static_cast<std::size_t>(seconds * sf), seed, 0.2);
  const double tau = 0.08 * sf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = i < pre_delay ? 0.0 : h[i] * std::exp(-static_cast<double>(i - pre_delay) / tau);
  }
  h[pre_delay] = 1.0;
  return h;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome determinism() {
  ut::TempDir dir;
  std::vector<std::string> speech;
  std::vector<std::string> noise;
  std::vector<std::string> rir;
  const int speech_sfs[] = {8000, 16000, 22050, 24000, 32000, 44100, 48000, 48000};
  for (std::size_t i = 0; i < std::size(speech_sfs); ++i) {
    const int sf = speech_sfs[i];
    const auto p = dir / fmt::format("speech{}.wav", i);
    save_wav(AudioBuffer(ut::tone_complex(sf, 5 * static_cast<std::size_t>(sf), i), sf), p, WavEncoding::kPcm16);
    speech.push_back(p.string());
  }
  for (int k = 0; k < 4; ++k) {
    const int sf = k % 2 == 0 ? 16000 : 48000;
    const auto p = dir / fmt::format("noise{}.wav", k);
    save_wav(ut::noise_buffer(6 * static_cast<std::size_t>(sf), sf, 50 + k, 0.1), p, WavEncoding::kFloat32);
    noise.push_back(p.string());
  }
  for (int k = 0; k < 3; ++k) {
    const int sf = k == 0 ? 16000 : 48000;
    const auto p = dir / fmt::format("rir{}.wav", k);
    save_wav(AudioBuffer(synthetic_rir(sf, 0.4, 10 * (k + 1), 70 + k), sf), p, WavEncoding::kFloat32);
    rir.push_back(p.string());
  }

  SimulationConfig cfg;
  cfg.master_seed = 20240917;
  cfg.chunk_duration_s = kDeterminismChunkS;
  const SourceCatalog catalog = probe_sources(speech, noise, rir);
  const Manifest m1 = generate_manifest(catalog, cfg, kDeterminismEntries);
  const Manifest m2 = generate_manifest(probe_sources(speech, noise, rir), cfg, kDeterminismEntries);
  const std::string text = serialize_manifest(m1);
  const bool manifests_equal = text == serialize_manifest(m2) && serialize_manifest(parse_manifest(text)) == text;

  SimulationOptions options;
  options.chunk_duration_s = kDeterminismChunkS;
  auto t0 = std::chrono::steady_clock::now();
  const SimulationReport r1 = run_manifest(m1, dir / "w1", 1, options);
  const double t1 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const SimulationReport r8 = run_manifest(m1, dir / "w8", 8, options);
  const double t8 = seconds_since(t0);

  const auto tree1 = ut::read_tree(dir / "w1");
  const auto tree8 = ut::read_tree(dir / "w8");
  const bool trees_equal = tree1 == tree8 && format_report_tsv(r1) == format_report_tsv(r8);
  const bool all_ok = r1.failed() == 0 && r8.failed() == 0;
  const bool fast = t1 <= kRuntimeTargetS;
  return {manifests_equal && trees_equal && all_ok && tree1.size() == 2 * kDeterminismEntries && fast,
          fmt::format("{} entries, {} files, trees {}, manifests {}, failures {}, "
                      "workers=1 {:.1f} s, workers=8 {:.1f} s (target <= {:.0f} s)",
                      kDeterminismEntries, tree1.size(), trees_equal ? "identical" : "DIFFER",
                      manifests_equal ? "identical" : "DIFFER", r1.failed() + r8.failed(), t1, t8,
                      kRuntimeTargetS)};
}

Outcome snr_fidelity() {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> target(-5.0, 20.0);
  std::uniform_real_distribution<double> level(0.01, 0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < kSnrPairs; ++i) {
    const int sf = kSupportedSampleRates[i % kSupportedSampleRates.size()];
    const double snr = target(gen);
    const AudioBuffer speech(ut::tone_complex(sf, static_cast<std::size_t>(sf), 1000 + i), sf);
    const AudioBuffer noise = ut::noise_buffer(static_cast<std::size_t>(1.5 * sf), sf, 2000 + i, level(gen));
    const MixResult m = mix_noise_at_snr(speech, noise, snr, 0.01 * static_cast<double>(i));
    std::vector<double> residual(m.mixture.size());
    for (std::size_t k = 0; k < residual.size(); ++k) residual[k] = m.mixture[k] - m.speech[k];
    worst = std::max(worst, std::abs(snr_db(m.speech.samples(), m.noise.samples()) - snr));
    worst = std::max(worst, std::abs(snr_db(m.speech.samples(), residual) - snr));
  }
  return {worst <= kSnrTolDb, fmt::format("{} pairs, worst |error| {:.3g} dB (tol {:g})", kSnrPairs, worst, kSnrTolDb)};
}

Outcome sfi_round_trip() {
  const SfiStftConfig cfg;
  double worst = 0.0;
  for (int sf : kSupportedSampleRates) {
    const AudioBuffer x = ut::noise_buffer(static_cast<std::size_t>(1.3 * sf) + 7, sf, static_cast<std::uint64_t>(sf), 0.3);
    const AudioBuffer y = sfi_istft(sfi_stft(x, cfg), cfg, x.size());
    worst = std::max(worst, ut::max_abs_diff(x.samples(), y.samples()));
  }
  return {worst <= kRoundTripTol, fmt::format("7 rates, worst max-abs error {:.3g} (tol {:g})", worst, kRoundTripTol)};
}

Outcome bandwidth_pipeline() {
  const double cutoffs[] = {3500.0, 7000.0, 10000.0, 11500.0, 15000.0, 21000.0, 23000.0};
  int correct = 0;
  std::string got;
  for (std::size_t i = 0; i < std::size(cutoffs); ++i) {
    const AudioBuffer noise = ut::noise_buffer(96000, 48000, 300 + i, 0.3);
    const FirFilter f = design_lowpass(cutoffs[i], 48000, 200.0);
    const AudioBuffer x = convolve(noise, f.taps, ConvolveMode::kSameDelayCompensated);
    const int sf = normalize_to_effective_sf(x).sample_rate_hz();
    correct += sf == kSupportedSampleRates[i] ? 1 : 0;
    got += (got.empty() ? "" : " ") + std::to_string(sf);
  }
  return {correct == 7, fmt::format("{}/7 correct, rates {}", correct, got)};
}

// The cutoffs the simulator can draw for a given output rate, with the
// transition width it uses for them.
std::vector<std::pair<double, double>> simulator_filters(int output_sf) {
  std::vector<std::pair<double, double>> out;
  for (int a : kSupportedSampleRates) {
    if (a >= output_sf) continue;
    const double c = a / 2.0;
    out.emplace_back(c, std::min(0.05 * c, output_sf / 2.0 - c));
  }
  return out;
}

Outcome filter_specs() {
  double worst_stop = INFINITY;
  double worst_ripple = 0.0;
  int count = 0;
  for (int sf : kSupportedSampleRates) {
    for (const auto& [c, t] : simulator_filters(sf)) {
      const FirFilter f = design_lowpass(c, sf, t);
      const double dc = ut::response_db(f.taps, 0.0, sf);
      worst_ripple = std::max(worst_ripple, std::abs(ut::response_db(f.taps, c / 2.0, sf) - dc));
      const double lo = c + t;
      const double hi = sf / 2.0;
      constexpr int kGrid = 256;
      for (int g = 0; g <= kGrid; ++g) {
        const double freq = lo + (hi - lo) * g / kGrid;
        worst_stop = std::min(worst_stop, dc - ut::response_db(f.taps, freq, sf));
      }
      ++count;
    }
  }
  return {count > 0 && worst_stop >= kMinStopbandDb && worst_ripple <= kMaxPassbandRippleDb,
          fmt::format("{} filters, worst stopband {:.1f} dB (min {:g}), worst ripple at cutoff/2 {:.2g} dB (max {:g})",
                      count, worst_stop, kMinStopbandDb, worst_ripple, kMaxPassbandRippleDb)};
}

Outcome metric_identities() {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> level(0.02, 0.6);
  int bad = 0;
  double worst_estoi = 0.0;
  for (std::size_t i = 0; i < kIdentityBuffers; ++i) {
    const int sf = kSupportedSampleRates[i % kSupportedSampleRates.size()];
    const std::size_t n = static_cast<std::size_t>((1.0 + 0.02 * static_cast<double>(i)) * sf);
    const AudioBuffer x = i % 2 == 0 ? scaled(AudioBuffer(ut::tone_complex(sf, n, 500 + i), sf), level(gen) / 0.3)
                                     : ut::noise_buffer(n, sf, 600 + i, level(gen));
    const double e = std::abs(estoi(x, x) - 1.0);
    worst_estoi = std::max(worst_estoi, e);
    if (e > kEstoiIdentityTol || mcd(x, x) != 0.0 || lsd(x, x) != 0.0 || sdr(x, x) != kSdrCapDb) ++bad;
  }

  const AudioBuffer speech(ut::tone_complex(16000, 48000, 31), 16000);
  const AudioBuffer noise = ut::noise_buffer(48000, 16000, 32);
  std::vector<std::array<double, 3>> trend;
  bool monotone = true;
  for (double snr : {0.0, 5.0, 10.0, 15.0}) {
    const AudioBuffer noisy = mix_noise_at_snr(speech, noise, snr, 0.0).mixture;
    trend.push_back({sdr(speech, noisy), estoi(speech, noisy), lsd(speech, noisy)});
    if (trend.size() > 1) {
      const auto& a = trend[trend.size() - 2];
      const auto& b = trend.back();
      monotone = monotone && b[0] > a[0] && b[1] > a[1] && b[2] < a[2];
    }
  }
  std::string estoi_trend;
  for (const auto& t : trend) estoi_trend += fmt::format("{}{:.3f}", estoi_trend.empty() ? "" : " -> ", t[1]);
  return {bad == 0 && monotone,
          fmt::format("{}/{} buffers exact, worst |estoi-1| {:.2g}; trends {}, ESTOI {}", kIdentityBuffers - bad,
                      kIdentityBuffers, worst_estoi, monotone ? "monotone" : "NOT monotone", estoi_trend)};
}

Outcome analytic_metrics() {
  const AudioBuffer x = ut::noise_buffer(48000, 48000, 41, 0.3);
  const double l = lsd(x, scaled(x, std::sqrt(10.0)));

  const AudioBuffer ref(ut::tone_complex(16000, 32000, 42), 16000);
  auto w = ut::white_noise(ref.size(), 43);
  double dot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * ref[i];
  const double proj = dot / ut::energy(ref.samples());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * ref[i];
  const double g = std::sqrt(ut::energy(ref.samples()) / 100.0 / ut::energy(w));
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < est.size(); ++i) est[i] = ref[i] + g * w[i];
  const double s = sdr(ref, AudioBuffer(est, 16000));

  const AudioBuffer y = ut::noise_buffer(24000, 24000, 44, 0.2);
  double m = 0.0;
  for (double gain : {0.05, 0.5, 4.0}) m = std::max(m, mcd(y, scaled(y, gain)));

  const bool ok = std::abs(l - kLsdTarget) <= kLsdTol && std::abs(s - kSdrTarget) <= kSdrTol && m <= kMcdGainTol;
  return {ok, fmt::format("LSD {:.6f} dB (10 +/- {:g}), SDR {:.4f} dB (20 +/- {:g}), gain-only MCD {:.2g} dB (<= {:g})",
                          l, kLsdTol, s, kSdrTol, m, kMcdGainTol)};
}

Outcome distortion_oracles() {
  int clip_mismatch = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AudioBuffer x = ut::noise_buffer(8000, 16000, 800 + seed, 0.2);
    double peak = 0.0;
    for (double v : x.samples()) peak = std::max(peak, std::abs(v));
    const double ratio = 0.1 + 0.08 * static_cast<double>(seed);
    const AudioBuffer y = apply_clipping(x, ratio);
    const double t = ratio * peak;
    for (std::size_t i = 0; i < x.size(); ++i) clip_mismatch += y[i] == std::clamp(x[i], -t, t) ? 0 : 1;
  }

  double reverb_err = 0.0;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto s = ut::white_noise(6000, 900 + k, 0.3);
    const std::size_t pre = 5 + 20 * k;
    const auto h = synthetic_rir(16000, 0.15, pre, 910 + k);
    const auto full = ut::naive_convolve(s, h);
    const ReverbResult r = apply_reverb(AudioBuffer(s, 16000), AudioBuffer(h, 16000));
    if (r.reverberant.size() != s.size()) return {false, "reverberant length differs from input"};
    for (std::size_t i = 0; i < s.size(); ++i) reverb_err = std::max(reverb_err, std::abs(r.reverberant[i] - full[i + pre]));
  }

  double worst_oob = 0.0;
  bool rate_kept = true;
  for (int sf : kSupportedSampleRates) {
    for (const auto& [c, t] : simulator_filters(sf)) {
      const AudioBuffer x = ut::noise_buffer(static_cast<std::size_t>(sf), sf, 950, 0.3);
      const AudioBuffer y = apply_bandwidth_limitation(x, c);
      rate_kept = rate_kept && y.sample_rate_hz() == sf && y.size() == x.size();
      worst_oob = std::max(worst_oob, ut::energy_fraction_above(y.samples(), c + t, sf));
    }
  }
  const bool ok = clip_mismatch == 0 && reverb_err <= kReverbTol && worst_oob <= kOutOfBandMax && rate_kept;
  return {ok, fmt::format("clipping mismatches {}, reverb max error {:.3g} (tol {:g}), worst out-of-band {:.3g} "
                          "(max {:g}), container rate {}",
                          clip_mismatch, reverb_err, kReverbTol, worst_oob, kOutOfBandMax,
                          rate_kept ? "kept" : "CHANGED")};
}

Outcome manifest_statistics() {
  SourceCatalog catalog;
  for (std::size_t i = 0; i < 20; ++i) {
    const int sf = kSupportedSampleRates[i % kSupportedSampleRates.size()];
    catalog.speech.push_back({fmt::format("speech/{:02}.wav", i), sf});
    catalog.noise.push_back({fmt::format("noise/{:02}.wav", i), sf});
    catalog.rir.push_back({fmt::format("rir/{:02}.wav", i), sf});
  }
  SimulationConfig cfg;
  cfg.master_seed = 99;
  const Manifest m = generate_manifest(catalog, cfg, kStatEntries);
  std::size_t reverb = 0;
  double snr_sum = 0.0;
  for (const auto& e : m.entries) {
    reverb += e.reverb() ? 1 : 0;
    snr_sum += e.snr_db;
  }
  const double frac = static_cast<double>(reverb) / static_cast<double>(m.entries.size());
  const double mean = snr_sum / static_cast<double>(m.entries.size());
  const bool ok = m.entries.size() == kStatEntries && frac >= kReverbFracLo && frac <= kReverbFracHi &&
                  std::abs(mean - kSnrMeanTarget) <= kSnrMeanTol;
  return {ok, fmt::format("{} entries, reverb fraction {:.4f} (in [{:g}, {:g}]), SNR mean {:.3f} dB ({:g} +/- {:g})",
                          m.entries.size(), frac, kReverbFracLo, kReverbFracHi, mean, kSnrMeanTarget, kSnrMeanTol)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"determinism", determinism},
      {"snr fidelity", snr_fidelity},
      {"sfi stft round trip", sfi_round_trip},
      {"bandwidth pipeline", bandwidth_pipeline},
      {"filter specs", filter_specs},
      {"metric identities and monotonicity", metric_identities},
      {"analytic metric values", analytic_metrics},
      {"distortion oracles", distortion_oracles},
      {"manifest statistics", manifest_statistics},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    fmt::print("{} {} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
