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

#include "support.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fftw3.h>
#include <unistd.h>

namespace urgent::testing {

namespace fs = std::filesystem;

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double stddev) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> x(n);
  for (double& v : x) v = dist(gen);
  return x;
}

std::vector<double> sine(double freq_hz, int sample_rate_hz, std::size_t n, double amplitude,
                         double phase) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / sample_rate_hz + phase);
  }
  return x;
}

std::vector<double> tone_complex(int sample_rate_hz, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double f0 = 100.0 + 120.0 * u(gen);
  const double drift = 0.1 + 0.2 * u(gen);
  const double syllable_hz = 3.0 + 2.0 * u(gen);
  const int harmonics = std::max(1, std::min(20, static_cast<int>(0.45 * sample_rate_hz / (f0 * 1.2))));
  std::vector<double> amp(harmonics), ph(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    amp[h] = 0.3 / (h + 1) * (0.5 + u(gen));
    ph[h] = 2.0 * std::numbers::pi * u(gen);
  }
  std::vector<double> x(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    const double f = f0 * (1.0 + drift * std::sin(2.0 * std::numbers::pi * 0.7 * t));
    phase += 2.0 * std::numbers::pi * f / sample_rate_hz;
    const double env = 0.55 - 0.45 * std::cos(2.0 * std::numbers::pi * syllable_hz * t);
    double s = 0.0;
    for (int h = 0; h < harmonics; ++h) s += amp[h] * std::sin((h + 1) * phase + ph[h]);
    x[i] = env * s;
  }
  return x;
}

AudioBuffer noise_buffer(std::size_t n, int sample_rate_hz, std::uint64_t seed, double stddev) {
  return AudioBuffer(white_noise(n, seed, stddev), sample_rate_hz);
}

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double match_db(std::span<const double> a, std::span<const double> b, std::size_t begin, std::size_t end) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += a[i] * a[i];
    den += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return 10.0 * std::log10(num / den);
}

std::vector<double> naive_convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) y[i + k] += x[i] * h[k];
  }
  return y;
}

double response_db(std::span<const double> h, double freq_hz, int sample_rate_hz) {
  std::complex<double> acc = 0.0;
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  for (std::size_t n = 0; n < h.size(); ++n) acc += h[n] * std::polar(1.0, -w * static_cast<double>(n));
  return 20.0 * std::log10(std::abs(acc));
}

double energy_fraction_above(std::span<const double> x, double freq_hz, int sample_rate_hz) {
  const std::size_t n = x.size();
  // 4-term Blackman-Harris taper (sidelobes near -92 dB) so the signal edges
  // do not leak across the band split.
  std::vector<double> in(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    in[i] *= 0.35875 - 0.48829 * std::cos(a) + 0.14128 * std::cos(2 * a) - 0.01168 * std::cos(3 * a);
  }
  std::vector<fftw_complex> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  double total = 0.0;
  double above = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double weight = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    const double p = weight * (out[k][0] * out[k][0] + out[k][1] * out[k][1]);
    total += p;
    if (static_cast<double>(k) * sample_rate_hz / static_cast<double>(n) >= freq_hz) above += p;
  }
  return above / total;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("urgent-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    files.emplace_back(fs::relative(entry.path(), root).generic_string(), bytes.str());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace urgent::testing
