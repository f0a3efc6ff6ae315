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

// Signal generators and reference implementations shared by the tests.
// Everything here is written independently of the library code it checks.

#ifndef URGENT_TESTS_SUPPORT_H_
#define URGENT_TESTS_SUPPORT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "urgent/audio_io.h"

namespace urgent::testing {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double stddev = 0.1);
std::vector<double> sine(double freq_hz, int sample_rate_hz, std::size_t n, double amplitude = 1.0,
                         double phase = 0.0);
// Harmonic complex on a drifting pitch with a syllable-rate envelope.
std::vector<double> tone_complex(int sample_rate_hz, std::size_t n, std::uint64_t seed);

AudioBuffer noise_buffer(std::size_t n, int sample_rate_hz, std::uint64_t seed, double stddev = 0.1);

double energy(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
// 10 log10(|a|^2 / |a - b|^2) over [begin, end).
double match_db(std::span<const double> a, std::span<const double> b, std::size_t begin, std::size_t end);

// O(n m) linear convolution.
std::vector<double> naive_convolve(std::span<const double> x, std::span<const double> h);
// |sum_n h[n] exp(-j 2 pi f n / sf)| in dB.
double response_db(std::span<const double> h, double freq_hz, int sample_rate_hz);
// Fraction of energy at or above freq_hz, from a single Blackman-Harris
// tapered DFT over the whole signal.
double energy_fraction_above(std::span<const double> x, double freq_hz, int sample_rate_hz);

// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Recursive listing of regular files, relative path -> bytes.
std::vector<std::pair<std::string, std::string>> read_tree(const std::filesystem::path& root);

}  // namespace urgent::testing

#endif  // URGENT_TESTS_SUPPORT_H_
