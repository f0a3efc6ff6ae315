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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "support.h"
#include "urgent/audio_io.h"
#include "urgent/error.h"

using namespace urgent;
using urgent::testing::TempDir;

namespace {

// Minimal hand-rolled RIFF writer so the reader is not checked against itself.
std::vector<std::uint8_t> wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                                    std::uint16_t bits, const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> b;
  auto u16 = [&](std::uint16_t v) { b.push_back(v & 0xFF); b.push_back(v >> 8); };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF); };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tag("RIFF");
  u32(36 + static_cast<std::uint32_t>(data.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(channels * bits / 8);
  u16(bits);
  tag("data");
  u32(static_cast<std::uint32_t>(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

std::vector<std::uint8_t> pcm16(std::initializer_list<std::int16_t> samples) {
  std::vector<std::uint8_t> d;
  for (std::int16_t s : samples) {
    const auto u = static_cast<std::uint16_t>(s);
    d.push_back(u & 0xFF);
    d.push_back(u >> 8);
  }
  return d;
}

std::int16_t stored_pcm16(const std::vector<std::uint8_t>& file, std::size_t index) {
  const std::size_t at = 44 + 2 * index;
  return static_cast<std::int16_t>(file[at] | (file[at + 1] << 8));
}

// Nearest of floor/ceil codes, ties away from zero, clamped to int16.
std::int16_t quantizer_oracle(double x) {
  const double scaled = x * 32768.0;
  const double lo = std::floor(scaled);
  const double hi = lo + 1.0;
  double pick = (scaled - lo < hi - scaled) ? lo : hi;
  if (scaled - lo == hi - scaled) pick = scaled < 0 ? lo : hi;
  return static_cast<std::int16_t>(std::clamp(pick, -32768.0, 32767.0));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception thrown");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("pcm16 samples are scaled by 2^15") {
  const AudioBuffer b = decode_wav(wav_bytes(1, 1, 16000, 16, pcm16({16384})));
  CHECK(b.sample_rate_hz() == 16000);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == 0.5);
  CHECK(decode_wav(wav_bytes(1, 1, 8000, 16, pcm16({-32768})))[0] == -1.0);
}

TEST_CASE("pcm24 samples are scaled by 2^23") {
  const AudioBuffer b = decode_wav(wav_bytes(1, 1, 48000, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0x80}));
  REQUIRE(b.size() == 2);
  CHECK(b[0] == 0.5);
  CHECK(b[1] == -1.0);
}

TEST_CASE("float32 samples pass through") {
  const float v = -0.3125f;
  std::vector<std::uint8_t> d(4);
  std::memcpy(d.data(), &v, 4);
  CHECK(decode_wav(wav_bytes(3, 1, 22050, 32, d))[0] == static_cast<double>(v));
}

TEST_CASE("extensible header carries the sub-format") {
  auto bytes = wav_bytes(1, 1, 16000, 16, pcm16({8192}));
  // Grow fmt to 40 bytes and mark it WAVE_FORMAT_EXTENSIBLE.
  std::vector<std::uint8_t> ext(bytes.begin(), bytes.begin() + 36);
  ext[16] = 40;
  ext[20] = 0xFE;
  ext[21] = 0xFF;
  std::vector<std::uint8_t> tail = {22, 0, 16, 0, 4, 0, 0, 0, 1, 0};
  tail.resize(24, 0);
  ext.insert(ext.end(), tail.begin(), tail.end());
  ext.insert(ext.end(), bytes.begin() + 36, bytes.end());
  const std::uint32_t riff = static_cast<std::uint32_t>(ext.size() - 8);
  for (int i = 0; i < 4; ++i) ext[4 + i] = (riff >> (8 * i)) & 0xFF;
  CHECK(decode_wav(ext)[0] == 0.25);
}

TEST_CASE("unknown chunks before data are skipped") {
  auto bytes = wav_bytes(1, 1, 16000, 16, pcm16({100, -100}));
  const std::vector<std::uint8_t> list = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  const AudioBuffer b = decode_wav(bytes);
  REQUIRE(b.size() == 2);
  CHECK(b[1] == -100 / 32768.0);
}

TEST_CASE("load errors are classified") {
  CHECK(code_of([] { decode_wav(wav_bytes(1, 2, 16000, 16, pcm16({1, 2}))); }) == ErrorCode::kChannel);
  CHECK(code_of([] { decode_wav(wav_bytes(1, 1, 16000, 8, {1, 2})); }) == ErrorCode::kEncoding);
  CHECK(code_of([] { decode_wav(wav_bytes(3, 1, 16000, 64, std::vector<std::uint8_t>(8))); }) ==
        ErrorCode::kEncoding);
  CHECK(code_of([] { decode_wav(wav_bytes(6, 1, 16000, 16, pcm16({1}))); }) == ErrorCode::kEncoding);
  const std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'X', 0, 0, 0, 0, 'W', 'A', 'V', 'E'};
  CHECK(code_of([&] { decode_wav(junk); }) == ErrorCode::kFormat);
  auto truncated = wav_bytes(1, 1, 16000, 16, pcm16({1, 2, 3}));
  truncated.resize(truncated.size() - 2);
  CHECK(code_of([&] { decode_wav(truncated); }) == ErrorCode::kFormat);
  CHECK(code_of([] { load_wav("/nonexistent/file.wav"); }) == ErrorCode::kIo);
}

TEST_CASE("audio buffers need a positive rate") {
  CHECK(code_of([] { AudioBuffer(0); }) == ErrorCode::kParameter);
  CHECK(code_of([] { AudioBuffer({0.0}, -8000); }) == ErrorCode::kParameter);
  const AudioBuffer b({0.0, 0.0, 0.0, 0.0}, 8000);
  CHECK(b.duration_s() == 0.0005);
}

TEST_CASE("float32 round trip is bit exact") {
  TempDir dir;
  auto samples = urgent::testing::white_noise(4000, 7, 0.4);
  for (double& s : samples) s = static_cast<float>(s);
  const AudioBuffer b(samples, 44100);
  save_wav(b, dir / "x.wav", WavEncoding::kFloat32);
  const AudioBuffer back = load_wav(dir / "x.wav");
  CHECK(back == b);
  const WavInfo info = read_wav_info(dir / "x.wav");
  CHECK(info.frames == 4000);
  CHECK(info.sample_rate_hz == 44100);
  CHECK(info.bits_per_sample == 32);
}

TEST_CASE("pcm16 encoding stores the expected codes") {
  const AudioBuffer b({0.5, 1.0, -1.0, 2.0, -2.0, 0.5 / 32768, -0.5 / 32768, 1.5 / 32768}, 16000);
  const auto bytes = encode_wav(b, WavEncoding::kPcm16);
  CHECK(stored_pcm16(bytes, 0) == 16384);
  CHECK(stored_pcm16(bytes, 1) == 32767);
  CHECK(stored_pcm16(bytes, 2) == -32768);
  CHECK(stored_pcm16(bytes, 3) == 32767);
  CHECK(stored_pcm16(bytes, 4) == -32768);
  CHECK(stored_pcm16(bytes, 5) == 1);
  CHECK(stored_pcm16(bytes, 6) == -1);
  CHECK(stored_pcm16(bytes, 7) == 2);
  CHECK(quantize_pcm16(NAN) == 0);
}

TEST_CASE("pcm16 quantizer agrees with the two-candidate oracle") {
  const auto samples = urgent::testing::white_noise(20000, 11, 0.6);
  for (double s : samples) REQUIRE(quantize_pcm16(s) == quantizer_oracle(s));
}

TEST_CASE("pcm16 round trip stays within one step") {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto samples = urgent::testing::white_noise(3000 + seed * 17, seed, 0.3);
    for (double& s : samples) s = std::clamp(s, -1.0, 1.0 - 1.0 / 32768);
    const AudioBuffer b(samples, 8000);
    save_wav(b, dir / "p.wav", WavEncoding::kPcm16);
    const AudioBuffer back = load_wav(dir / "p.wav");
    REQUIRE(back.size() == b.size());
    CHECK(urgent::testing::max_abs_diff(back.samples(), b.samples()) <= 1.0 / 32768);
  }
}

TEST_CASE("empty buffers round trip") {
  TempDir dir;
  save_wav(AudioBuffer(24000), dir / "e.wav", WavEncoding::kPcm16);
  const AudioBuffer back = load_wav(dir / "e.wav");
  CHECK(back.empty());
  CHECK(back.sample_rate_hz() == 24000);
}

TEST_CASE("unwritable destinations raise write errors") {
  CHECK(code_of([] { save_wav(AudioBuffer({0.1}, 8000), "/nonexistent/dir/x.wav", WavEncoding::kFloat32); }) ==
        ErrorCode::kWrite);
}
