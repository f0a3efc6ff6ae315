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

// Mono audio buffers and RIFF/WAVE I/O.

#ifndef URGENT_AUDIO_IO_H_
#define URGENT_AUDIO_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace urgent {

// A single-channel signal in 64-bit real amplitudes. Nominal range is
// [-1, 1]; values outside it are allowed for intermediates (pre-clipping).
class AudioBuffer {
 public:
  explicit AudioBuffer(int sample_rate_hz);
  AudioBuffer(std::vector<double> samples, int sample_rate_hz);

  int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::vector<double>& mutable_samples() noexcept { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  double& operator[](std::size_t i) { return samples_[i]; }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_hz_;
};

enum class WavEncoding { kPcm16, kFloat32 };

struct WavInfo {
  int sample_rate_hz = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::uint16_t format_code = 0;
  std::size_t frames = 0;
};

// Parses the header only. Throws kIo / kFormat.
WavInfo read_wav_info(const std::filesystem::path& path);

// Accepts PCM 16/24-bit and IEEE float-32, exactly one channel. Integer PCM
// is scaled by 2^-(bits-1).
AudioBuffer load_wav(const std::filesystem::path& path);
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

// pcm16 quantizes with round-half-away-from-zero and saturates at the
// integer limits. float32 is lossless for float-representable samples.
void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavEncoding encoding);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer,
                                     WavEncoding encoding);

std::int16_t quantize_pcm16(double sample) noexcept;

}  // namespace urgent

#endif  // URGENT_AUDIO_IO_H_
