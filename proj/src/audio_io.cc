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

#include "urgent/audio_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "urgent/error.h"

namespace urgent {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct ParsedWav {
  WavInfo info;
  const std::uint8_t* data = nullptr;
  std::size_t data_bytes = 0;
};

// Walks the RIFF chunk list. With `header_only`, a truncated data chunk is
// tolerated so that read_wav_info works on a prefix of the file.
ParsedWav parse(std::span<const std::uint8_t> bytes, bool header_only) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kFormat, "not a RIFF/WAVE container");
  }
  ParsedWav parsed;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + chunk_size > bytes.size()) {
        throw Error(ErrorCode::kFormat, "truncated fmt chunk");
      }
      const std::uint8_t* f = bytes.data() + body;
      parsed.info.format_code = read_u16(f);
      parsed.info.channels = read_u16(f + 2);
      parsed.info.sample_rate_hz = static_cast<int>(read_u32(f + 4));
      parsed.info.bits_per_sample = read_u16(f + 14);
      if (parsed.info.format_code == kFormatExtensible) {
        if (chunk_size < 40) throw Error(ErrorCode::kFormat, "truncated WAVE_FORMAT_EXTENSIBLE");
        // The sub-format GUID starts with the plain format code.
        parsed.info.format_code = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::kFormat, "data chunk precedes fmt chunk");
      std::size_t available = bytes.size() - body;
      if (chunk_size > available && !header_only) {
        throw Error(ErrorCode::kFormat, "data chunk extends past end of file");
      }
      parsed.data = bytes.data() + body;
      parsed.data_bytes = std::min<std::size_t>(chunk_size, available);
      if (header_only) parsed.data_bytes = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1U);
  }
  if (!have_fmt) throw Error(ErrorCode::kFormat, "missing fmt chunk");
  if (parsed.data == nullptr) throw Error(ErrorCode::kFormat, "missing data chunk");
  if (parsed.info.sample_rate_hz <= 0) throw Error(ErrorCode::kFormat, "non-positive sample rate");
  if (parsed.info.bits_per_sample <= 0 || parsed.info.bits_per_sample % 8 != 0) {
    throw Error(ErrorCode::kFormat, "invalid bits per sample");
  }
  if (parsed.info.channels <= 0) throw Error(ErrorCode::kFormat, "invalid channel count");
  const std::size_t block = static_cast<std::size_t>(parsed.info.channels) *
                            (parsed.info.bits_per_sample / 8);
  parsed.info.frames = parsed.data_bytes / block;
  return parsed;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path,
                                    std::size_t max_bytes = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  if (max_bytes == 0) {
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    bytes.resize(max_bytes);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(max_bytes));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  }
  return bytes;
}

}  // namespace

AudioBuffer::AudioBuffer(int sample_rate_hz) : AudioBuffer({}, sample_rate_hz) {}

AudioBuffer::AudioBuffer(std::vector<double> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw Error(ErrorCode::kParameter,
                "sample rate must be positive, got " + std::to_string(sample_rate_hz_));
  }
}

WavInfo read_wav_info(const std::filesystem::path& path) {
  // Headers of files written here fit comfortably; larger metadata chunks
  // fall back to reading the whole file.
  auto bytes = read_file(path, 1 << 16);
  try {
    return parse(bytes, true).info;
  } catch (const Error&) {
    bytes = read_file(path);
    return parse(bytes, true).info;
  }
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  const ParsedWav parsed = parse(bytes, false);
  const WavInfo& info = parsed.info;
  if (info.channels != 1) {
    throw Error(ErrorCode::kChannel,
                "expected mono audio, found " + std::to_string(info.channels) + " channels");
  }
  const bool pcm = info.format_code == kFormatPcm &&
                   (info.bits_per_sample == 16 || info.bits_per_sample == 24);
  const bool flt = info.format_code == kFormatFloat && info.bits_per_sample == 32;
  if (!pcm && !flt) {
    throw Error(ErrorCode::kEncoding,
                "unsupported encoding: format " + std::to_string(info.format_code) + ", " +
                    std::to_string(info.bits_per_sample) + " bits");
  }

  std::vector<double> samples(info.frames);
  const std::uint8_t* p = parsed.data;
  if (flt) {
    for (std::size_t i = 0; i < info.frames; ++i, p += 4) {
      samples[i] = static_cast<double>(std::bit_cast<float>(read_u32(p)));
    }
  } else if (info.bits_per_sample == 16) {
    for (std::size_t i = 0; i < info.frames; ++i, p += 2) {
      samples[i] = static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    }
  } else {
    for (std::size_t i = 0; i < info.frames; ++i, p += 3) {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      samples[i] = v / 8388608.0;
    }
  }
  return AudioBuffer(std::move(samples), info.sample_rate_hz);
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_wav(bytes);
}

std::int16_t quantize_pcm16(double sample) noexcept {
  const double scaled = sample * 32768.0;
  if (!(scaled < 32767.0)) return std::isnan(scaled) ? 0 : 32767;
  if (scaled <= -32768.0) return -32768;
  return static_cast<std::int16_t>(std::round(scaled));
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavEncoding encoding) {
  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint16_t block = bits / 8;
  const std::size_t data_bytes = buffer.size() * block;
  if (data_bytes > 0xFFFFFFFFULL - 36) {
    throw Error(ErrorCode::kWrite, "buffer too large for a RIFF container");
  }

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(36 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz()));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz()) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_bytes));
  for (double s : buffer.samples()) {
    if (is_float) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    } else {
      put_u16(out, static_cast<std::uint16_t>(quantize_pcm16(s)));
    }
  }
  return out;
}

void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavEncoding encoding) {
  const auto bytes = encode_wav(buffer, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kWrite, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::kWrite, "failed writing " + path.string());
}

}  // namespace urgent
