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

#include "urgent/manifest.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "urgent/error.h"
#include "urgent/rng.h"
#include "urgent/tsv.h"

namespace urgent {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kManifestFormatName = "urgent-forge-manifest";

// Draw indices within an entry's counter stream.
enum Draw : std::uint64_t {
  kDrawSpeech = 0,
  kDrawNoise = 1,
  kDrawSnr = 2,
  kDrawReverb = 3,
  kDrawRir = 4,
  kDrawKind = 5,
  kDrawKindParam = 6,
};

constexpr std::array<const char*, 13> kEntryFields = {
    "id",        "speech_path", "noise_path", "rir_path",  "snr_db",       "reverb",       "kind",
    "cutoff_hz", "clip_ratio",  "output_sf",  "seed",      "degraded_out", "reference_out"};

ordered_json nullable(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kConfig, fmt::format("manifest line {}: {}", line, what));
}

template <typename T>
T field(const ordered_json& j, const char* key, std::size_t line) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad_line(line, fmt::format("field '{}': {}", key, e.what()));
  }
}

std::optional<double> nullable_double(const ordered_json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) bad_line(line, fmt::format("missing field '{}'", key));
  if (j.at(key).is_null()) return std::nullopt;
  return field<double>(j, key, line);
}

}  // namespace

void SimulationConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (!std::isfinite(snr_range_db[0]) || !std::isfinite(snr_range_db[1]) ||
      snr_range_db[0] > snr_range_db[1]) {
    fail("snr_range_db must be finite with low <= high");
  }
  if (!(reverb_prob >= 0.0 && reverb_prob <= 1.0)) fail("reverb_prob must lie in [0, 1]");
  if (allowed_sfs.empty()) fail("allowed_sfs is empty");
  if (!std::is_sorted(allowed_sfs.begin(), allowed_sfs.end()) ||
      std::adjacent_find(allowed_sfs.begin(), allowed_sfs.end()) != allowed_sfs.end() ||
      allowed_sfs.front() <= 0) {
    fail("allowed_sfs must be positive and strictly ascending");
  }
  double total = 0.0;
  for (double w : distortion_weights) {
    if (!(w >= 0.0)) fail("distortion_weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("distortion_weights must sum to 1");
  if (!(clip_ratio_range[0] > 0.0 && clip_ratio_range[0] <= clip_ratio_range[1] &&
        clip_ratio_range[1] <= 1.0)) {
    fail("clip_ratio_range must satisfy 0 < low <= high <= 1");
  }
  if (!(chunk_duration_s > 0.0) || !std::isfinite(chunk_duration_s)) {
    fail("chunk_duration_s must be positive");
  }
}

DistortionSpec ManifestEntry::spec(double noise_offset_s) const {
  DistortionSpec s;
  s.kind = kind;
  s.cutoff_hz = cutoff_hz;
  s.clip_ratio = clip_ratio;
  s.snr_db = snr_db;
  s.rir_path = rir_path;
  s.noise_path = noise_path;
  s.noise_offset_s = noise_offset_s;
  s.seed = seed;
  return s;
}

SourceCatalog probe_sources(const std::vector<std::string>& speech,
                            const std::vector<std::string>& noise,
                            const std::vector<std::string>& rir) {
  auto probe = [](const std::vector<std::string>& paths) {
    std::vector<SourceFile> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back({p, read_wav_info(p).sample_rate_hz});
    return out;
  };
  return {probe(speech), probe(noise), probe(rir)};
}

int entry_output_sf(int speech_sf, const std::vector<int>& allowed) {
  for (int sf : allowed) {
    if (sf >= speech_sf) return sf;
  }
  return allowed.back();
}

ManifestEntry draw_entry(const SourceCatalog& sources, const SimulationConfig& cfg,
                         std::uint64_t master_seed, std::size_t index) {
  const std::uint64_t key = derive_key(master_seed, index);
  const CounterRng rng(key);

  ManifestEntry e;
  e.id = fmt::format("sim{:06d}", index);
  const SourceFile& speech = sources.speech[rng.index(kDrawSpeech, sources.speech.size())];
  e.speech_path = speech.path;
  e.noise_path = sources.noise[rng.index(kDrawNoise, sources.noise.size())].path;
  e.snr_db = rng.uniform(kDrawSnr, cfg.snr_range_db[0], cfg.snr_range_db[1]);
  if (!sources.rir.empty() && rng.bernoulli(kDrawReverb, cfg.reverb_prob)) {
    e.rir_path = sources.rir[rng.index(kDrawRir, sources.rir.size())].path;
  }
  e.output_sf = entry_output_sf(speech.sample_rate_hz, cfg.allowed_sfs);

  // Bandwidth limitation targets the band of a lower allowed rate, so it is
  // unavailable at the lowest one; its weight is then dropped.
  std::vector<double> cutoffs;
  for (int sf : cfg.allowed_sfs) {
    if (sf < e.output_sf) cutoffs.push_back(sf / 2.0);
  }
  std::array<double, 3> w = cfg.distortion_weights;
  if (cutoffs.empty()) w[1] = 0.0;
  const double total = w[0] + w[1] + w[2];
  double u = rng.uniform(kDrawKind) * total;
  e.kind = DistortionKind::kNone;
  if (total > 0.0) {
    if (u < w[0]) {
      e.kind = DistortionKind::kNone;
    } else if ((u -= w[0]) < w[1] || w[2] == 0.0) {
      e.kind = DistortionKind::kBandwidthLimitation;
    } else {
      e.kind = DistortionKind::kClipping;
    }
  }
  if (e.kind == DistortionKind::kBandwidthLimitation) {
    e.cutoff_hz = cutoffs[rng.index(kDrawKindParam, cutoffs.size())];
  } else if (e.kind == DistortionKind::kClipping) {
    e.clip_ratio = rng.uniform(kDrawKindParam, cfg.clip_ratio_range[0], cfg.clip_ratio_range[1]);
  }
  e.seed = key;
  e.degraded_out = "degraded/" + e.id + ".wav";
  e.reference_out = "reference/" + e.id + ".wav";
  return e;
}

Manifest generate_manifest(const SourceCatalog& sources, const SimulationConfig& cfg,
                           std::size_t count) {
  cfg.validate();
  if (sources.speech.empty()) throw Error(ErrorCode::kConfig, "speech list is empty");
  if (sources.noise.empty()) throw Error(ErrorCode::kConfig, "noise list is empty");
  if (sources.rir.empty() && cfg.reverb_prob > 0.0) {
    throw Error(ErrorCode::kConfig, "RIR list is empty but reverb_prob > 0");
  }
  if (count == 0) throw Error(ErrorCode::kConfig, "manifest entry count must be at least 1");

  Manifest m;
  m.header.tool_version = std::string(tool_version());
  m.header.chunk_duration_s = cfg.chunk_duration_s;
  m.header.master_seed = cfg.master_seed;
  m.entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    m.entries.push_back(draw_entry(sources, cfg, cfg.master_seed, i));
  }
  return m;
}

std::string serialize_manifest(const Manifest& manifest) {
  std::ostringstream out;
  ordered_json header;
  header["format"] = kManifestFormatName;
  header["format_version"] = manifest.header.format_version;
  header["tool_version"] = manifest.header.tool_version;
  header["chunk_duration_s"] = manifest.header.chunk_duration_s;
  header["master_seed"] = manifest.header.master_seed;
  out << header.dump() << '\n';
  for (const auto& e : manifest.entries) {
    ordered_json j;
    j["id"] = e.id;
    j["speech_path"] = e.speech_path;
    j["noise_path"] = e.noise_path;
    j["rir_path"] = e.rir_path ? ordered_json(*e.rir_path) : ordered_json(nullptr);
    j["snr_db"] = e.snr_db;
    j["reverb"] = e.reverb();
    j["kind"] = std::string(to_string(e.kind));
    j["cutoff_hz"] = nullable(e.cutoff_hz);
    j["clip_ratio"] = nullable(e.clip_ratio);
    j["output_sf"] = e.output_sf;
    j["seed"] = e.seed;
    j["degraded_out"] = e.degraded_out;
    j["reference_out"] = e.reference_out;
    out << j.dump() << '\n';
  }
  return out.str();
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      bad_line(number, e.what());
    }
    if (!j.is_object()) bad_line(number, "expected a JSON object");
    if (!have_header) {
      if (field<std::string>(j, "format", number) != kManifestFormatName) {
        bad_line(number, "not an urgent-forge manifest");
      }
      m.header.format_version = field<int>(j, "format_version", number);
      if (m.header.format_version != kManifestFormatVersion) {
        bad_line(number, fmt::format("unsupported format version {}", m.header.format_version));
      }
      m.header.tool_version = field<std::string>(j, "tool_version", number);
      m.header.chunk_duration_s = field<double>(j, "chunk_duration_s", number);
      m.header.master_seed = field<std::uint64_t>(j, "master_seed", number);
      have_header = true;
      continue;
    }

    if (j.size() != kEntryFields.size()) bad_line(number, "unexpected field count");
    std::size_t k = 0;
    for (const auto& item : j.items()) {
      if (item.key() != kEntryFields[k++]) {
        bad_line(number, fmt::format("field '{}' out of order or unknown", item.key()));
      }
    }
    ManifestEntry e;
    e.id = field<std::string>(j, "id", number);
    e.speech_path = field<std::string>(j, "speech_path", number);
    e.noise_path = field<std::string>(j, "noise_path", number);
    if (!j.at("rir_path").is_null()) e.rir_path = field<std::string>(j, "rir_path", number);
    e.snr_db = field<double>(j, "snr_db", number);
    if (field<bool>(j, "reverb", number) != e.rir_path.has_value()) {
      bad_line(number, "reverb flag disagrees with rir_path");
    }
    try {
      e.kind = parse_distortion_kind(field<std::string>(j, "kind", number));
    } catch (const Error& err) {
      bad_line(number, err.what());
    }
    e.cutoff_hz = nullable_double(j, "cutoff_hz", number);
    e.clip_ratio = nullable_double(j, "clip_ratio", number);
    e.output_sf = field<int>(j, "output_sf", number);
    e.seed = field<std::uint64_t>(j, "seed", number);
    e.degraded_out = field<std::string>(j, "degraded_out", number);
    e.reference_out = field<std::string>(j, "reference_out", number);
    try {
      e.spec().validate();
    } catch (const Error& err) {
      bad_line(number, err.what());
    }
    if (e.output_sf <= 0) bad_line(number, "output_sf must be positive");
    if (!ids.insert(e.id).second) bad_line(number, "duplicate id '" + e.id + "'");
    m.entries.push_back(std::move(e));
  }
  if (!have_header) throw Error(ErrorCode::kConfig, "manifest has no header line");
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  write_text_file(path, serialize_manifest(manifest));
}

Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace urgent
