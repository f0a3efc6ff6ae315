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

// Simulation configuration and deterministic manifests.
//
// A manifest file is JSON Lines. The first line is a header object
// ({"format": "urgent-forge-manifest", ...}) carrying the format and tool
// versions plus the run-wide chunk duration; every following line is one
// entry with the fields, in order:
//   id, speech_path, noise_path, rir_path, snr_db, reverb, kind, cutoff_hz,
//   clip_ratio, output_sf, seed, degraded_out, reference_out
// rir_path, cutoff_hz and clip_ratio are null when unused.

#ifndef URGENT_MANIFEST_H_
#define URGENT_MANIFEST_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "urgent/bandwidth.h"
#include "urgent/distortion.h"
#include "urgent/version.h"

namespace urgent {

struct SimulationConfig {
  std::array<double, 2> snr_range_db = {-5.0, 20.0};
  double reverb_prob = 0.5;
  std::vector<int> allowed_sfs{kSupportedSampleRates.begin(), kSupportedSampleRates.end()};
  // Probabilities of none, bandwidth_limitation, clipping.
  std::array<double, 3> distortion_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<double, 2> clip_ratio_range = {0.1, 0.9};
  double chunk_duration_s = 4.0;
  std::uint64_t master_seed = 0;

  // Throws kConfig.
  void validate() const;
};

struct ManifestEntry {
  std::string id;
  std::string speech_path;
  std::string noise_path;
  std::optional<std::string> rir_path;
  double snr_db = 0.0;
  DistortionKind kind = DistortionKind::kNone;
  std::optional<double> cutoff_hz;
  std::optional<double> clip_ratio;
  int output_sf = 0;
  std::uint64_t seed = 0;
  std::string degraded_out;
  std::string reference_out;

  bool reverb() const { return rir_path.has_value(); }
  DistortionSpec spec(double noise_offset_s = 0.0) const;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct ManifestHeader {
  int format_version = kManifestFormatVersion;
  std::string tool_version;
  double chunk_duration_s = 4.0;
  std::uint64_t master_seed = 0;
};

struct Manifest {
  ManifestHeader header;
  std::vector<ManifestEntry> entries;
};

struct SourceFile {
  std::string path;
  int sample_rate_hz = 0;
};

struct SourceCatalog {
  std::vector<SourceFile> speech;
  std::vector<SourceFile> noise;
  std::vector<SourceFile> rir;
};

// Reads each file's WAV header. Throws kIo / kFormat for unreadable files.
SourceCatalog probe_sources(const std::vector<std::string>& speech,
                            const std::vector<std::string>& noise,
                            const std::vector<std::string>& rir);

// Output rate of an entry whose speech source is at `speech_sf`: the speech
// rate itself when allowed, otherwise the lowest allowed rate above it (the
// highest allowed rate if none is).
int entry_output_sf(int speech_sf, const std::vector<int>& allowed);

// Entry `index` under `master_seed`. All random choices come from
// CounterRng(derive_key(master_seed, index)).
ManifestEntry draw_entry(const SourceCatalog& sources, const SimulationConfig& cfg,
                         std::uint64_t master_seed, std::size_t index);

// Throws kConfig for empty speech/noise lists, an empty RIR list with a
// non-zero reverb probability, or count == 0.
Manifest generate_manifest(const SourceCatalog& sources, const SimulationConfig& cfg,
                           std::size_t count);

std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(const std::string& text);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace urgent

#endif  // URGENT_MANIFEST_H_
