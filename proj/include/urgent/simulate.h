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

// Manifest execution and on-the-fly mixing.

#ifndef URGENT_SIMULATE_H_
#define URGENT_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "urgent/audio_io.h"
#include "urgent/distortion.h"
#include "urgent/manifest.h"

namespace urgent {

struct SimulationOptions {
  double chunk_duration_s = 4.0;
  DegradeOptions degrade;
};

// Resolves a source path to audio. The default reads WAV files.
using SourceLoader = std::function<AudioBuffer(const std::string&)>;

// load -> resample to output_sf -> crop to the chunk duration (offset from
// the entry seed) -> noise offset from the entry seed -> degrade.
DegradedPair simulate_in_memory(const ManifestEntry& entry, const SimulationOptions& options,
                                const SourceLoader& loader);

// Writes float32 WAVs to out_root / entry.{degraded_out, reference_out}.
void simulate_entry(const ManifestEntry& entry, const std::filesystem::path& out_root,
                    const SimulationOptions& options);

struct EntryStatus {
  std::string id;
  bool ok = false;
  std::string failure;  // empty on success
  double elapsed_s = 0.0;
};

struct SimulationReport {
  std::vector<EntryStatus> entries;  // sorted by id

  std::size_t succeeded() const;
  std::size_t failed() const;
};

// Attempts every entry on `workers` threads. Failures are recorded, never
// thrown. Output files do not depend on `workers` or scheduling.
SimulationReport run_manifest(const Manifest& manifest, const std::filesystem::path& out_root,
                              std::size_t workers, const SimulationOptions& options);

// id \t status \t failure. No timing, so identical runs give identical bytes.
std::string format_report_tsv(const SimulationReport& report);
std::string format_timing_tsv(const SimulationReport& report);

// Draws fresh degraded pairs from in-memory source pools, one per call, with
// the same per-entry recipe as generate_manifest under master seed
// `epoch_seed`. Intended for training-time dynamic mixing.
class DynamicMixer {
 public:
  DynamicMixer(SourceCatalog catalog, SimulationConfig cfg, std::uint64_t epoch_seed,
               SourceLoader loader, DegradeOptions degrade = {});

  // The i-th draw of this epoch; a pure function of (sources, cfg, seed, i).
  DegradedPair at(std::size_t index) const;
  DegradedPair next() { return at(cursor_++); }

 private:
  AudioBuffer load_cached(const std::string& path) const;

  SourceCatalog catalog_;
  SimulationConfig cfg_;
  std::uint64_t epoch_seed_;
  SourceLoader loader_;
  SimulationOptions options_;
  std::size_t cursor_ = 0;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const AudioBuffer>> cache_;
};

}  // namespace urgent

#endif  // URGENT_SIMULATE_H_
