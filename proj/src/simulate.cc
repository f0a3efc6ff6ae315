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

#include "urgent/simulate.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "urgent/error.h"
#include "urgent/resample.h"
#include "urgent/rng.h"

namespace urgent {

namespace {

// Draw indices within the entry seed's stream.
constexpr std::uint64_t kDrawChunkOffset = 0;
constexpr std::uint64_t kDrawNoiseOffset = 1;

AudioBuffer load_source(const std::string& path) {
  try {
    return load_wav(path);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace

DegradedPair simulate_in_memory(const ManifestEntry& entry, const SimulationOptions& options,
                                const SourceLoader& loader) {
  const int sf = entry.output_sf;
  const CounterRng rng(entry.seed);

  AudioBuffer speech = resample(loader(entry.speech_path), sf);
  const auto chunk = static_cast<std::size_t>(std::llround(options.chunk_duration_s * sf));
  if (chunk > 0 && speech.size() > chunk) {
    const std::size_t start = rng.index(kDrawChunkOffset, speech.size() - chunk + 1);
    auto& s = speech.mutable_samples();
    s.erase(s.begin(), s.begin() + static_cast<long>(start));
    s.resize(chunk);
  }

  const AudioBuffer noise = resample(loader(entry.noise_path), sf);
  if (noise.empty()) throw Error(ErrorCode::kDegenerateNoise, entry.noise_path + ": noise is empty");
  const double noise_offset_s =
      static_cast<double>(rng.index(kDrawNoiseOffset, noise.size())) / static_cast<double>(sf);

  std::optional<AudioBuffer> rir;
  if (entry.rir_path) rir = resample(loader(*entry.rir_path), sf);

  return degrade(speech, entry.spec(noise_offset_s), rir ? &*rir : nullptr, noise, options.degrade);
}

void simulate_entry(const ManifestEntry& entry, const std::filesystem::path& out_root,
                    const SimulationOptions& options) {
  const DegradedPair pair = simulate_in_memory(entry, options, load_source);
  const auto degraded_path = out_root / entry.degraded_out;
  const auto reference_path = out_root / entry.reference_out;
  std::error_code ec;
  std::filesystem::create_directories(degraded_path.parent_path(), ec);
  std::filesystem::create_directories(reference_path.parent_path(), ec);
  save_wav(pair.degraded, degraded_path, WavEncoding::kFloat32);
  save_wav(pair.reference, reference_path, WavEncoding::kFloat32);
}

std::size_t SimulationReport::succeeded() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const EntryStatus& s) { return s.ok; }));
}

std::size_t SimulationReport::failed() const { return entries.size() - succeeded(); }

SimulationReport run_manifest(const Manifest& manifest, const std::filesystem::path& out_root,
                              std::size_t workers, const SimulationOptions& options) {
  if (workers == 0) throw Error(ErrorCode::kParameter, "workers must be at least 1");
  const auto& entries = manifest.entries;
  std::vector<EntryStatus> status(entries.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < entries.size(); i = next.fetch_add(1)) {
      EntryStatus& st = status[i];
      st.id = entries[i].id;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        simulate_entry(entries[i], out_root, options);
        st.ok = true;
      } catch (const std::exception& e) {
        st.ok = false;
        st.failure = e.what();
      }
      st.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const std::size_t threads = std::min(workers, std::max<std::size_t>(entries.size(), 1));
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  SimulationReport report{std::move(status)};
  std::sort(report.entries.begin(), report.entries.end(),
            [](const EntryStatus& a, const EntryStatus& b) { return a.id < b.id; });
  return report;
}

std::string format_report_tsv(const SimulationReport& report) {
  std::ostringstream out;
  out << "id\tstatus\tfailure\n";
  for (const auto& e : report.entries) {
    std::string reason = e.failure;
    std::replace(reason.begin(), reason.end(), '\t', ' ');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out << e.id << '\t' << (e.ok ? "ok" : "failed") << '\t' << reason << '\n';
  }
  return out.str();
}

std::string format_timing_tsv(const SimulationReport& report) {
  std::ostringstream out;
  out << "id\telapsed_s\n";
  for (const auto& e : report.entries) out << e.id << '\t' << fmt::format("{:.6f}", e.elapsed_s) << '\n';
  return out.str();
}

DynamicMixer::DynamicMixer(SourceCatalog catalog, SimulationConfig cfg, std::uint64_t epoch_seed,
                           SourceLoader loader, DegradeOptions degrade)
    : catalog_(std::move(catalog)),
      cfg_(std::move(cfg)),
      epoch_seed_(epoch_seed),
      loader_(std::move(loader)) {
  cfg_.validate();
  if (catalog_.speech.empty() || catalog_.noise.empty()) {
    throw Error(ErrorCode::kConfig, "dynamic mixing needs speech and noise sources");
  }
  if (catalog_.rir.empty() && cfg_.reverb_prob > 0.0) {
    throw Error(ErrorCode::kConfig, "RIR list is empty but reverb_prob > 0");
  }
  options_.chunk_duration_s = cfg_.chunk_duration_s;
  options_.degrade = degrade;
}

AudioBuffer DynamicMixer::load_cached(const std::string& path) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(path); it != cache_.end()) return *it->second;
  }
  auto loaded = std::make_shared<const AudioBuffer>(loader_(path));
  std::lock_guard lock(cache_mutex_);
  return *cache_.emplace(path, std::move(loaded)).first->second;
}

DegradedPair DynamicMixer::at(std::size_t index) const {
  const ManifestEntry entry = draw_entry(catalog_, cfg_, epoch_seed_, index);
  return simulate_in_memory(entry, options_, [this](const std::string& p) { return load_cached(p); });
}

}  // namespace urgent
