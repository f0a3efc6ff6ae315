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

// Batch evaluation of (reference, estimate) file pairs and report output.

#ifndef URGENT_EVALUATE_H_
#define URGENT_EVALUATE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urgent/audio_io.h"
#include "urgent/metrics.h"

namespace urgent {

struct EvaluatePair {
  std::string reference;
  std::string estimate;
};

struct EvaluateOptions {
  // Error out on a rate mismatch instead of resampling the estimate.
  bool strict_sample_rate = false;
  // Weight aggregates by reference duration instead of per-file means.
  bool duration_weighted = false;
  std::size_t workers = 1;
};

struct FileMetrics {
  std::string id;  // 1-based row number, zero-padded
  std::string reference;
  std::string estimate;
  double duration_s = 0.0;
  std::array<std::optional<double>, kMetricCount> values;
  std::vector<std::string> failures;  // "<metric or stage>: <message>"

  const std::optional<double>& value(Metric m) const { return values[static_cast<std::size_t>(m)]; }
};

struct AggregateMetric {
  double mean = 0.0;
  std::size_t count = 0;
};

struct MetricReport {
  std::vector<FileMetrics> per_file;
  std::array<AggregateMetric, kMetricCount> aggregate{};
  std::size_t failed_files = 0;
  bool duration_weighted = false;

  const AggregateMetric& mean(Metric m) const { return aggregate[static_cast<std::size_t>(m)]; }
};

// Computes all metrics on one in-memory pair; per-metric failures are
// recorded rather than thrown.
FileMetrics evaluate_buffers(const AudioBuffer& reference, const AudioBuffer& estimate,
                             const EvaluateOptions& options = {});

// Never throws for per-pair problems: unreadable files and metric errors are
// recorded in the pair's failures and excluded from the aggregates.
MetricReport evaluate_pairlist(std::span<const EvaluatePair> pairs, const EvaluateOptions& options = {});

// Rebuilds aggregate and failed_files from per_file.
void recompute_aggregate(MetricReport& report);

// reference \t estimate per line, optional "reference" header row.
std::vector<EvaluatePair> read_pairs_tsv(const std::filesystem::path& path);

// Machine-readable report with metric metadata (directions and variants).
std::string format_report_json(const MetricReport& report);
// Aligned human-readable table with direction markers.
std::string format_report_table(const MetricReport& report);

using Enhancer = std::function<AudioBuffer(const AudioBuffer&)>;
inline constexpr int kFixedModelRate = 48000;

// Runs a fixed-rate enhancer on input of any rate: upsample to 48 kHz,
// enhance, resample back and match the input length.
AudioBuffer sfi_wrapper_eval(const Enhancer& enhance, const AudioBuffer& degraded);

}  // namespace urgent

#endif  // URGENT_EVALUATE_H_
