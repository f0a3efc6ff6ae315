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

#include "urgent/evaluate.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "urgent/error.h"
#include "urgent/resample.h"
#include "urgent/tsv.h"
#include "urgent/version.h"

namespace urgent {

namespace {

std::string pair_id(std::size_t index) { return fmt::format("{:06d}", index + 1); }

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return fmt::format("{} ({})", err->what(), to_string(err->code()));
  }
  return e.what();
}

}  // namespace

FileMetrics evaluate_buffers(const AudioBuffer& reference, const AudioBuffer& estimate,
                             const EvaluateOptions& options) {
  FileMetrics out;
  out.duration_s = reference.duration_s();
  AudioBuffer est = estimate;
  if (est.sample_rate_hz() != reference.sample_rate_hz()) {
    if (options.strict_sample_rate) {
      out.failures.push_back(fmt::format("sample_rate: estimate is {} Hz, reference is {} Hz",
                                         est.sample_rate_hz(), reference.sample_rate_hz()));
      return out;
    }
    spdlog::warn("resampling estimate from {} Hz to {} Hz", est.sample_rate_hz(),
                 reference.sample_rate_hz());
    est = resample(est, reference.sample_rate_hz());
  }
  for (const MetricInfo& info : kMetricInfo) {
    try {
      out.values[static_cast<std::size_t>(info.metric)] = compute_metric(info.metric, reference, est);
    } catch (const std::exception& e) {
      out.failures.push_back(fmt::format("{}: {}", info.key, describe(e)));
    }
  }
  return out;
}

void recompute_aggregate(MetricReport& report) {
  report.aggregate = {};
  report.failed_files = 0;
  std::array<double, kMetricCount> weight{};
  for (const FileMetrics& f : report.per_file) {
    if (!f.failures.empty()) ++report.failed_files;
    const double w = report.duration_weighted ? f.duration_s : 1.0;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (!f.values[m]) continue;
      report.aggregate[m].mean += w * *f.values[m];
      report.aggregate[m].count += 1;
      weight[m] += w;
    }
  }
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    if (weight[m] > 0.0) report.aggregate[m].mean /= weight[m];
  }
}

MetricReport evaluate_pairlist(std::span<const EvaluatePair> pairs, const EvaluateOptions& options) {
  MetricReport report;
  report.duration_weighted = options.duration_weighted;
  report.per_file.resize(pairs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      FileMetrics result;
      try {
        const AudioBuffer ref = load_wav(pairs[i].reference);
        const AudioBuffer est = load_wav(pairs[i].estimate);
        result = evaluate_buffers(ref, est, options);
      } catch (const std::exception& e) {
        result.failures.push_back(fmt::format("load: {}", describe(e)));
      }
      result.id = pair_id(i);
      result.reference = pairs[i].reference;
      result.estimate = pairs[i].estimate;
      report.per_file[i] = std::move(result);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(pairs.size(), 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  recompute_aggregate(report);
  return report;
}

std::vector<EvaluatePair> read_pairs_tsv(const std::filesystem::path& path) {
  std::vector<EvaluatePair> pairs;
  for (const TsvRow& row : read_tsv(path)) {
    if (row.fields.size() != 2) {
      throw Error(ErrorCode::kConfig, fmt::format("{}:{}: expected 2 tab-separated columns, found {}",
                                                  path.string(), row.line, row.fields.size()));
    }
    if (pairs.empty() && row.fields[0] == "reference") continue;
    pairs.push_back({row.fields[0], row.fields[1]});
  }
  return pairs;
}

std::string format_report_json(const MetricReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format"] = "urgent-forge-report";
  doc["format_version"] = kReportFormatVersion;
  doc["tool_version"] = std::string(tool_version());
  doc["aggregation"] = report.duration_weighted ? "duration-weighted mean" : "unweighted mean";

  ordered_json metrics = ordered_json::array();
  for (const MetricInfo& info : kMetricInfo) {
    metrics.push_back({{"key", info.key},
                       {"direction", info.higher_is_better ? "higher_is_better" : "lower_is_better"},
                       {"variant", info.variant}});
  }
  doc["metrics"] = std::move(metrics);

  ordered_json aggregate = ordered_json::object();
  for (const MetricInfo& info : kMetricInfo) {
    const AggregateMetric& a = report.mean(info.metric);
    aggregate[std::string(info.key)] = {{"mean", a.count ? ordered_json(a.mean) : ordered_json(nullptr)},
                                        {"count", a.count}};
  }
  doc["aggregate"] = std::move(aggregate);
  doc["files"] = report.per_file.size();
  doc["failed_files"] = report.failed_files;

  ordered_json rows = ordered_json::array();
  for (const FileMetrics& f : report.per_file) {
    ordered_json row;
    row["id"] = f.id;
    row["reference"] = f.reference;
    row["estimate"] = f.estimate;
    row["duration_s"] = f.duration_s;
    for (const MetricInfo& info : kMetricInfo) {
      const auto& v = f.value(info.metric);
      row[std::string(info.key)] = v ? ordered_json(*v) : ordered_json(nullptr);
    }
    row["failures"] = f.failures;
    rows.push_back(std::move(row));
  }
  doc["per_file"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string format_report_table(const MetricReport& report) {
  std::vector<std::string> headings = {"id"};
  for (const MetricInfo& info : kMetricInfo) {
    headings.push_back(fmt::format("{} {}", info.label, info.higher_is_better ? "↑" : "↓"));
  }
  std::vector<std::vector<std::string>> rows;
  auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("-"); };
  for (const FileMetrics& f : report.per_file) {
    std::vector<std::string> row = {f.id};
    for (const auto& v : f.values) row.push_back(cell(v));
    rows.push_back(std::move(row));
  }
  std::vector<std::string> mean_row = {"mean"};
  for (const AggregateMetric& a : report.aggregate) {
    mean_row.push_back(a.count ? fmt::format("{:.3f}", a.mean) : std::string("-"));
  }

  // Arrows are 3 bytes but one column wide.
  auto width_of = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> width(headings.size());
  auto widen = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], width_of(r[c]));
  };
  widen(headings);
  widen(mean_row);
  for (const auto& r : rows) widen(r);

  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - width_of(r[c]), ' ');
      line += c == 0 ? r[c] + pad : "  " + pad + r[c];
    }
    out += line + "\n";
  };
  emit(headings);
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  const std::string rule(total - 2, '-');
  out += rule + "\n";
  for (const auto& r : rows) emit(r);
  out += rule + "\n";
  emit(mean_row);
  out += fmt::format("{} files, {} with failures\n", report.per_file.size(), report.failed_files);
  return out;
}

AudioBuffer sfi_wrapper_eval(const Enhancer& enhance, const AudioBuffer& degraded) {
  const int sf = degraded.sample_rate_hz();
  const AudioBuffer upsampled = resample(degraded, kFixedModelRate);
  AudioBuffer enhanced = enhance(upsampled);
  if (enhanced.sample_rate_hz() != kFixedModelRate) {
    throw Error(ErrorCode::kParameter,
                fmt::format("enhancer returned {} Hz, expected {} Hz", enhanced.sample_rate_hz(), kFixedModelRate));
  }
  AudioBuffer restored = resample(enhanced, sf);
  std::vector<double> samples(restored.samples().begin(), restored.samples().end());
  samples.resize(degraded.size(), 0.0);
  return AudioBuffer(std::move(samples), sf);
}

}  // namespace urgent
