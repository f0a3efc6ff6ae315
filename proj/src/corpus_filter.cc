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

#include "urgent/corpus_filter.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "urgent/error.h"
#include "urgent/tsv.h"

namespace urgent {

double speech_activity_ratio(const AudioBuffer& x, const VadOptions& options) {
  if (x.empty()) return 0.0;
  const int sf = x.sample_rate_hz();
  const auto frame = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.frame_duration_s * sf)));
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.hop_duration_s * sf)));
  const std::size_t len = std::min(frame, x.size());
  const std::size_t frames = x.size() >= frame ? 1 + (x.size() - frame) / hop : 1;

  const auto s = x.samples();
  std::vector<double> level(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += s[t * hop + i] * s[t * hop + i];
    level[t] = 10.0 * std::log10(acc / static_cast<double>(len) + 1e-20);
  }

  std::vector<double> sorted = level;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::floor(options.noise_percentile * static_cast<double>(frames - 1)));
  const double noise_floor = sorted[rank];
  const double loudest = sorted.back();
  const double threshold =
      std::max(options.absolute_floor_dbfs,
               std::min(noise_floor + options.margin_db, loudest - options.peak_headroom_db));

  const auto active = std::count_if(level.begin(), level.end(),
                                    [&](double l) { return l > threshold; });
  return static_cast<double>(active) / static_cast<double>(frames);
}

void FilterPolicy::validate() const {
  if (!(min_speech_ratio >= 0.0 && min_speech_ratio <= 1.0)) {
    throw Error(ErrorCode::kConfig, "min_speech_ratio must lie in [0, 1]");
  }
  for (const auto& t : {min_ovrl, min_sig, min_bak}) {
    if (t && std::isnan(*t)) throw Error(ErrorCode::kConfig, "score threshold is NaN");
  }
}

FilterResult filter_corpus(std::span<const Candidate> candidates, const FilterPolicy& policy) {
  policy.validate();
  FilterResult result;
  for (const Candidate& c : candidates) {
    if (policy.min_speech_ratio > 0.0 && !c.speech_ratio) {
      throw Error(ErrorCode::kMissingScore, "no speech activity ratio for " + c.path);
    }
    if (policy.scores_required() && !c.scores) {
      throw Error(ErrorCode::kMissingScore, "no quality scores for " + c.path);
    }
    std::string reason;
    if (policy.min_speech_ratio > 0.0 && *c.speech_ratio < policy.min_speech_ratio) {
      reason = "speech_ratio";
    } else if (policy.min_ovrl && c.scores->ovrl < *policy.min_ovrl) {
      reason = "ovrl";
    } else if (policy.min_sig && c.scores->sig < *policy.min_sig) {
      reason = "sig";
    } else if (policy.min_bak && c.scores->bak < *policy.min_bak) {
      reason = "bak";
    }
    if (reason.empty()) {
      result.kept.push_back(c);
    } else {
      result.rejected.push_back({c, std::move(reason)});
    }
  }
  return result;
}

std::vector<ScoreRecord> read_score_tsv(const std::filesystem::path& path) {
  std::vector<ScoreRecord> records;
  for (const auto& row : read_tsv(path)) {
    if (row.fields.size() != 4) {
      throw Error(ErrorCode::kConfig, fmt::format("{}:{}: expected 4 columns (path, ovrl, sig, bak)",
                                                  path.string(), row.line));
    }
    if (row.fields[0] == "path") continue;
    ScoreRecord r;
    r.path = row.fields[0];
    r.ovrl = parse_double(row.fields[1], path, row.line);
    r.sig = parse_double(row.fields[2], path, row.line);
    r.bak = parse_double(row.fields[3], path, row.line);
    if (!std::isfinite(r.ovrl) || !std::isfinite(r.sig) || !std::isfinite(r.bak)) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("{}:{}: scores must be finite", path.string(), row.line));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<Candidate> join_scores(std::span<const std::string> paths,
                                   std::span<const ScoreRecord> scores) {
  std::unordered_map<std::string, const ScoreRecord*> by_path;
  for (const auto& s : scores) by_path.emplace(s.path, &s);
  std::vector<Candidate> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    Candidate c{p, std::nullopt, std::nullopt};
    if (auto it = by_path.find(p); it != by_path.end()) c.scores = *it->second;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::string score_fields(const Candidate& c) {
  if (!c.scores) return "\t\t";
  return fmt::format("{}\t{}\t{}", c.scores->ovrl, c.scores->sig, c.scores->bak);
}

}  // namespace

void write_kept_tsv(const FilterResult& result, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "path\tspeech_ratio\tovrl\tsig\tbak\n";
  for (const auto& c : result.kept) {
    out << c.path << '\t' << optional_field(c.speech_ratio) << '\t' << score_fields(c) << '\n';
  }
  write_text_file(path, out.str());
}

void write_rejected_tsv(const FilterResult& result, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "path\treason\tspeech_ratio\tovrl\tsig\tbak\n";
  for (const auto& r : result.rejected) {
    const Candidate& c = r.candidate;
    out << c.path << '\t' << r.reason << '\t' << optional_field(c.speech_ratio) << '\t'
        << score_fields(c) << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace urgent
