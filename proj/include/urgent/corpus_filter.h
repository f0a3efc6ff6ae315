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

// Voice-activity screening and score-threshold filtering of candidate
// speech files.

#ifndef URGENT_CORPUS_FILTER_H_
#define URGENT_CORPUS_FILTER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urgent/audio_io.h"

namespace urgent {

struct VadOptions {
  double frame_duration_s = 0.030;
  double hop_duration_s = 0.010;
  double absolute_floor_dbfs = -60.0;
  double margin_db = 10.0;            // above the noise floor estimate
  double noise_percentile = 0.10;     // of frame RMS levels
  double peak_headroom_db = 10.0;     // threshold never exceeds loudest frame minus this
};

// Energy VAD. A frame is active when its RMS level exceeds
//   max(absolute_floor, min(noise_floor + margin, loudest - peak_headroom)).
// Returns the active fraction of frames.
double speech_activity_ratio(const AudioBuffer& x, const VadOptions& options = {});

// Externally computed quality scores (DNSMOS-style, typically in [1, 5]).
struct ScoreRecord {
  std::string path;
  double ovrl = 0.0;
  double sig = 0.0;
  double bak = 0.0;
};

// Unset score thresholds are inactive.
struct FilterPolicy {
  double min_speech_ratio = 0.0;
  std::optional<double> min_ovrl;
  std::optional<double> min_sig;
  std::optional<double> min_bak;

  bool scores_required() const { return min_ovrl || min_sig || min_bak; }
  void validate() const;
};

struct Candidate {
  std::string path;
  std::optional<double> speech_ratio;
  std::optional<ScoreRecord> scores;
};

struct Rejection {
  Candidate candidate;
  std::string reason;  // first failed criterion: speech_ratio, ovrl, sig, bak
};

struct FilterResult {
  std::vector<Candidate> kept;
  std::vector<Rejection> rejected;
};

// Keeps a candidate iff every active criterion passes. Criteria are checked
// in the fixed order speech_ratio, ovrl, sig, bak. Throws kMissingScore
// when an active criterion has no value for some candidate.
FilterResult filter_corpus(std::span<const Candidate> candidates, const FilterPolicy& policy);

// path \t ovrl \t sig \t bak, optional header row starting with "path".
std::vector<ScoreRecord> read_score_tsv(const std::filesystem::path& path);

// Joins a path list with its score rows; paths without a row get no scores.
std::vector<Candidate> join_scores(std::span<const std::string> paths,
                                   std::span<const ScoreRecord> scores);

void write_kept_tsv(const FilterResult& result, const std::filesystem::path& path);
void write_rejected_tsv(const FilterResult& result, const std::filesystem::path& path);

}  // namespace urgent

#endif  // URGENT_CORPUS_FILTER_H_
