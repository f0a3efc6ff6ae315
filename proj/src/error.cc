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

#include "urgent/error.h"

namespace urgent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kChannel: return "channel";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kWrite: return "write";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kSilence: return "silence";
    case ErrorCode::kDegenerateNoise: return "degenerate-noise";
    case ErrorCode::kDegenerateSpeech: return "degenerate-speech";
    case ErrorCode::kDegenerateRir: return "degenerate-rir";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kMissingScore: return "missing-score";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kDuration: return "duration";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace urgent
