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

#ifndef URGENT_ERROR_H_
#define URGENT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace urgent {

enum class ErrorCode {
  kFormat,            // malformed container
  kChannel,           // channel count != 1
  kEncoding,          // unsupported sample encoding
  kWrite,             // output could not be written
  kIo,                // input could not be opened/read
  kParameter,         // argument outside its documented domain
  kSilence,           // input carries no energy where energy is required
  kDegenerateNoise,
  kDegenerateSpeech,
  kDegenerateRir,
  kConfig,
  kMissingScore,
  kUndefinedMetric,
  kDuration,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace urgent

#endif  // URGENT_ERROR_H_
