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

#include <catch_amalgamated.hpp>

#include <vector>

#include "support.h"
#include "urgent/bandwidth.h"
#include "urgent/error.h"
#include "urgent/fir.h"

using namespace urgent;
namespace ut = urgent::testing;

namespace {

// White noise through a design_lowpass filter with the given transition.
AudioBuffer lowpassed_noise(double cutoff_hz, int sf, double transition_hz, double seconds = 2.0,
                            std::uint64_t seed = 1) {
  const AudioBuffer noise = ut::noise_buffer(static_cast<std::size_t>(seconds * sf), sf, seed, 0.3);
  const FirFilter f = design_lowpass(cutoff_hz, sf, transition_hz);
  return convolve(noise, f.taps, ConvolveMode::kSameDelayCompensated);
}

}  // namespace

TEST_CASE("full-band noise reaches Nyquist") {
  const BandwidthEstimate e = estimate_effective_bandwidth(ut::noise_buffer(32000, 16000, 4));
  CHECK(e.effective_bw_hz >= 7200.0);
  CHECK(e.effective_bw_hz <= 8000.0);
  CHECK(e.analyzed_frames > 0);
}

TEST_CASE("low-passed noise reports its cutoff") {
  const BandwidthEstimate e = estimate_effective_bandwidth(lowpassed_noise(4000.0, 48000, 200.0));
  CHECK(e.effective_bw_hz >= 3800.0);
  CHECK(e.effective_bw_hz <= 4400.0);
  CHECK(e.confidence_db > 40.0);
}

TEST_CASE("silence and short input are errors") {
  auto code_of = [](const AudioBuffer& x) {
    try {
      estimate_effective_bandwidth(x);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code_of(AudioBuffer(std::vector<double>(16000, 0.0), 16000)) == ErrorCode::kSilence);
  CHECK(code_of(AudioBuffer(std::vector<double>(16000, 1e-7), 16000)) == ErrorCode::kSilence);
  CHECK(code_of(ut::noise_buffer(700, 16000, 1)) == ErrorCode::kParameter);
}

TEST_CASE("best matching rate is the lowest covering rate") {
  CHECK(best_matching_sf(4000) == 8000);
  CHECK(best_matching_sf(11000) == 22050);
  CHECK(best_matching_sf(23900) == 48000);
  CHECK(best_matching_sf(11025) == 22050);
  CHECK(best_matching_sf(11025.5) == 24000);
  CHECK(best_matching_sf(0) == 8000);
  CHECK(best_matching_sf(30000) == 48000);
  const std::vector<int> allowed = {16000, 48000};
  CHECK(best_matching_sf(3000, allowed) == 16000);
  CHECK(best_matching_sf(9000, allowed) == 48000);
}

TEST_CASE("best matching rate is monotone in bandwidth") {
  int previous = 0;
  for (double bw = 0.0; bw <= 26000.0; bw += 25.0) {
    const int sf = best_matching_sf(bw);
    REQUIRE(sf >= previous);
    previous = sf;
  }
}

TEST_CASE("estimates do not depend on level") {
  const AudioBuffer x = lowpassed_noise(7000.0, 32000, 350.0, 1.0, 8);
  const double bw = estimate_effective_bandwidth(x).effective_bw_hz;
  for (double g : {1e-3, 0.1, 2.0}) {
    std::vector<double> scaled(x.samples().begin(), x.samples().end());
    for (double& v : scaled) v *= g;
    CHECK(estimate_effective_bandwidth(AudioBuffer(scaled, 32000)).effective_bw_hz == bw);
  }
}

TEST_CASE("normalization resamples to the covering rate") {
  const AudioBuffer x = lowpassed_noise(7500.0, 48000, 100.0);
  const AudioBuffer y = normalize_to_effective_sf(x);
  CHECK(y.sample_rate_hz() == 16000);
  CHECK(y.size() == x.size() / 3);
  // A second pass keeps the rate.
  CHECK(normalize_to_effective_sf(y).sample_rate_hz() == 16000);
}

TEST_CASE("full-band and lowest-rate inputs keep their rate") {
  const AudioBuffer x16 = ut::noise_buffer(16000, 16000, 2);
  CHECK(normalize_to_effective_sf(x16) == x16);
  const AudioBuffer x8 = ut::noise_buffer(8000, 8000, 3);
  CHECK(normalize_to_effective_sf(x8) == x8);
}

TEST_CASE("normalization propagates silence") {
  CHECK_THROWS_AS(normalize_to_effective_sf(AudioBuffer(std::vector<double>(48000, 0.0), 48000)), Error);
}
