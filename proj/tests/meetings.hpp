/* Copyright 2026 The MCSA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Random word-level meeting annotations for segmenter tests.

#ifndef MCSA_TESTS_MEETINGS_HPP_
#define MCSA_TESTS_MEETINGS_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "mcsa/ami_segmenter.hpp"

namespace mcsa::testing {

// Words on a 10 ms grid; each speaker talks in bursts with random pauses,
// so speakers overlap at random.
inline std::vector<segmenter::WordAnnotation> random_meeting(std::mt19937_64& rng, int speakers,
                                                             double length_s) {
  std::uniform_int_distribution<int> word_cs(15, 60), gap_cs(0, 40), pause_cs(50, 800);
  std::bernoulli_distribution pause(0.2);
  std::vector<segmenter::WordAnnotation> out;
  for (int s = 0; s < speakers; ++s) {
    int t = std::uniform_int_distribution<int>(0, 300)(rng);
    int n = 0;
    while (t < length_s * 100) {
      const int len = word_cs(rng);
      out.push_back({"w" + std::to_string(n++), "spk" + std::to_string(s), t / 100.0,
                     (t + len) / 100.0});
      t += len + (pause(rng) ? pause_cs(rng) : gap_cs(rng));
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace mcsa::testing

#endif  // MCSA_TESTS_MEETINGS_HPP_
