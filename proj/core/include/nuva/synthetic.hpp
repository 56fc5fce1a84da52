// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_SYNTHETIC_HPP
#define NUVA_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nuva/posteriorgram.hpp"

namespace nuva {

struct PhoneSegment {
  int class_index = 0; // [0, kNumPhoneClasses)
  int n_frames = 0;    // > 0
};

// Builds a posteriorgram where each segment's frames put `peak` probability
// on the named class and spread the remaining mass over the other classes
// with seeded jitter. Rows sum to 1 and the named class is the strict row
// maximum. peak must lie in (1/45, 1]; peak == 1 yields one-hot rows.
// Deterministic for a given (segments, peak, seed).
PosteriorgramSequence synthesize_posteriorgrams(const std::vector<PhoneSegment>& segments,
                                                double peak, uint64_t seed);

struct SyntheticSourceConfig {
  double peak = 0.95;
  uint64_t seed = 0;
  int frames_per_phone = 8;

  // Accepts "peak=0.95,seed=7,frames-per-phone=8"; every key optional.
  static SyntheticSourceConfig parse(const std::string& spec);
  std::string source_id() const;
};

// Derives a deterministic pseudo phone sequence from the target word and
// stretches it over n_frames frames. Stands in for the acoustic model when
// exercising the pipeline without trained weights.
PosteriorgramSequence synthesize_for_word(const std::string& word, size_t n_frames,
                                          const SyntheticSourceConfig& cfg);

// Pseudo phone class sequence for a word: one class per character, hashed
// into the non-silence range, deterministic in (word, seed).
std::vector<int> word_class_sequence(const std::string& word, uint64_t seed);

} // namespace nuva

#endif
