// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_POSTERIORGRAM_HPP
#define NUVA_POSTERIORGRAM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nuva/phone_classes.hpp"

namespace nuva {

// T x 45 row stochastic matrix: one posterior distribution per 10 ms frame.
struct PosteriorgramSequence {
  std::vector<double> values; // row major, frames() * kNumPhoneClasses
  std::string source_id;      // producer tag, e.g. "gru:<hash>" or "synthetic:..."

  size_t frames() const { return values.size() / kNumPhoneClasses; }

  std::span<const double, kNumPhoneClasses> row(size_t t) const {
    return std::span<const double, kNumPhoneClasses>(
        values.data() + t * kNumPhoneClasses, kNumPhoneClasses);
  }
  std::span<double, kNumPhoneClasses> row(size_t t) {
    return std::span<double, kNumPhoneClasses>(
        values.data() + t * kNumPhoneClasses, kNumPhoneClasses);
  }

  void resize_frames(size_t t) { values.assign(t * kNumPhoneClasses, 0.0); }

  // Probabilities in [0, 1] and every row sum within tol of 1.
  bool is_row_stochastic(double tol = 1e-6) const;
};

// Binary cache container, little endian:
//   byte[7] magic "NUVAPG1", u32 frames, u32 classes (45), then
//   frames*classes float32 values in row major order.
void save_posteriorgrams(const std::string& path, const PosteriorgramSequence& seq);
PosteriorgramSequence load_posteriorgrams(const std::string& path);

// Cache key for a clip processed by a given posteriorgram source.
std::string posteriorgram_cache_key(const void* audio_bytes, size_t len,
                                    const std::string& source_id);

} // namespace nuva

#endif
