// SPDX-License-Identifier: Apache-2.0
#include "nuva/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nuva/errors.hpp"
#include "nuva/util.hpp"

namespace nuva {

PosteriorgramSequence synthesize_posteriorgrams(const std::vector<PhoneSegment>& segments,
                                                double peak, uint64_t seed) {
  const double uniform = 1.0 / kNumPhoneClasses;
  if (!(peak > uniform) || peak > 1.0) {
    throw InvalidPeak("peak must lie in (1/45, 1], got " + std::to_string(peak));
  }
  size_t total = 0;
  for (const auto& seg : segments) {
    if (seg.class_index < 0 || seg.class_index >= kNumPhoneClasses) {
      throw IndexOutOfRange("segment class index " + std::to_string(seg.class_index));
    }
    if (seg.n_frames <= 0) throw Error("segment frame count must be positive");
    total += static_cast<size_t>(seg.n_frames);
  }

  PosteriorgramSequence seq;
  seq.resize_frames(total);
  std::ostringstream tag;
  tag << "synthetic:peak=" << peak << ",seed=" << seed;
  seq.source_id = tag.str();

  std::mt19937_64 rng(seed);
  const double rest = 1.0 - peak;
  // Jitter amplitude capped so no competitor can reach the named peak.
  double cap = peak >= 1.0 ? 0.0
                           : 0.9 * (kNumPhoneClasses - 1) * peak / rest - 0.9;
  const double jitter = std::clamp(cap, 0.0, 0.5);

  size_t t = 0;
  for (const auto& seg : segments) {
    for (int f = 0; f < seg.n_frames; ++f, ++t) {
      auto row = seq.row(t);
      if (peak >= 1.0) {
        row[seg.class_index] = 1.0;
        continue;
      }
      double sum = 0.0;
      for (int k = 0; k < kNumPhoneClasses; ++k) {
        if (k == seg.class_index) continue;
        double w = 1.0 + jitter * uniform01(rng);
        row[k] = w;
        sum += w;
      }
      const double scale = rest / sum;
      for (int k = 0; k < kNumPhoneClasses; ++k) {
        if (k == seg.class_index) continue;
        row[k] *= scale;
      }
      row[seg.class_index] = peak;
    }
  }
  return seq;
}

SyntheticSourceConfig SyntheticSourceConfig::parse(const std::string& spec) {
  SyntheticSourceConfig cfg;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw UsageError("bad synthetic source spec item: '" + item + "'");
    }
    std::string key = item.substr(0, eq);
    std::string val = item.substr(eq + 1);
    try {
      if (key == "peak") {
        cfg.peak = std::stod(val);
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key == "frames-per-phone") {
        cfg.frames_per_phone = std::stoi(val);
      } else {
        throw UsageError("unknown synthetic source key: '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw UsageError("bad value for synthetic source key '" + key + "': '" + val + "'");
    }
  }
  if (cfg.frames_per_phone < 1) throw UsageError("frames-per-phone must be positive");
  return cfg;
}

std::string SyntheticSourceConfig::source_id() const {
  std::ostringstream tag;
  tag << "synthetic:peak=" << peak << ",seed=" << seed
      << ",frames-per-phone=" << frames_per_phone;
  return tag.str();
}

std::vector<int> word_class_sequence(const std::string& word, uint64_t seed) {
  std::vector<int> classes;
  classes.reserve(word.size());
  uint64_t h = fnv1a64(word, seed ^ 0x9e3779b97f4a7c15ull);
  for (size_t i = 0; i < word.size(); ++i) {
    h = fnv1a64(&word[i], 1, h);
    classes.push_back(static_cast<int>(h % (kNumPhoneClasses - 1)));
  }
  if (classes.empty()) classes.push_back(kSilenceClass);
  return classes;
}

PosteriorgramSequence synthesize_for_word(const std::string& word, size_t n_frames,
                                          const SyntheticSourceConfig& cfg) {
  if (n_frames == 0) throw EmptyOutput("cannot synthesize an empty posteriorgram");
  std::vector<int> classes = word_class_sequence(word, cfg.seed);
  size_t n_phones = std::max<size_t>(
      1, std::min(classes.size(), n_frames / std::max(1, cfg.frames_per_phone)));
  classes.resize(n_phones);

  std::vector<PhoneSegment> segments;
  size_t base = n_frames / n_phones;
  size_t extra = n_frames % n_phones;
  for (size_t i = 0; i < n_phones; ++i) {
    int frames = static_cast<int>(base + (i < extra ? 1 : 0));
    segments.push_back({classes[i], frames});
  }
  uint64_t seq_seed = fnv1a64(word, cfg.seed ^ 0xa5a5a5a5a5a5a5a5ull);
  PosteriorgramSequence seq = synthesize_posteriorgrams(segments, cfg.peak, seq_seed);
  seq.source_id = cfg.source_id();
  return seq;
}

} // namespace nuva
