// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_PIPELINE_HPP
#define NUVA_PIPELINE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nuva/audio.hpp"
#include "nuva/calibration.hpp"
#include "nuva/gru_model.hpp"
#include "nuva/manifest.hpp"
#include "nuva/matcher.hpp"
#include "nuva/synthetic.hpp"

namespace nuva {

// Where attempt and template posteriorgrams come from. Manifests may point at
// ".pg" caches directly (CacheOnly); wav inputs need either a trained model
// or the deterministic synthetic source.
struct PosteriorgramSource {
  enum class Kind { CacheOnly, Model, Synthetic };
  Kind kind = Kind::CacheOnly;
  std::shared_ptr<const GruModel> model;
  SyntheticSourceConfig synthetic;
  FrontendConfig frontend;

  std::string id() const;
};

// Relative manifest entries resolve against the manifest's directory.
std::string resolve_path(const std::string& path, const std::string& base_dir);
bool is_cache_path(const std::string& path);

// A manifest input loaded into memory, so later processing is compute only.
struct PreparedInput {
  std::optional<AudioClip> clip;
  std::optional<PosteriorgramSequence> cached;
  double duration_s = 0.0;
};

PreparedInput prepare_input(const std::string& path, const std::string& base_dir,
                            const PosteriorgramSource& source);

// wav inputs: features then model inference (or the synthetic stand-in);
// cache inputs: returned as loaded.
PosteriorgramSequence realize_posteriorgrams(const PreparedInput& input,
                                             const std::string& target_word,
                                             const PosteriorgramSource& source);

std::map<std::string, TemplateSet> build_template_sets(
    const std::vector<TemplateRecord>& records, const PosteriorgramSource& source,
    const std::string& base_dir, int threads = 1);

struct AttemptScore {
  AttemptRecord record;
  std::vector<double> per_template_distance;
  double combined_distance = 0.0;
};

// DTW distance of every attempt against its word's templates, in manifest
// order. Throws MissingTemplate when a target word has no templates.
std::vector<AttemptScore> score_attempts(const std::vector<AttemptRecord>& attempts,
                                         const std::map<std::string, TemplateSet>& templates,
                                         const PosteriorgramSource& source,
                                         const Combiner& combiner,
                                         const std::string& base_dir, int threads = 1);

std::vector<ScoredAttempt> to_scored_attempts(const std::vector<AttemptScore>& scores);

// Per patient decision thresholds with a shared fallback.
struct ThresholdMap {
  double fallback = 0.0;
  std::map<std::string, double> per_patient;

  double for_patient(const std::string& patient_id) const;
  // Throws InvalidThreshold unless threshold > 0.
  static ThresholdMap fixed(double threshold);
};

struct VerificationRow {
  AttemptScore score;
  double threshold = 0.0;
  Binary verdict = Binary::Incorrect;
};

std::vector<VerificationRow> apply_thresholds(const std::vector<AttemptScore>& scores,
                                              const ThresholdMap& thresholds);

// Wall clock latency of the compute stages (features, inference, alignment,
// decision) per attempt, measured on the monotonic clock after `warmup`
// untimed passes over the first inputs. Entries are repeats x attempts, in
// manifest order.
struct LatencyReport {
  size_t n_attempts = 0;
  int warmup = 0;
  int repeats = 0;
  std::vector<double> per_attempt_s;
  std::vector<double> duration_s;
  std::vector<double> per_speech_second_s; // per_attempt_s[i] / duration_s[i]
  SummaryStats attempt_summary;
  SummaryStats per_second_summary;
};

LatencyReport run_latency_benchmark(const std::vector<AttemptRecord>& attempts,
                                    const std::map<std::string, TemplateSet>& templates,
                                    const PosteriorgramSource& source,
                                    const Combiner& combiner, const ThresholdMap& thresholds,
                                    const std::string& base_dir, int warmup = 3,
                                    int repeats = 1);

SummaryStats summarize_samples(const std::vector<double>& values);

} // namespace nuva

#endif
