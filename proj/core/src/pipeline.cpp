// SPDX-License-Identifier: Apache-2.0
#include "nuva/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "nuva/errors.hpp"
#include "nuva/frontend.hpp"
#include "nuva/util.hpp"

namespace nuva {

std::string PosteriorgramSource::id() const {
  switch (kind) {
    case Kind::CacheOnly: return "cache";
    case Kind::Model: return model ? model->source_id : "gru:unset";
    case Kind::Synthetic: return synthetic.source_id();
  }
  return "cache";
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

bool is_cache_path(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".pg") == 0;
}

PreparedInput prepare_input(const std::string& path, const std::string& base_dir,
                            const PosteriorgramSource& source) {
  PreparedInput input;
  const std::string full = resolve_path(path, base_dir);
  if (is_cache_path(full)) {
    input.cached = load_posteriorgrams(full);
    const size_t t_count = input.cached->frames();
    const double hop_s = source.frontend.hop_ms / 1000.0;
    const double frame_s = source.frontend.frame_len_ms / 1000.0;
    input.duration_s = t_count == 0 ? 0.0 : frame_s + (t_count - 1) * hop_s;
  } else {
    if (source.kind == PosteriorgramSource::Kind::CacheOnly) {
      throw UsageError("wav input '" + path + "' needs --model or --synthetic");
    }
    input.clip = load_wav(full);
    input.duration_s = input.clip->duration_s();
  }
  return input;
}

PosteriorgramSequence realize_posteriorgrams(const PreparedInput& input,
                                             const std::string& target_word,
                                             const PosteriorgramSource& source) {
  if (input.cached) return *input.cached;
  if (!input.clip) throw Error("prepared input holds neither audio nor cache");
  FeatureSequence feats = extract_features(*input.clip, source.frontend);
  if (source.kind == PosteriorgramSource::Kind::Model) {
    return infer_posteriorgrams(feats, *source.model);
  }
  return synthesize_for_word(target_word, feats.frames(), source.synthetic);
}

std::map<std::string, TemplateSet> build_template_sets(
    const std::vector<TemplateRecord>& records, const PosteriorgramSource& source,
    const std::string& base_dir, int threads) {
  std::vector<PosteriorgramSequence> loaded(records.size());
  parallel_for(records.size(), threads, [&](size_t i) {
    PreparedInput input = prepare_input(records[i].audio_path, base_dir, source);
    loaded[i] = realize_posteriorgrams(input, records[i].target_word, source);
  });
  std::map<std::string, TemplateSet> sets;
  for (size_t i = 0; i < records.size(); ++i) {
    TemplateSet& set = sets[records[i].target_word];
    set.target_word = records[i].target_word;
    set.speaker_ids.push_back(records[i].speaker_id);
    set.templates.push_back(std::move(loaded[i]));
  }
  return sets;
}

std::vector<AttemptScore> score_attempts(const std::vector<AttemptRecord>& attempts,
                                         const std::map<std::string, TemplateSet>& templates,
                                         const PosteriorgramSource& source,
                                         const Combiner& combiner,
                                         const std::string& base_dir, int threads) {
  for (const auto& rec : attempts) {
    auto it = templates.find(rec.target_word);
    if (it == templates.end() || it->second.templates.empty()) {
      throw MissingTemplate("no templates enrolled for word '" + rec.target_word + "'");
    }
  }
  std::vector<AttemptScore> scores(attempts.size());
  parallel_for(attempts.size(), threads, [&](size_t i) {
    const AttemptRecord& rec = attempts[i];
    PreparedInput input = prepare_input(rec.audio_path, base_dir, source);
    PosteriorgramSequence pg = realize_posteriorgrams(input, rec.target_word, source);
    const TemplateSet& set = templates.at(rec.target_word);
    AttemptScore score;
    score.record = rec;
    score.per_template_distance.reserve(set.templates.size());
    for (const auto& tpl : set.templates) {
      score.per_template_distance.push_back(dtw_distance(tpl, pg).distance);
    }
    score.combined_distance = combine(score.per_template_distance, combiner);
    scores[i] = std::move(score);
  });
  return scores;
}

std::vector<ScoredAttempt> to_scored_attempts(const std::vector<AttemptScore>& scores) {
  std::vector<ScoredAttempt> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    out.push_back({s.record.patient_id, s.record.target_word, s.combined_distance,
                   s.record.slt1_binary});
  }
  return out;
}

double ThresholdMap::for_patient(const std::string& patient_id) const {
  auto it = per_patient.find(patient_id);
  if (it != per_patient.end()) return it->second;
  if (fallback > 0.0) return fallback;
  throw MissingPatientData("no threshold for patient '" + patient_id + "'");
}

ThresholdMap ThresholdMap::fixed(double threshold) {
  if (!(threshold > 0.0)) {
    throw InvalidThreshold("threshold must be positive");
  }
  ThresholdMap m;
  m.fallback = threshold;
  return m;
}

std::vector<VerificationRow> apply_thresholds(const std::vector<AttemptScore>& scores,
                                              const ThresholdMap& thresholds) {
  std::vector<VerificationRow> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) {
    VerificationRow row;
    row.threshold = thresholds.for_patient(s.record.patient_id);
    if (!(row.threshold > 0.0)) {
      throw InvalidThreshold("threshold must be positive");
    }
    row.verdict = s.combined_distance < row.threshold ? Binary::Correct : Binary::Incorrect;
    row.score = s;
    rows.push_back(std::move(row));
  }
  return rows;
}

SummaryStats summarize_samples(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.range = s.max - s.min;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

LatencyReport run_latency_benchmark(const std::vector<AttemptRecord>& attempts,
                                    const std::map<std::string, TemplateSet>& templates,
                                    const PosteriorgramSource& source,
                                    const Combiner& combiner, const ThresholdMap& thresholds,
                                    const std::string& base_dir, int warmup, int repeats) {
  if (attempts.empty()) throw EmptyAttempts("no attempts to benchmark");
  if (repeats < 1) throw Error("repeats must be >= 1");

  std::vector<PreparedInput> inputs;
  inputs.reserve(attempts.size());
  for (const auto& rec : attempts) {
    auto it = templates.find(rec.target_word);
    if (it == templates.end() || it->second.templates.empty()) {
      throw MissingTemplate("no templates enrolled for word '" + rec.target_word + "'");
    }
    inputs.push_back(prepare_input(rec.audio_path, base_dir, source));
  }

  auto process = [&](size_t i) {
    const AttemptRecord& rec = attempts[i];
    PosteriorgramSequence pg = realize_posteriorgrams(inputs[i], rec.target_word, source);
    const TemplateSet& set = templates.at(rec.target_word);
    std::vector<double> dists;
    dists.reserve(set.templates.size());
    for (const auto& tpl : set.templates) {
      dists.push_back(dtw_distance(tpl, pg).distance);
    }
    double combined = combine(dists, combiner);
    return combined < thresholds.for_patient(rec.patient_id) ? Binary::Correct
                                                             : Binary::Incorrect;
  };

  for (int w = 0; w < warmup; ++w) {
    process(static_cast<size_t>(w) % attempts.size());
  }

  LatencyReport report;
  report.n_attempts = attempts.size();
  report.warmup = warmup;
  report.repeats = repeats;
  using clock = std::chrono::steady_clock;
  volatile int sink = 0;
  for (int r = 0; r < repeats; ++r) {
    for (size_t i = 0; i < attempts.size(); ++i) {
      auto start = clock::now();
      Binary verdict = process(i);
      auto stop = clock::now();
      sink = sink + (verdict == Binary::Correct ? 1 : 0);
      double elapsed = std::chrono::duration<double>(stop - start).count();
      report.per_attempt_s.push_back(elapsed);
      report.duration_s.push_back(inputs[i].duration_s);
      report.per_speech_second_s.push_back(elapsed / inputs[i].duration_s);
    }
  }
  report.attempt_summary = summarize_samples(report.per_attempt_s);
  report.per_second_summary = summarize_samples(report.per_speech_second_s);
  return report;
}

} // namespace nuva
