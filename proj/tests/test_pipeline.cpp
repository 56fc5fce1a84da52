// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <doctest.h>

#include "nuva/errors.hpp"
#include "nuva/frontend.hpp"
#include "nuva/gru_model.hpp"
#include "nuva/matcher.hpp"
#include "nuva/pipeline.hpp"
#include "nuva/posteriorgram.hpp"
#include "nuva/synthetic.hpp"
#include "test_util.hpp"

using namespace nuva;
using nuva_tests::TempDir;

namespace {

PosteriorgramSequence make_pg(int cls, int frames, double peak, uint64_t seed) {
  return synthesize_posteriorgrams({{cls, frames}}, peak, seed);
}

AudioClip tone_clip(double freq_hz, size_t n, double amp = 0.5) {
  AudioClip clip;
  clip.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    clip.samples[i] =
        static_cast<int16_t>(std::lround(amp * 32000.0 * std::sin(2.0 * 3.141592653589793 *
                                                                  freq_hz * i / 16000.0)));
  }
  return clip;
}

PosteriorgramSource synthetic_source(uint64_t seed = 1) {
  PosteriorgramSource source;
  source.kind = PosteriorgramSource::Kind::Synthetic;
  source.synthetic.seed = seed;
  return source;
}

}  // namespace

TEST_CASE("resolve_path joins relative entries against the manifest directory") {
  CHECK(resolve_path("/abs/x.pg", "/other") == "/abs/x.pg");
  CHECK(resolve_path("x.pg", "/base") == "/base/x.pg");
  CHECK(resolve_path("sub/x.pg", "/base") == "/base/sub/x.pg");
  CHECK(resolve_path("x.pg", "") == "x.pg");

  CHECK(is_cache_path("a.pg"));
  CHECK(is_cache_path("dir/a.b.pg"));
  CHECK_FALSE(is_cache_path("a.wav"));
  CHECK_FALSE(is_cache_path("pg"));
  CHECK_FALSE(is_cache_path("a.pgx"));
}

TEST_CASE("prepare_input loads caches and derives duration from the frame clock") {
  TempDir tmp;
  const PosteriorgramSequence pg = make_pg(3, 25, 0.9, 7);
  save_posteriorgrams(tmp.file("a.pg"), pg);

  PosteriorgramSource cache_only;
  const PreparedInput input = prepare_input("a.pg", tmp.path.string(), cache_only);
  REQUIRE(input.cached.has_value());
  CHECK_FALSE(input.clip.has_value());
  CHECK(input.cached->frames() == 25);
  CHECK(input.duration_s == doctest::Approx(0.030 + 24 * 0.010).epsilon(1e-12));

  const PosteriorgramSequence one = make_pg(3, 1, 0.9, 7);
  save_posteriorgrams(tmp.file("one.pg"), one);
  CHECK(prepare_input("one.pg", tmp.path.string(), cache_only).duration_s ==
        doctest::Approx(0.030).epsilon(1e-12));
}

TEST_CASE("prepare_input needs a realizing source for wav entries") {
  TempDir tmp;
  write_wav(tmp.file("a.wav"), tone_clip(440.0, 16000));

  PosteriorgramSource cache_only;
  CHECK_THROWS_AS(prepare_input("a.wav", tmp.path.string(), cache_only), UsageError);

  const PreparedInput input = prepare_input("a.wav", tmp.path.string(), synthetic_source());
  REQUIRE(input.clip.has_value());
  CHECK_FALSE(input.cached.has_value());
  CHECK(input.clip->samples.size() == 16000);
  CHECK(input.duration_s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("realize_posteriorgrams passes caches through and synthesizes for wavs") {
  TempDir tmp;
  const PosteriorgramSequence pg = make_pg(11, 12, 0.8, 3);
  save_posteriorgrams(tmp.file("c.pg"), pg);
  write_wav(tmp.file("a.wav"), tone_clip(300.0, 16000));

  PosteriorgramSource cache_only;
  const PreparedInput cached = prepare_input("c.pg", tmp.path.string(), cache_only);
  const PosteriorgramSequence out = realize_posteriorgrams(cached, "word", cache_only);
  REQUIRE(out.frames() == 12);
  for (size_t i = 0; i < out.values.size(); ++i) {
    CHECK(out.values[i] == cached.cached->values[i]);
  }

  const PosteriorgramSource syn = synthetic_source(5);
  const PreparedInput wav = prepare_input("a.wav", tmp.path.string(), syn);
  const PosteriorgramSequence got = realize_posteriorgrams(wav, "tone", syn);
  const FeatureSequence feats = extract_features(*wav.clip, syn.frontend);
  REQUIRE(got.frames() == feats.frames());
  const PosteriorgramSequence want = synthesize_for_word("tone", feats.frames(), syn.synthetic);
  CHECK(got.values == want.values);
}

TEST_CASE("realize_posteriorgrams runs the model on wav inputs") {
  TempDir tmp;
  write_wav(tmp.file("a.wav"), tone_clip(500.0, 8000));

  PosteriorgramSource source;
  source.kind = PosteriorgramSource::Kind::Model;
  source.model = std::make_shared<GruModel>(make_test_model(2, 8, kNumFeatures,
                                                            kNumPhoneClasses, 17));
  const PreparedInput input = prepare_input("a.wav", tmp.path.string(), source);
  const PosteriorgramSequence got = realize_posteriorgrams(input, "w", source);
  const PosteriorgramSequence want =
      infer_posteriorgrams(extract_features(*input.clip, source.frontend), *source.model);
  CHECK(got.values == want.values);
  CHECK(got.is_row_stochastic());
}

TEST_CASE("build_template_sets groups templates by word keeping manifest order") {
  TempDir tmp;
  const PosteriorgramSequence a1 = make_pg(1, 6, 0.9, 1);
  const PosteriorgramSequence a2 = make_pg(1, 7, 0.9, 2);
  const PosteriorgramSequence b1 = make_pg(2, 8, 0.9, 3);
  save_posteriorgrams(tmp.file("a1.pg"), a1);
  save_posteriorgrams(tmp.file("a2.pg"), a2);
  save_posteriorgrams(tmp.file("b1.pg"), b1);

  const std::vector<TemplateRecord> records = {
      {"alpha", "S1", "a1.pg"}, {"beta", "S1", "b1.pg"}, {"alpha", "S2", "a2.pg"}};
  PosteriorgramSource cache_only;
  const auto sets = build_template_sets(records, cache_only, tmp.path.string());
  REQUIRE(sets.size() == 2);
  REQUIRE(sets.count("alpha") == 1);
  REQUIRE(sets.count("beta") == 1);
  const TemplateSet& alpha = sets.at("alpha");
  REQUIRE(alpha.templates.size() == 2);
  CHECK(alpha.speaker_ids == std::vector<std::string>{"S1", "S2"});
  CHECK(alpha.templates[0].values == load_posteriorgrams(tmp.file("a1.pg")).values);
  CHECK(alpha.templates[1].values == load_posteriorgrams(tmp.file("a2.pg")).values);
  CHECK(sets.at("beta").templates[0].frames() == 8);

  const auto threaded = build_template_sets(records, cache_only, tmp.path.string(), 3);
  CHECK(threaded.at("alpha").templates[1].values == alpha.templates[1].values);
}

namespace {

struct ScoringFixture {
  TempDir tmp;
  std::vector<TemplateRecord> template_records;
  std::vector<AttemptRecord> attempts;

  ScoringFixture() {
    save_posteriorgrams(tmp.file("ta1.pg"), make_pg(1, 6, 0.9, 1));
    save_posteriorgrams(tmp.file("ta2.pg"), make_pg(1, 6, 0.9, 2));
    save_posteriorgrams(tmp.file("tb1.pg"), make_pg(2, 6, 0.9, 3));
    template_records = {{"alpha", "S1", "ta1.pg"},
                        {"alpha", "S2", "ta2.pg"},
                        {"beta", "S1", "tb1.pg"}};
    save_posteriorgrams(tmp.file("x1.pg"), make_pg(1, 5, 0.9, 10));
    save_posteriorgrams(tmp.file("x2.pg"), make_pg(7, 5, 0.9, 11));
    save_posteriorgrams(tmp.file("x3.pg"), make_pg(2, 5, 0.9, 12));
    AttemptRecord r1{"p1", "alpha", "x1.pg", Category::Correct, Binary::Correct, {}};
    AttemptRecord r2{"p1", "beta", "x2.pg", Category::PhonologicalError, Binary::Incorrect, {}};
    AttemptRecord r3{"p2", "beta", "x3.pg", Category::Correct, Binary::Correct, {}};
    attempts = {r1, r2, r3};
  }
};

}  // namespace

TEST_CASE("score_attempts computes per template DTW distances in manifest order") {
  ScoringFixture fx;
  PosteriorgramSource cache_only;
  const auto sets = build_template_sets(fx.template_records, cache_only,
                                        fx.tmp.path.string());
  const Combiner combiner = Combiner::parse("min");
  const auto scores = score_attempts(fx.attempts, sets, cache_only, combiner,
                                     fx.tmp.path.string());
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].record.patient_id == "p1");
  CHECK(scores[0].record.target_word == "alpha");
  CHECK(scores[1].record.target_word == "beta");
  CHECK(scores[2].record.patient_id == "p2");

  REQUIRE(scores[0].per_template_distance.size() == 2);
  REQUIRE(scores[1].per_template_distance.size() == 1);
  const PosteriorgramSequence x1 = load_posteriorgrams(fx.tmp.file("x1.pg"));
  const PosteriorgramSequence ta1 = load_posteriorgrams(fx.tmp.file("ta1.pg"));
  const PosteriorgramSequence ta2 = load_posteriorgrams(fx.tmp.file("ta2.pg"));
  CHECK(scores[0].per_template_distance[0] == dtw_distance(ta1, x1).distance);
  CHECK(scores[0].per_template_distance[1] == dtw_distance(ta2, x1).distance);
  CHECK(scores[0].combined_distance ==
        std::min(scores[0].per_template_distance[0], scores[0].per_template_distance[1]));

  const auto threaded = score_attempts(fx.attempts, sets, cache_only, combiner,
                                       fx.tmp.path.string(), 4);
  for (size_t i = 0; i < scores.size(); ++i) {
    CHECK(threaded[i].combined_distance == scores[i].combined_distance);
  }

  std::vector<AttemptRecord> missing = fx.attempts;
  missing[0].target_word = "gamma";
  CHECK_THROWS_AS(score_attempts(missing, sets, cache_only, combiner, fx.tmp.path.string()),
                  MissingTemplate);
}

TEST_CASE("to_scored_attempts keeps ids, distances and ground truth") {
  ScoringFixture fx;
  PosteriorgramSource cache_only;
  const auto sets = build_template_sets(fx.template_records, cache_only,
                                        fx.tmp.path.string());
  const auto scores = score_attempts(fx.attempts, sets, cache_only, Combiner::parse("min"),
                                     fx.tmp.path.string());
  const auto scored = to_scored_attempts(scores);
  REQUIRE(scored.size() == scores.size());
  for (size_t i = 0; i < scored.size(); ++i) {
    CHECK(scored[i].patient_id == scores[i].record.patient_id);
    CHECK(scored[i].target_word == scores[i].record.target_word);
    CHECK(scored[i].distance == scores[i].combined_distance);
    CHECK(scored[i].truth == scores[i].record.slt1_binary);
  }
}

TEST_CASE("threshold map prefers the patient entry over the fallback") {
  ThresholdMap fixed = ThresholdMap::fixed(0.5);
  CHECK(fixed.for_patient("anyone") == 0.5);

  ThresholdMap adapted;
  adapted.fallback = 0.7;
  adapted.per_patient["p1"] = 0.3;
  CHECK(adapted.for_patient("p1") == 0.3);
  CHECK(adapted.for_patient("p2") == 0.7);

  ThresholdMap empty;
  CHECK_THROWS_AS(empty.for_patient("p1"), MissingPatientData);
}

TEST_CASE("apply_thresholds decides correct strictly below the threshold") {
  AttemptScore s;
  s.record.patient_id = "p1";
  s.record.target_word = "w";
  s.per_template_distance = {0.5};
  s.combined_distance = 0.5;

  CHECK(apply_thresholds({s}, ThresholdMap::fixed(0.5))[0].verdict == Binary::Incorrect);
  CHECK(apply_thresholds({s}, ThresholdMap::fixed(0.5000001))[0].verdict == Binary::Correct);

  ThresholdMap adapted;
  adapted.fallback = 2.0;
  adapted.per_patient["p1"] = 0.25;
  const auto rows = apply_thresholds({s}, adapted);
  CHECK(rows[0].threshold == 0.25);
  CHECK(rows[0].verdict == Binary::Incorrect);

  CHECK_THROWS_AS(apply_thresholds({s}, ThresholdMap::fixed(0.0)), InvalidThreshold);
  CHECK_THROWS_AS(apply_thresholds({s}, ThresholdMap::fixed(-1.0)), InvalidThreshold);
}

TEST_CASE("latency benchmark keeps manifest order and ratio consistency") {
  ScoringFixture fx;
  PosteriorgramSource cache_only;
  const auto sets = build_template_sets(fx.template_records, cache_only,
                                        fx.tmp.path.string());
  const LatencyReport rep =
      run_latency_benchmark(fx.attempts, sets, cache_only, Combiner::parse("min"),
                            ThresholdMap::fixed(0.5), fx.tmp.path.string(), 1, 2);
  CHECK(rep.n_attempts == 3);
  CHECK(rep.warmup == 1);
  CHECK(rep.repeats == 2);
  REQUIRE(rep.per_attempt_s.size() == 6);
  REQUIRE(rep.duration_s.size() == 6);
  REQUIRE(rep.per_speech_second_s.size() == 6);

  const double expected_duration = 0.030 + 4 * 0.010;
  for (size_t i = 0; i < rep.per_attempt_s.size(); ++i) {
    CHECK(rep.per_attempt_s[i] > 0.0);
    CHECK(rep.duration_s[i] == doctest::Approx(expected_duration).epsilon(1e-12));
    CHECK(rep.per_speech_second_s[i] == rep.per_attempt_s[i] / rep.duration_s[i]);
  }

  const SummaryStats att = summarize_samples(rep.per_attempt_s);
  CHECK(rep.attempt_summary.mean == att.mean);
  CHECK(rep.attempt_summary.sd == att.sd);
  CHECK(rep.attempt_summary.min == att.min);
  CHECK(rep.attempt_summary.max == att.max);
  CHECK(rep.attempt_summary.range == att.range);
  const SummaryStats per = summarize_samples(rep.per_speech_second_s);
  CHECK(rep.per_second_summary.mean == per.mean);

  CHECK_THROWS_AS(run_latency_benchmark({}, sets, cache_only, Combiner::parse("min"),
                                        ThresholdMap::fixed(0.5), fx.tmp.path.string()),
                  EmptyAttempts);
  std::vector<AttemptRecord> missing = fx.attempts;
  missing[0].target_word = "gamma";
  CHECK_THROWS_AS(run_latency_benchmark(missing, sets, cache_only, Combiner::parse("min"),
                                        ThresholdMap::fixed(0.5), fx.tmp.path.string()),
                  MissingTemplate);
}

TEST_CASE("summarize_samples matches hand computed statistics") {
  const SummaryStats s = summarize_samples({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(s.sd == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
  CHECK(s.range == 3.0);

  const SummaryStats empty = summarize_samples({});
  CHECK(empty.mean == 0.0);
  CHECK(empty.sd == 0.0);
  CHECK(empty.range == 0.0);
}
