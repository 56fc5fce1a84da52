// SPDX-License-Identifier: Apache-2.0
// Release gate. Each numbered check pins a recomputable published figure or a
// property the verification pipeline must hold, prints one PASS/FAIL line and
// the process exits nonzero when any check fails. Tolerances live here, in
// code, on purpose: loosening them is a visible diff.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "nuva/calibration.hpp"
#include "nuva/frontend.hpp"
#include "nuva/gru_model.hpp"
#include "nuva/manifest.hpp"
#include "nuva/matcher.hpp"
#include "nuva/phone_classes.hpp"
#include "nuva/pipeline.hpp"
#include "nuva/posteriorgram.hpp"
#include "nuva/stats.hpp"
#include "nuva/synthetic.hpp"
#include "nuva/util.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nuva;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] %2d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool near(double got, double want, double tol) { return std::fabs(got - want) <= tol; }

PosteriorgramSequence one_hot_seq(const std::vector<int>& classes) {
  PosteriorgramSequence seq;
  seq.resize_frames(classes.size());
  for (size_t t = 0; t < classes.size(); ++t) seq.row(t)[classes[t]] = 1.0;
  return seq;
}

PosteriorgramSequence uniform_seq(size_t frames) {
  PosteriorgramSequence seq;
  seq.resize_frames(frames);
  for (size_t t = 0; t < frames; ++t) {
    for (int k = 0; k < kNumPhoneClasses; ++k) seq.row(t)[k] = 1.0 / kNumPhoneClasses;
  }
  return seq;
}

PosteriorgramSequence random_stochastic_seq(size_t frames, std::mt19937_64& rng) {
  PosteriorgramSequence seq;
  seq.resize_frames(frames);
  for (size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (int k = 0; k < kNumPhoneClasses; ++k) {
      seq.row(t)[k] = 1e-6 + uniform01(rng);
      sum += seq.row(t)[k];
    }
    for (int k = 0; k < kNumPhoneClasses; ++k) seq.row(t)[k] /= sum;
  }
  return seq;
}

// 1. Confusion metrics pinned to the published patient baseline row.
void check_metrics_lock() {
  const ConfusionCounts counts{8, 1, 17, 194};
  const auto start = std::chrono::steady_clock::now();
  const MetricsReport m = metrics(counts);
  const double elapsed = seconds_since(start);
  const bool ok = near(m.accuracy, 0.918, 0.0005) && near(m.fp_rate, 0.005, 0.0005) &&
                  near(m.fn_rate, 0.077, 0.0005) && near(m.f1, 0.471, 0.0005) &&
                  near(m.pearson_r, 0.504, 0.0005) && elapsed < 1e-3;
  std::ostringstream what;
  what << "metrics lock tp=8 fp=1 fn=17 tn=194: accuracy " << m.accuracy << ", fp "
       << m.fp_rate << ", fn " << m.fn_rate << ", f1 " << m.f1 << ", r " << m.pearson_r
       << " (" << elapsed * 1e6 << " us)";
  report(1, ok, what.str());
}

// 2. Probabilistic benchmark membership columns and demoted level codes.
void check_benchmark_reproduction() {
  const auto start = std::chrono::steady_clock::now();
  const BenchmarkResult certain = benchmark_level(0.992, 0.008);
  const BenchmarkResult uncertain = benchmark_level(0.850, 0.035);
  const double elapsed = seconds_since(start);
  bool ok = certain.level_code == 6 && near(certain.membership[0], 1.000, 0.002);
  ok = ok && uncertain.level_code == 4 && near(uncertain.membership[0], 0.075, 0.002) &&
       near(uncertain.membership[1], 0.847, 0.002) &&
       near(uncertain.membership[2], 0.078, 0.002) &&
       near(uncertain.cumulative[0], 0.075, 0.002) &&
       near(uncertain.cumulative[1], 0.922, 0.002) &&
       near(uncertain.cumulative[2], 1.000, 0.002) && elapsed < 1e-3;
  std::ostringstream what;
  what << "benchmark levels: (0.992,0.008) -> code " << certain.level_code
       << ", (0.850,0.035) -> code " << uncertain.level_code << " memberships "
       << uncertain.membership[0] << "/" << uncertain.membership[1] << "/"
       << uncertain.membership[2] << " (" << elapsed * 1e6 << " us)";
  report(2, ok, what.str());
}

// 3. Row identity accuracy + fp_rate + fn_rate = 1 on random tables.
void check_rate_identity() {
  std::mt19937_64 rng(303);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    ConfusionCounts c;
    c.tp = static_cast<long>(uniform_below(rng, 500));
    c.fp = static_cast<long>(uniform_below(rng, 500));
    c.fn = static_cast<long>(uniform_below(rng, 500));
    c.tn = static_cast<long>(uniform_below(rng, 500));
    if (c.n() == 0) c.tp = 1;
    const MetricsReport m = metrics(c);
    const double err = std::fabs(m.accuracy + m.fp_rate + m.fn_rate - 1.0);
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  std::ostringstream what;
  what << "accuracy + fp_rate + fn_rate = 1 over 10000 random tables, worst |err| "
       << worst;
  report(3, ok, what.str());
}

// 4. Alignment equals exhaustive path enumeration.
void check_dtw_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(404);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + uniform_below(rng, 8);
    const size_t m = 1 + uniform_below(rng, 8);
    const PosteriorgramSequence h = random_stochastic_seq(n, rng);
    const PosteriorgramSequence a = random_stochastic_seq(m, rng);
    const DtwResult got = dtw_distance(h, a);
    const nuva_tests::BrutePath want = nuva_tests::brute_force_dtw(h, a);
    const double err = std::fabs(got.distance - want.normalized);
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 10.0;
  std::ostringstream what;
  what << "dtw vs exhaustive enumeration, 500 pairs n,m<=8, worst |err| " << worst << " ("
       << elapsed << " s)";
  report(4, ok, what.str());
}

// 5. Local cost fixed points.
void check_local_cost_fixed_points() {
  const PosteriorgramSequence same = one_hot_seq({3});
  const PosteriorgramSequence other = one_hot_seq({4});
  const PosteriorgramSequence flat = uniform_seq(1);
  const double identical = local_cost(same.row(0), same.row(0));
  const double uniform = local_cost(flat.row(0), flat.row(0));
  const double orthogonal = local_cost(same.row(0), other.row(0));
  const bool ok = identical == 0.0 && near(uniform, std::log(45.0), 1e-9) &&
                  near(orthogonal, -std::log(1e-10), 1e-6);
  std::ostringstream what;
  what << "local cost fixed points: identical " << identical << ", uniform " << uniform
       << ", orthogonal " << orthogonal;
  report(5, ok, what.str());
}

double accuracy_at(const std::vector<ScoredAttempt>& scored, const ThresholdMap& thresholds) {
  long hits = 0;
  for (const auto& s : scored) {
    const Binary verdict = s.distance < thresholds.for_patient(s.patient_id)
                               ? Binary::Correct
                               : Binary::Incorrect;
    if (verdict == s.truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scored.size());
}

std::vector<ScoredAttempt> score_corpus_dir(const std::string& attempts_csv,
                                            const std::string& templates_csv) {
  const PosteriorgramSource cache_only;
  const auto attempts = load_attempts(attempts_csv);
  const auto sets = build_template_sets(load_templates(templates_csv), cache_only,
                                        std::filesystem::path(templates_csv).parent_path().string());
  const auto scores =
      score_attempts(attempts, sets, cache_only, Combiner::parse("min"),
                     std::filesystem::path(attempts_csv).parent_path().string());
  return to_scored_attempts(scores);
}

// 6. End-to-end synthetic verification and monotone degradation.
void check_end_to_end_synthetic() {
  const auto start = std::chrono::steady_clock::now();
  nuva_tests::TempDir tmp;
  std::ostringstream quiet;
  auto* saved = std::cout.rdbuf(quiet.rdbuf());

  cli::SynthOptions base;
  base.out_dir = tmp.file("c095");
  base.words = 100;
  base.patients = 2;
  base.peak = 0.95;
  base.seed = 4242;
  cli::cmd_synth(base);

  const auto scored = score_corpus_dir(tmp.file("c095/attempts.csv"),
                                       tmp.file("c095/templates.csv"));
  const CalibrationResult calib = calibrate(scored, CalibrationMode::Adapted);
  ThresholdMap adapted;
  adapted.fallback = calib.fixed_threshold;
  adapted.per_patient = calib.thresholds;
  const double adapted_accuracy = accuracy_at(scored, adapted);

  // Regenerate the attempts at decreasing peaks against the same templates
  // and track pooled accuracy at the pooled fixed threshold.
  const ThresholdMap fixed = ThresholdMap::fixed(calib.fixed_threshold);
  const double peaks[] = {0.95, 0.80, 0.65, 0.50, 0.40};
  std::vector<double> accuracies;
  bool monotone = true;
  for (size_t i = 0; i < 5; ++i) {
    cli::SynthOptions degraded = base;
    degraded.attempt_peak = peaks[i];
    degraded.out_dir = tmp.file("peak" + std::to_string(i));
    cli::cmd_synth(degraded);
    const auto s = score_corpus_dir(degraded.out_dir + "/attempts.csv",
                                    tmp.file("c095/templates.csv"));
    accuracies.push_back(accuracy_at(s, fixed));
    if (i > 0 && accuracies[i] > accuracies[i - 1] + 1e-12) monotone = false;
  }
  std::cout.rdbuf(saved);
  const double elapsed = seconds_since(start);
  const bool ok = scored.size() == 200 && adapted_accuracy == 1.0 && monotone &&
                  elapsed < 30.0;
  std::ostringstream what;
  what << "synthetic end to end: 200 attempts, adapted accuracy " << adapted_accuracy
       << ", degradation accuracies";
  for (double a : accuracies) what << " " << a;
  what << " (" << elapsed << " s)";
  report(6, ok, what.str());
}

// 7. Recurrent inference against the scalar oracle.
void check_gru_inference() {
  const GruModel zero = make_zero_model(2, 8, kNumFeatures, kNumPhoneClasses);
  FeatureSequence feats;
  feats.dim = kNumFeatures;
  std::mt19937_64 rng(707);
  const size_t t_count = 20;
  feats.values.resize(t_count * kNumFeatures);
  for (auto& v : feats.values) v = uniform01(rng) * 2.0 - 1.0;
  for (size_t t = 0; t < t_count; ++t) feats.frame_times_s.push_back(0.01 * t);

  const PosteriorgramSequence uniform = infer_posteriorgrams(feats, zero);
  double worst_uniform = 0.0;
  for (double v : uniform.values) {
    worst_uniform = std::max(worst_uniform, std::fabs(v - 1.0 / kNumPhoneClasses));
  }

  const GruModel model = make_test_model(2, 8, kNumFeatures, kNumPhoneClasses, 7077);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t frames = 1 + uniform_below(rng, 12);
    FeatureSequence f;
    f.dim = kNumFeatures;
    f.values.resize(frames * kNumFeatures);
    for (auto& v : f.values) v = uniform01(rng) * 2.0 - 1.0;
    for (size_t t = 0; t < frames; ++t) f.frame_times_s.push_back(0.01 * t);
    const PosteriorgramSequence got = infer_posteriorgrams(f, model);
    const std::vector<double> want =
        nuva_tests::scalar_gru_inference(f.values, f.dim, model);
    for (size_t i = 0; i < want.size(); ++i) {
      worst = std::max(worst, std::fabs(got.values[i] - want[i]));
    }
  }
  const bool ok = worst_uniform <= 1e-6 && worst <= 1e-6;
  std::ostringstream what;
  what << "gru inference: zero weights worst |p - 1/45| " << worst_uniform
       << ", scalar oracle worst |err| " << worst << " over 100 sequences";
  report(7, ok, what.str());
}

// 8. Chance corrected agreement values.
void check_gwet_ac1() {
  auto build = [](int both_correct, int both_incorrect, int a_only, int b_only) {
    std::vector<Binary> a, b;
    for (int i = 0; i < both_correct; ++i) {
      a.push_back(Binary::Correct);
      b.push_back(Binary::Correct);
    }
    for (int i = 0; i < both_incorrect; ++i) {
      a.push_back(Binary::Incorrect);
      b.push_back(Binary::Incorrect);
    }
    for (int i = 0; i < a_only; ++i) {
      a.push_back(Binary::Correct);
      b.push_back(Binary::Incorrect);
    }
    for (int i = 0; i < b_only; ++i) {
      a.push_back(Binary::Incorrect);
      b.push_back(Binary::Correct);
    }
    return std::make_pair(a, b);
  };

  const auto [hand_a, hand_b] = build(40, 50, 5, 5);
  const AgreementReport hand = gwet_ac1(hand_a, hand_b);

  const auto [same_a, same_b] = build(12, 8, 0, 0);
  const AgreementReport perfect = gwet_ac1(same_a, same_b);

  const auto [p1_a, p1_b] = build(150, 69, 1, 0);
  const AgreementReport p1 = gwet_ac1(p1_a, p1_b);

  const bool ok = near(hand.ac1, 0.802, 0.001) && perfect.ac1 == 1.0 &&
                  near(p1.ac1, 0.992, 0.001);
  std::ostringstream what;
  what << "gwet ac1: hand example " << hand.ac1 << ", perfect " << perfect.ac1
       << ", patient reconstruction " << p1.ac1;
  report(8, ok, what.str());
}

// 9. k system significance suite.
void check_significance_suite() {
  std::mt19937_64 rng(909);
  bool cochran_ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + uniform_below(rng, 39);
    BinaryTable table;
    table.n_items = n;
    table.n_systems = 2;
    table.values.resize(n * 2);
    std::vector<int> s1(n), s2(n);
    for (size_t i = 0; i < n; ++i) {
      s1[i] = static_cast<int>(uniform_below(rng, 2));
      s2[i] = static_cast<int>(uniform_below(rng, 2));
      table.at(i, 0) = static_cast<uint8_t>(s1[i]);
      table.at(i, 1) = static_cast<uint8_t>(s2[i]);
    }
    const CochranResult q = cochran_q(table);
    const double mcnemar = nuva_tests::mcnemar_statistic(s1, s2);
    const double err = std::fabs(q.q - mcnemar);
    worst = std::max(worst, err);
    cochran_ok = cochran_ok && err <= 1e-9;
  }

  const std::vector<double> adjusted = holm_adjust(std::vector<double>{0.01, 0.02, 0.04});
  const bool holm_ok = adjusted.size() == 3 && near(adjusted[0], 0.03, 1e-12) &&
                       near(adjusted[1], 0.04, 1e-12) && near(adjusted[2], 0.04, 1e-12);

  BinaryTable identical;
  identical.n_items = 12;
  identical.n_systems = 3;
  identical.values.resize(36);
  for (size_t i = 0; i < 12; ++i) {
    const uint8_t v = i % 2 == 0 ? 1 : 0;
    for (size_t j = 0; j < 3; ++j) identical.at(i, j) = v;
  }
  const CochranResult flat = cochran_q(identical);
  const std::vector<std::string> labels = {"a", "b", "c"};
  const auto pairs = dunn_holm(identical, labels);
  bool identical_ok = flat.q == 0.0 && flat.p == 1.0 && pairs.size() == 3;
  for (const auto& p : pairs) {
    identical_ok = identical_ok && p.stars == Stars::NS && p.holm_p == 1.0;
  }

  const bool ok = cochran_ok && holm_ok && identical_ok;
  std::ostringstream what;
  what << "significance: cochran==mcnemar worst |err| " << worst
       << " over 1000 tables, holm {0.01,0.02,0.04} -> {" << adjusted[0] << ","
       << adjusted[1] << "," << adjusted[2] << "}, identical systems q " << flat.q
       << " p " << flat.p;
  report(9, ok, what.str());
}

// 10. Front end frame clock, silence handling and determinism.
void check_frontend() {
  AudioClip second;
  second.samples.assign(16000, 0);
  const FeatureSequence silent = extract_features(second);
  bool ok = silent.frames() == 98;

  // Zero signal: every cepstral coefficient zero, log energy at the floor.
  const double floor_log = std::log(1e-10);
  for (size_t t = 0; t < silent.frames() && ok; ++t) {
    const auto row = silent.row(t);
    for (int k = 0; k < 12; ++k) ok = ok && std::fabs(row[k]) <= 1e-9;
    ok = ok && near(row[12], floor_log, 1e-12);
    for (int k = 13; k < 26; ++k) ok = ok && std::fabs(row[k]) <= 1e-9;  // deltas
  }

  // Constant statics have zero deltas by the edge replication rule.
  std::vector<double> statics(10 * 13, 0.7);
  const std::vector<double> with_deltas = append_deltas(statics, 13, 2);
  for (size_t t = 0; t < 10 && ok; ++t) {
    for (int k = 13; k < 26; ++k) ok = ok && with_deltas[t * 26 + k] == 0.0;
  }

  // Bit determinism on a nontrivial clip.
  AudioClip tone;
  tone.samples.resize(16000);
  for (size_t i = 0; i < tone.samples.size(); ++i) {
    tone.samples[i] = static_cast<int16_t>(11000.0 * std::sin(0.17 * i));
  }
  const FeatureSequence once = extract_features(tone);
  const FeatureSequence twice = extract_features(tone);
  ok = ok && once.values == twice.values && once.frame_times_s == twice.frame_times_s;

  report(10, ok, "front end: 98 frames per second, floored silence, zero deltas for "
                 "constant statics, bit deterministic");
}

// 11. Latency harness internal consistency.
void check_latency_harness() {
  nuva_tests::TempDir tmp;
  std::ostringstream quiet;
  auto* saved = std::cout.rdbuf(quiet.rdbuf());
  cli::SynthOptions synth;
  synth.out_dir = tmp.file("c");
  synth.words = 10;
  synth.patients = 2;
  synth.seed = 1111;
  cli::cmd_synth(synth);
  std::cout.rdbuf(saved);

  const PosteriorgramSource cache_only;
  const auto attempts = load_attempts(tmp.file("c/attempts.csv"));
  const auto sets = build_template_sets(load_templates(tmp.file("c/templates.csv")),
                                        cache_only, tmp.file("c"));
  const LatencyReport rep =
      run_latency_benchmark(attempts, sets, cache_only, Combiner::parse("min"),
                            ThresholdMap::fixed(1.0), tmp.file("c"), 2, 2);

  bool ok = rep.n_attempts == attempts.size() &&
            rep.per_attempt_s.size() == attempts.size() * 2 &&
            rep.per_speech_second_s.size() == rep.per_attempt_s.size() &&
            rep.duration_s.size() == rep.per_attempt_s.size();
  double worst = 0.0;
  for (size_t i = 0; i < rep.per_attempt_s.size() && ok; ++i) {
    ok = ok && rep.per_attempt_s[i] > 0.0 && rep.duration_s[i] > 0.0;
    const double want = rep.per_attempt_s[i] / rep.duration_s[i];
    const double err = std::fabs(rep.per_speech_second_s[i] - want) / want;
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  // Table shape: mean/sd/min/max/range for both units, internally coherent.
  auto coherent = [](const SummaryStats& s) {
    return s.min <= s.mean + 1e-12 && s.mean <= s.max + 1e-12 &&
           std::fabs(s.range - (s.max - s.min)) <= 1e-12 && s.sd >= 0.0;
  };
  ok = ok && coherent(rep.attempt_summary) && coherent(rep.per_second_summary);
  std::ostringstream what;
  what << "latency harness: " << rep.per_attempt_s.size()
       << " timed samples, per speech second worst rel err " << worst;
  report(11, ok, what.str());
}

}  // namespace

int main() {
  check_metrics_lock();
  check_benchmark_reproduction();
  check_rate_identity();
  check_dtw_oracle();
  check_local_cost_fixed_points();
  check_end_to_end_synthetic();
  check_gru_inference();
  check_gwet_ac1();
  check_significance_suite();
  check_frontend();
  check_latency_harness();
  if (g_failures > 0) {
    std::printf("%d of 11 checks failed\n", g_failures);
    return 1;
  }
  std::printf("all 11 checks passed\n");
  return 0;
}
