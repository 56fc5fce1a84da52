// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nuva/calibration.hpp"
#include "nuva/csv.hpp"
#include "nuva/errors.hpp"
#include "nuva/frontend.hpp"
#include "nuva/gru_model.hpp"
#include "nuva/manifest.hpp"
#include "nuva/matcher.hpp"
#include "nuva/pipeline.hpp"
#include "nuva/posteriorgram.hpp"
#include "nuva/stats.hpp"
#include "nuva/synthetic.hpp"
#include "nuva/util.hpp"

namespace nuva::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FileError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string file_stem(const std::string& path) { return fs::path(path).stem().string(); }

std::string parent_dir(const std::string& path) {
  return fs::path(path).parent_path().string();
}

std::string fmt(double v, int precision = 17) { return format_double(v, precision); }

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string mean_sd_cell(const SummaryStats& s) {
  return fmt3(s.mean) + "(±" + fmt3(s.sd) + ")";
}

PosteriorgramSource make_source(const SourceOptions& opts) {
  if (!opts.model_path.empty() && opts.synthetic_set) {
    throw UsageError("--model and --synthetic are mutually exclusive");
  }
  PosteriorgramSource source;
  if (!opts.model_path.empty()) {
    source.kind = PosteriorgramSource::Kind::Model;
    source.model = std::make_shared<GruModel>(load_model(opts.model_path));
  } else if (opts.synthetic_set) {
    source.kind = PosteriorgramSource::Kind::Synthetic;
    source.synthetic = SyntheticSourceConfig::parse(opts.synthetic_spec);
  }
  return source;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw FileError("cannot write '" + path + "'");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
}

json stats_json(const SummaryStats& s) {
  return json{{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max},
              {"range", s.range}};
}

json metrics_json(const ConfusionCounts& c) {
  const MetricsReport m = metrics(c);
  return json{{"n", c.n()},          {"tp", c.tp},
              {"fp", c.fp},          {"fn", c.fn},
              {"tn", c.tn},          {"accuracy", m.accuracy},
              {"fp_rate", m.fp_rate}, {"fn_rate", m.fn_rate},
              {"f1", m.f1},          {"pearson_r", m.pearson_r}};
}

// Prediction column header for verify output, safe as a CSV token.
std::string system_name(const Combiner& combiner) {
  std::string name = "nuva_" + combiner.name();
  std::replace(name.begin(), name.end(), ':', '_');
  return name;
}

std::string safe_file_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("x") : out;
}

std::vector<std::string> first_appearance_order(const std::vector<std::string>& ids) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (seen.insert(id).second) order.push_back(id);
  }
  return order;
}

// Shared front half of the scoring commands: manifests in, distances out.
struct ScoredCorpus {
  PosteriorgramSource source;
  Combiner combiner;
  std::vector<AttemptRecord> attempts;
  std::vector<AttemptScore> scores;
  std::vector<ScoredAttempt> scored;
};

ScoredCorpus score_corpus(const std::string& attempts_path, const std::string& templates_path,
                          const SourceOptions& source_opts, const std::string& combiner_spec,
                          int threads) {
  ScoredCorpus c;
  c.source = make_source(source_opts);
  c.combiner = Combiner::parse(combiner_spec);
  c.attempts = load_attempts(attempts_path);
  const auto template_records = load_templates(templates_path);
  const auto templates =
      build_template_sets(template_records, c.source, parent_dir(templates_path), threads);
  c.scores = score_attempts(c.attempts, templates, c.source, c.combiner,
                            parent_dir(attempts_path), threads);
  c.scored = to_scored_attempts(c.scores);
  return c;
}

ThresholdMap thresholds_from_calibration(const std::string& path) {
  const json j = load_json_file(path);
  try {
    if (!j.is_object() || !j.contains("mode") || !j.contains("fixed_threshold")) {
      throw SchemaMismatch(path + ": not a calibration file");
    }
    const std::string mode = j.at("mode").get<std::string>();
    ThresholdMap map = ThresholdMap::fixed(j.at("fixed_threshold").get<double>());
    if (mode == "adapted") {
      if (!j.contains("thresholds") || !j.at("thresholds").is_object()) {
        throw SchemaMismatch(path + ": adapted calibration lacks a thresholds object");
      }
      for (auto it = j.at("thresholds").begin(); it != j.at("thresholds").end(); ++it) {
        map.per_patient[it.key()] = it.value().get<double>();
      }
    } else if (mode != "fixed") {
      throw SchemaMismatch(path + ": unknown calibration mode '" + mode + "'");
    }
    return map;
  } catch (const json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
}

std::string snake_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return c == ' ' ? '_' : std::tolower(c); });
  return s;
}

uint64_t derive_seed(const std::string& tag, uint64_t seed) {
  return fnv1a64(tag + "#" + std::to_string(seed));
}

}  // namespace

void cmd_extract(const ExtractOptions& opts) {
  const AudioClip clip = load_wav(opts.audio_path);
  const FeatureSequence feats = extract_features(clip);
  ensure_dir(opts.out_dir);
  const std::string out = join_path(opts.out_dir, file_stem(opts.audio_path) + ".ftr");
  save_features(out, feats);
  std::cout << "wrote " << out << " (" << feats.frames() << " frames, dim " << feats.dim
            << ")\n";
}

void cmd_infer(const InferOptions& opts) {
  const PosteriorgramSource source = make_source(opts.source);
  const std::string word = opts.word.empty() ? file_stem(opts.audio_path) : opts.word;
  const PreparedInput input = prepare_input(opts.audio_path, "", source);
  const PosteriorgramSequence pg = realize_posteriorgrams(input, word, source);
  ensure_dir(opts.out_dir);
  if (opts.dump_features && input.clip) {
    const std::string ftr = join_path(opts.out_dir, file_stem(opts.audio_path) + ".ftr");
    save_features(ftr, extract_features(*input.clip, source.frontend));
    std::cout << "wrote " << ftr << "\n";
  }
  const std::string out = join_path(opts.out_dir, file_stem(opts.audio_path) + ".pg");
  save_posteriorgrams(out, pg);
  std::cout << "wrote " << out << " (" << pg.frames() << " frames, source " << source.id()
            << ")\n";
}

void cmd_enroll(const EnrollOptions& opts) {
  const PosteriorgramSource source = make_source(opts.source);
  const auto records = load_templates(opts.templates_path);
  const std::string base = parent_dir(opts.templates_path);
  ensure_dir(join_path(opts.out_dir, "templates"));
  std::vector<PosteriorgramSequence> realized(records.size());
  parallel_for(records.size(), opts.threads, [&](size_t i) {
    const PreparedInput input = prepare_input(records[i].audio_path, base, source);
    realized[i] = realize_posteriorgrams(input, records[i].target_word, source);
  });
  std::vector<TemplateRecord> out_records;
  for (size_t i = 0; i < records.size(); ++i) {
    const std::string rel = "templates/t" + std::to_string(i) + "_" +
                            safe_file_token(records[i].target_word) + "_" +
                            safe_file_token(records[i].speaker_id) + ".pg";
    save_posteriorgrams(join_path(opts.out_dir, rel), realized[i]);
    out_records.push_back({records[i].target_word, records[i].speaker_id, rel});
  }
  write_templates(join_path(opts.out_dir, "templates.csv"), out_records);
  std::cout << "enrolled " << out_records.size() << " templates into " << opts.out_dir
            << "\n";
}

void cmd_verify(const VerifyOptions& opts) {
  const bool has_calibration = !opts.calibration_path.empty();
  if (opts.threshold_set == has_calibration) {
    throw UsageError("choose exactly one of --threshold and --calibration");
  }
  const ScoredCorpus corpus = score_corpus(opts.attempts_path, opts.templates_path,
                                           opts.source, opts.combiner, opts.threads);
  const ThresholdMap thresholds = opts.threshold_set
                                      ? ThresholdMap::fixed(opts.threshold)
                                      : thresholds_from_calibration(opts.calibration_path);
  const auto rows = apply_thresholds(corpus.scores, thresholds);
  ensure_dir(opts.out_dir);

  CsvTable results;
  results.header = {"patient_id",        "target_word", "template_distances",
                    "combined_distance", "threshold",   "verdict"};
  for (const auto& r : rows) {
    std::string dists;
    for (size_t i = 0; i < r.score.per_template_distance.size(); ++i) {
      if (i) dists += ';';
      dists += fmt(r.score.per_template_distance[i]);
    }
    results.rows.push_back({r.score.record.patient_id, r.score.record.target_word, dists,
                            fmt(r.score.combined_distance), fmt(r.threshold),
                            to_string(r.verdict)});
  }
  write_csv(join_path(opts.out_dir, "results.csv"), results);

  PredictionTable pred;
  pred.systems = {system_name(corpus.combiner)};
  for (const auto& r : rows) {
    pred.rows.push_back({r.score.record.patient_id, r.score.record.target_word,
                         r.score.record.slt1_binary, {r.verdict}});
  }
  write_predictions(join_path(opts.out_dir, "predictions.csv"), pred);

  json summary{{"n_attempts", rows.size()},
               {"combiner", corpus.combiner.name()},
               {"source", corpus.source.id()},
               {"threshold_source", opts.threshold_set ? "fixed" : "calibration"},
               {"fallback_threshold", thresholds.fallback}};
  if (!rows.empty()) {
    std::vector<Binary> truth, verdicts;
    std::vector<std::string> patient_ids;
    for (const auto& r : rows) {
      truth.push_back(r.score.record.slt1_binary);
      verdicts.push_back(r.verdict);
      patient_ids.push_back(r.score.record.patient_id);
    }
    summary["pooled"] = metrics_json(confusion(truth, verdicts));
    json per_patient = json::object();
    for (const auto& pid : first_appearance_order(patient_ids)) {
      std::vector<Binary> t, v;
      for (const auto& r : rows) {
        if (r.score.record.patient_id != pid) continue;
        t.push_back(r.score.record.slt1_binary);
        v.push_back(r.verdict);
      }
      per_patient[pid] = metrics_json(confusion(t, v));
    }
    summary["per_patient"] = per_patient;
    std::cout << "verified " << rows.size() << " attempts, pooled accuracy "
              << fmt3(summary["pooled"]["accuracy"].get<double>()) << "\n";
  } else {
    std::cout << "verified 0 attempts\n";
  }
  write_json_file(join_path(opts.out_dir, "summary.json"), summary);
}

void cmd_calibrate(const CalibrateOptions& opts) {
  const CalibrationMode mode = parse_calibration_mode(opts.mode);
  const ScoredCorpus corpus = score_corpus(opts.attempts_path, opts.templates_path,
                                           opts.source, opts.combiner, opts.threads);
  const CalibrationResult result = calibrate(corpus.scored, mode);
  ensure_dir(opts.out_dir);

  CsvTable scores;
  scores.header = {"patient_id", "target_word", "distance", "truth"};
  for (const auto& s : corpus.scored) {
    scores.rows.push_back({s.patient_id, s.target_word, fmt(s.distance), to_string(s.truth)});
  }
  write_csv(join_path(opts.out_dir, "scores.csv"), scores);

  json thresholds = json::object();
  for (const auto& [pid, t] : result.thresholds) thresholds[pid] = t;
  json sweep = json::array();
  for (const auto& p : result.sweep) {
    sweep.push_back(json{{"threshold", p.threshold}, {"metric", p.metric}});
  }
  json calib{{"mode", to_string(result.mode)},
             {"combiner", corpus.combiner.name()},
             {"source", corpus.source.id()},
             {"fixed_threshold", result.fixed_threshold},
             {"objective_value", result.objective_value},
             {"thresholds", thresholds},
             {"sweep", sweep}};

  bool has_correct = false, has_incorrect = false;
  for (const auto& s : corpus.scored) {
    (s.truth == Binary::Correct ? has_correct : has_incorrect) = true;
  }
  if (has_correct && has_incorrect) {
    const RocCurve curve = roc(corpus.scored);
    calib["auc"] = curve.auc;
    CsvTable rc;
    rc.header = {"fpr", "tpr"};
    for (const auto& [fpr, tpr] : curve.points) rc.rows.push_back({fmt(fpr), fmt(tpr)});
    write_csv(join_path(opts.out_dir, "roc.csv"), rc);
  } else {
    calib["auc"] = nullptr;
  }
  write_json_file(join_path(opts.out_dir, "calibration.json"), calib);
  std::cout << "calibrated mode=" << to_string(result.mode)
            << " fixed_threshold=" << fmt(result.fixed_threshold, 9)
            << " objective=" << fmt3(result.objective_value) << "\n";
}

void cmd_cv(const CvOptions& opts) {
  const ScoredCorpus corpus = score_corpus(opts.attempts_path, opts.templates_path,
                                           opts.source, opts.combiner, opts.threads);
  std::vector<std::string> patient_ids;
  for (const auto& s : corpus.scored) patient_ids.push_back(s.patient_id);
  const auto order = first_appearance_order(patient_ids);

  ensure_dir(opts.out_dir);
  CsvTable folds;
  folds.header = {"patient_id", "fold",    "test_size", "threshold", "accuracy",
                  "fp_rate",    "fn_rate", "f1",        "pearson_r"};
  CsvTable summary;
  summary.header = {"patient_id", "statistic", "accuracy", "fp_rate",
                    "fn_rate",    "f1",        "pearson_r"};
  json per_patient = json::object();
  for (const auto& pid : order) {
    std::vector<ScoredAttempt> mine;
    for (const auto& s : corpus.scored) {
      if (s.patient_id == pid) mine.push_back(s);
    }
    const CrossValidationResult cv = cross_validate(mine, opts.folds, opts.seed,
                                                    opts.stratified);
    for (const auto& f : cv.folds) {
      folds.rows.push_back({pid, std::to_string(f.fold_index), std::to_string(f.test_size),
                            fmt(f.threshold), fmt(f.metrics.accuracy, 9),
                            fmt(f.metrics.fp_rate, 9), fmt(f.metrics.fn_rate, 9),
                            fmt(f.metrics.f1, 9), fmt(f.metrics.pearson_r, 9)});
    }
    const SummaryStats* stats[5] = {&cv.accuracy, &cv.fp_rate, &cv.fn_rate, &cv.f1,
                                    &cv.pearson_r};
    std::vector<std::string> mean_row{pid, "mean_sd"}, min_row{pid, "min"},
        max_row{pid, "max"}, range_row{pid, "range"};
    for (const SummaryStats* s : stats) {
      mean_row.push_back(mean_sd_cell(*s));
      min_row.push_back(fmt3(s->min));
      max_row.push_back(fmt3(s->max));
      range_row.push_back(fmt3(s->range));
    }
    summary.rows.push_back(mean_row);
    summary.rows.push_back(min_row);
    summary.rows.push_back(max_row);
    summary.rows.push_back(range_row);
    per_patient[pid] = json{{"accuracy", stats_json(cv.accuracy)},
                            {"fp_rate", stats_json(cv.fp_rate)},
                            {"fn_rate", stats_json(cv.fn_rate)},
                            {"f1", stats_json(cv.f1)},
                            {"pearson_r", stats_json(cv.pearson_r)}};
  }
  write_csv(join_path(opts.out_dir, "cv_folds.csv"), folds);
  write_csv(join_path(opts.out_dir, "cv_summary.csv"), summary);
  write_json_file(join_path(opts.out_dir, "cv.json"),
                  json{{"folds", opts.folds},
                       {"seed", opts.seed},
                       {"stratified", opts.stratified},
                       {"combiner", corpus.combiner.name()},
                       {"source", corpus.source.id()},
                       {"patients", per_patient}});
  std::cout << "cross validated " << order.size() << " patients, " << opts.folds
            << " folds\n";
}

void cmd_stats(const StatsOptions& opts) {
  const PredictionTable table = load_predictions(opts.predictions_path);
  if (table.rows.empty()) throw EmptyAttempts("no prediction rows in " + opts.predictions_path);
  ensure_dir(opts.out_dir);

  std::vector<std::string> patient_ids;
  for (const auto& r : table.rows) patient_ids.push_back(r.patient_id);
  const auto patients = first_appearance_order(patient_ids);
  const size_t k = table.systems.size();

  // index -1 selects the ground truth column; empty pid selects every row.
  auto column = [&](int sys, const std::string& pid) {
    std::vector<Binary> v;
    for (const auto& r : table.rows) {
      if (!pid.empty() && r.patient_id != pid) continue;
      v.push_back(sys < 0 ? r.ground_truth : r.predictions[sys]);
    }
    return v;
  };
  auto label = [&](int sys) {
    return sys < 0 ? std::string("ground_truth") : table.systems[sys];
  };
  auto scopes = [&]() {
    std::vector<std::string> s{""};
    s.insert(s.end(), patients.begin(), patients.end());
    return s;
  }();
  auto scope_name = [](const std::string& pid) { return pid.empty() ? "All" : pid; };

  json jstats{{"n_items", table.rows.size()}, {"systems", table.systems}};

  CsvTable met;
  met.header = {"system", "patient", "n",  "accuracy", "fp_rate",
                "fn_rate", "f1",     "pearson_r"};
  json jmetrics = json::object();
  for (size_t sys = 0; sys < k; ++sys) {
    json per_scope = json::object();
    for (const auto& pid : scopes) {
      const auto truth = column(-1, pid);
      const auto pred = column(static_cast<int>(sys), pid);
      const ConfusionCounts c = confusion(truth, pred);
      const MetricsReport m = metrics(c);
      met.rows.push_back({table.systems[sys], scope_name(pid), std::to_string(c.n()),
                          fmt(m.accuracy, 9), fmt(m.fp_rate, 9), fmt(m.fn_rate, 9),
                          fmt(m.f1, 9), fmt(m.pearson_r, 9)});
      per_scope[scope_name(pid)] = metrics_json(c);
    }
    jmetrics[table.systems[sys]] = per_scope;
  }
  write_csv(join_path(opts.out_dir, "metrics.csv"), met);
  jstats["metrics"] = jmetrics;

  // Rater or system pairs: ground truth against each system, then all
  // system pairs; chance corrected agreement plus its probabilistic level.
  std::vector<std::pair<int, int>> pairs;
  for (size_t i = 0; i < k; ++i) pairs.emplace_back(-1, static_cast<int>(i));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  const auto scale = agreement_benchmark_scale();
  CsvTable agr;
  agr.header = {"rater_a", "rater_b", "patient", "n",          "pa",
                "ac1",     "std_err", "ci_lo",   "ci_hi",      "level_code",
                "level"};
  CsvTable bench;
  bench.header = {"rater_a", "rater_b", "patient", "estimate", "std_err", "level_code",
                  "level"};
  for (const auto& interval : scale) bench.header.push_back("m_" + snake_case(interval.name));
  for (const auto& interval : scale) bench.header.push_back("c_" + snake_case(interval.name));
  json jagreement = json::array();
  for (const auto& [a, b] : pairs) {
    for (const auto& pid : scopes) {
      const auto va = column(a, pid);
      const auto vb = column(b, pid);
      const AgreementReport rep = gwet_ac1(va, vb);
      agr.rows.push_back({label(a), label(b), scope_name(pid), std::to_string(va.size()),
                          fmt(rep.pa, 9), fmt(rep.ac1, 9), fmt(rep.std_err, 9),
                          fmt(rep.ci95.first, 9), fmt(rep.ci95.second, 9),
                          std::to_string(rep.level_code), rep.level_name});
      const BenchmarkResult level = benchmark_level(rep.ac1, rep.std_err, scale);
      std::vector<std::string> row{label(a),          label(b),
                                   scope_name(pid),   fmt(rep.ac1, 9),
                                   fmt(rep.std_err, 9), std::to_string(level.level_code),
                                   level.level_name};
      for (double m : level.membership) row.push_back(fmt(m, 9));
      for (double c : level.cumulative) row.push_back(fmt(c, 9));
      bench.rows.push_back(row);
      jagreement.push_back(json{{"rater_a", label(a)},
                                {"rater_b", label(b)},
                                {"patient", scope_name(pid)},
                                {"n", va.size()},
                                {"pa", rep.pa},
                                {"ac1", rep.ac1},
                                {"std_err", rep.std_err},
                                {"ci95", {rep.ci95.first, rep.ci95.second}},
                                {"level_code", level.level_code},
                                {"level", level.level_name},
                                {"membership", level.membership},
                                {"cumulative", level.cumulative}});
    }
  }
  write_csv(join_path(opts.out_dir, "agreement.csv"), agr);
  write_csv(join_path(opts.out_dir, "benchmark.csv"), bench);
  jstats["agreement"] = jagreement;

  if (k >= 2) {
    BinaryTable bt;
    bt.n_items = table.rows.size();
    bt.n_systems = k;
    bt.values.assign(bt.n_items * bt.n_systems, 0);
    for (size_t i = 0; i < bt.n_items; ++i) {
      for (size_t j = 0; j < k; ++j) {
        bt.at(i, j) = table.rows[i].predictions[j] == table.rows[i].ground_truth ? 1 : 0;
      }
    }
    const CochranResult cq = cochran_q(bt);
    CsvTable ct;
    ct.header = {"q", "df", "p", "stars", "degenerate"};
    ct.rows.push_back({fmt(cq.q, 9), std::to_string(cq.df), fmt(cq.p, 9),
                       to_string(stars_for(cq.p)), cq.degenerate ? "1" : "0"});
    write_csv(join_path(opts.out_dir, "cochran.csv"), ct);

    const auto comparisons = dunn_holm(bt, table.systems);
    CsvTable sig;
    sig.header = {"system_a", "system_b", "mean_rank_a", "mean_rank_b",
                  "z",        "raw_p",    "holm_p",      "stars"};
    json jpairs = json::array();
    for (const auto& c : comparisons) {
      sig.rows.push_back({c.label_a, c.label_b, fmt(c.mean_rank_a, 9), fmt(c.mean_rank_b, 9),
                          fmt(c.z, 9), fmt(c.raw_p, 9), fmt(c.holm_p, 9),
                          to_string(c.stars)});
      jpairs.push_back(json{{"system_a", c.label_a},
                            {"system_b", c.label_b},
                            {"mean_rank_a", c.mean_rank_a},
                            {"mean_rank_b", c.mean_rank_b},
                            {"z", c.z},
                            {"raw_p", c.raw_p},
                            {"holm_p", c.holm_p},
                            {"stars", to_string(c.stars)}});
    }
    write_csv(join_path(opts.out_dir, "significance.csv"), sig);
    jstats["cochran"] = json{{"q", cq.q}, {"df", cq.df}, {"p", cq.p},
                             {"stars", to_string(stars_for(cq.p))},
                             {"degenerate", cq.degenerate}};
    jstats["pairwise"] = jpairs;
  }
  write_json_file(join_path(opts.out_dir, "stats.json"), jstats);
  std::cout << "computed statistics for " << k << " systems over " << table.rows.size()
            << " items\n";
}

void cmd_bench(const BenchOptions& opts) {
  const PosteriorgramSource source = make_source(opts.source);
  const Combiner combiner = Combiner::parse(opts.combiner);
  const auto attempts = load_attempts(opts.attempts_path);
  const auto template_records = load_templates(opts.templates_path);
  const auto templates = build_template_sets(template_records, source,
                                             parent_dir(opts.templates_path), 1);
  const LatencyReport rep =
      run_latency_benchmark(attempts, templates, source, combiner,
                            ThresholdMap::fixed(opts.threshold),
                            parent_dir(opts.attempts_path), opts.warmup, opts.repeats);
  ensure_dir(opts.out_dir);

  CsvTable lat;
  lat.header = {"metric", "mean", "sd", "min", "max", "range"};
  auto summary_row = [&](const char* name, const SummaryStats& s) {
    lat.rows.push_back({name, fmt(s.mean, 9), fmt(s.sd, 9), fmt(s.min, 9), fmt(s.max, 9),
                        fmt(s.range, 9)});
  };
  summary_row("per_attempt_s", rep.attempt_summary);
  summary_row("per_speech_second_s", rep.per_second_summary);
  write_csv(join_path(opts.out_dir, "latency.csv"), lat);

  CsvTable raw;
  raw.header = {"repeat",     "attempt_index",  "patient_id", "target_word",
                "duration_s", "per_attempt_s",  "per_speech_second_s"};
  for (size_t e = 0; e < rep.per_attempt_s.size(); ++e) {
    const size_t i = e % rep.n_attempts;
    raw.rows.push_back({std::to_string(e / rep.n_attempts), std::to_string(i),
                        attempts[i].patient_id, attempts[i].target_word,
                        fmt(rep.duration_s[e], 9), fmt(rep.per_attempt_s[e], 9),
                        fmt(rep.per_speech_second_s[e], 9)});
  }
  write_csv(join_path(opts.out_dir, "latency_raw.csv"), raw);

  write_json_file(join_path(opts.out_dir, "bench.json"),
                  json{{"n_attempts", rep.n_attempts},
                       {"warmup", rep.warmup},
                       {"repeats", rep.repeats},
                       {"combiner", combiner.name()},
                       {"source", source.id()},
                       {"per_attempt", stats_json(rep.attempt_summary)},
                       {"per_speech_second", stats_json(rep.per_second_summary)}});

  if (!opts.compare_path.empty()) {
    const CsvTable other = read_csv(opts.compare_path);
    const auto it = std::find(other.header.begin(), other.header.end(), "per_attempt_s");
    if (it == other.header.end()) {
      throw SchemaMismatch(opts.compare_path + ": no per_attempt_s column");
    }
    const size_t col = static_cast<size_t>(it - other.header.begin());
    std::vector<double> theirs;
    for (size_t r = 0; r < other.rows.size(); ++r) {
      try {
        theirs.push_back(std::stod(other.rows[r][col]));
      } catch (const std::exception&) {
        throw SchemaMismatch(opts.compare_path + ": row " + std::to_string(r + 2) +
                             ": bad per_attempt_s value");
      }
    }
    const WilcoxonResult w = wilcoxon_signed_rank(rep.per_attempt_s, theirs);
    write_json_file(join_path(opts.out_dir, "bench_compare.json"),
                    json{{"n_pairs", w.n_pairs},
                         {"n_zero", w.n_zero},
                         {"w_plus", w.w_plus},
                         {"w_minus", w.w_minus},
                         {"z", w.z},
                         {"p", w.p},
                         {"stars", to_string(stars_for(w.p))}});
    std::cout << "compared against " << opts.compare_path << ": p=" << fmt(w.p, 6) << "\n";
  }
  std::cout << "benchmarked " << rep.n_attempts << " attempts x " << rep.repeats
            << " repeats, mean " << fmt(rep.attempt_summary.mean, 6) << " s/attempt\n";
}

namespace {

const char* kSyllables[] = {
    "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du", "fa", "fe", "fi",
    "fo", "fu", "ka", "ke", "ki", "ko", "ku", "la", "le", "li", "lo", "lu", "ma",
    "me", "mi", "mo", "mu", "na", "ne", "ni", "no", "nu", "pa", "pe", "pi", "po",
    "pu", "ra", "re", "ri", "ro", "ru", "sa", "se", "si", "so", "su", "ta", "te",
    "ti", "to", "tu"};

std::vector<std::string> make_words(int n, uint64_t seed) {
  std::mt19937_64 rng(derive_seed("words", seed));
  const size_t n_syllables = std::size(kSyllables);
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (static_cast<int>(words.size()) < n) {
    std::string word;
    const int len = 2 + static_cast<int>(uniform_below(rng, 2));
    for (int s = 0; s < len; ++s) word += kSyllables[uniform_below(rng, n_syllables)];
    while (seen.count(word)) word += kSyllables[uniform_below(rng, n_syllables)];
    seen.insert(word);
    words.push_back(word);
  }
  return words;
}

std::vector<PhoneSegment> word_segments(const std::string& word, uint64_t seed,
                                        int frames_per_phone) {
  std::vector<PhoneSegment> segments;
  for (int c : word_class_sequence(word, seed)) segments.push_back({c, frames_per_phone});
  return segments;
}

}  // namespace

void cmd_synth(const SynthOptions& opts) {
  if (opts.words < 1) throw UsageError("--words must be positive");
  if (opts.patients < 1) throw UsageError("--patients must be positive");
  if (opts.frames_per_phone < 1) throw UsageError("--frames-per-phone must be positive");
  const double attempt_peak = opts.attempt_peak < 0.0 ? opts.peak : opts.attempt_peak;
  ensure_dir(join_path(opts.out_dir, "templates"));
  ensure_dir(join_path(opts.out_dir, "attempts"));
  const auto words = make_words(opts.words, opts.seed);
  const char* speakers[2] = {"S1", "S2"};

  std::vector<TemplateRecord> templates;
  for (const auto& word : words) {
    const auto segments = word_segments(word, opts.seed, opts.frames_per_phone);
    for (const char* speaker : speakers) {
      const uint64_t tseed = derive_seed("template#" + word + "#" + speaker, opts.seed);
      const std::string rel = "templates/" + word + "_" + speaker + ".pg";
      save_posteriorgrams(join_path(opts.out_dir, rel),
                          synthesize_posteriorgrams(segments, opts.peak, tseed));
      templates.push_back({word, speaker, rel});
    }
  }
  write_templates(join_path(opts.out_dir, "templates.csv"), templates);

  // Correct attempts replay one enrolled speaker's synthesis seed, so at the
  // template peak they are exact clones; incorrect attempts rewrite at least
  // half of the phone segments before synthesis.
  std::vector<AttemptRecord> attempts;
  for (int p = 0; p < opts.patients; ++p) {
    const std::string pid = "P" + std::to_string(p + 1);
    for (size_t i = 0; i < words.size(); ++i) {
      const std::string& word = words[i];
      auto segments = word_segments(word, opts.seed, opts.frames_per_phone);
      const bool correct = (i + static_cast<size_t>(p)) % 2 == 0;
      PosteriorgramSequence pg;
      Category category;
      if (correct) {
        const char* speaker =
            speakers[derive_seed("clone#" + pid + "#" + word, opts.seed) % 2];
        pg = synthesize_posteriorgrams(
            segments, attempt_peak,
            derive_seed("template#" + word + "#" + speaker, opts.seed));
        category = Category::Correct;
      } else {
        std::mt19937_64 rng(derive_seed("subst#" + pid + "#" + word, opts.seed));
        const auto order = shuffled_indices(segments.size(), rng());
        const size_t n_sub = (segments.size() + 1) / 2;
        for (size_t s = 0; s < n_sub; ++s) {
          int& cls = segments[order[s]].class_index;
          cls = (cls + 1 + static_cast<int>(uniform_below(rng, kSilenceClass - 1))) %
                kSilenceClass;
        }
        pg = synthesize_posteriorgrams(segments, attempt_peak,
                                       derive_seed("jitter#" + pid + "#" + word, opts.seed));
        category = Category::PhonologicalError;
      }
      const std::string rel = "attempts/" + pid + "_" + word + ".pg";
      save_posteriorgrams(join_path(opts.out_dir, rel), pg);
      AttemptRecord rec;
      rec.patient_id = pid;
      rec.target_word = word;
      rec.audio_path = rel;
      rec.slt1_category = category;
      rec.slt1_binary = relabel_binary(category);
      rec.slt2_binary = rec.slt1_binary;
      attempts.push_back(rec);
    }
  }
  write_attempts(join_path(opts.out_dir, "attempts.csv"), attempts);
  write_json_file(join_path(opts.out_dir, "synth.json"),
                  json{{"words", opts.words},
                       {"patients", opts.patients},
                       {"peak", opts.peak},
                       {"attempt_peak", attempt_peak},
                       {"frames_per_phone", opts.frames_per_phone},
                       {"seed", opts.seed},
                       {"n_templates", templates.size()},
                       {"n_attempts", attempts.size()}});
  std::cout << "synthesized " << templates.size() << " templates and " << attempts.size()
            << " attempts in " << opts.out_dir << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (dynamic_cast<const MalformedWav*>(&e) || dynamic_cast<const UnsupportedEncoding*>(&e) ||
      dynamic_cast<const UnsupportedRate*>(&e) || dynamic_cast<const BadMagic*>(&e) ||
      dynamic_cast<const ShapeMismatch*>(&e) || dynamic_cast<const EmptyOutput*>(&e) ||
      dynamic_cast<const FileError*>(&e)) {
    return 3;
  }
  if (dynamic_cast<const SchemaMismatch*>(&e) || dynamic_cast<const DuplicateKey*>(&e) ||
      dynamic_cast<const UnknownCategory*>(&e)) {
    return 4;
  }
  if (dynamic_cast<const NonFiniteWeight*>(&e) ||
      dynamic_cast<const ModelDimensionError*>(&e)) {
    return 5;
  }
  if (dynamic_cast<const MissingTemplate*>(&e)) return 7;
  if (dynamic_cast<const Error*>(&e)) return 6;
  return 1;
}

}  // namespace nuva::cli
