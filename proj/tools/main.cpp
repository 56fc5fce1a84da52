// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_source_flags(CLI::App* cmd, nuva::cli::SourceOptions& src) {
  cmd->add_option("--model", src.model_path, "GRU weight file (NUVAGRU1)");
  cmd->add_option("--synthetic", src.synthetic_spec,
                  "Synthetic posteriorgram source, e.g. peak=0.95,seed=7")
      ->each([&src](const std::string&) { src.synthetic_set = true; });
}

void add_threads_flag(CLI::App* cmd, int& threads) {
  cmd->add_option("--threads", threads, "Worker threads for attempt level parallelism")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Naming attempt verification against healthy speaker templates"};
  app.require_subcommand(1);

  nuva::cli::ExtractOptions extract_opts;
  auto* c_extract = app.add_subcommand("extract", "Extract MFCC+delta features from a wav");
  c_extract->add_option("--audio", extract_opts.audio_path, "Input wav (16 kHz mono PCM)")
      ->required();
  c_extract->add_option("--out-dir", extract_opts.out_dir, "Output directory");

  nuva::cli::InferOptions infer_opts;
  auto* c_infer = app.add_subcommand("infer", "Produce a phone posteriorgram for one input");
  c_infer->add_option("--audio", infer_opts.audio_path, "Input wav or .pg cache")->required();
  add_source_flags(c_infer, infer_opts.source);
  c_infer->add_option("--word", infer_opts.word,
                      "Target word (synthetic source; defaults to the file stem)");
  c_infer->add_option("--out-dir", infer_opts.out_dir, "Output directory");
  c_infer->add_flag("--dump-features", infer_opts.dump_features,
                    "Also write the intermediate feature sequence");

  nuva::cli::EnrollOptions enroll_opts;
  auto* c_enroll = app.add_subcommand("enroll", "Cache template posteriorgrams");
  c_enroll->add_option("--templates", enroll_opts.templates_path, "Template manifest csv")
      ->required();
  add_source_flags(c_enroll, enroll_opts.source);
  c_enroll->add_option("--out-dir", enroll_opts.out_dir, "Output directory");
  add_threads_flag(c_enroll, enroll_opts.threads);

  nuva::cli::VerifyOptions verify_opts;
  auto* c_verify = app.add_subcommand("verify", "Classify attempts against templates");
  c_verify->add_option("--attempts", verify_opts.attempts_path, "Attempt manifest csv")
      ->required();
  c_verify->add_option("--templates", verify_opts.templates_path, "Template manifest csv")
      ->required();
  add_source_flags(c_verify, verify_opts.source);
  c_verify->add_option("--combiner", verify_opts.combiner,
                       "min | max | mean | single:<k>");
  c_verify->add_option("--threshold", verify_opts.threshold, "Fixed decision threshold")
      ->each([&verify_opts](const std::string&) { verify_opts.threshold_set = true; });
  c_verify->add_option("--calibration", verify_opts.calibration_path,
                       "calibration.json produced by the calibrate command");
  c_verify->add_option("--out-dir", verify_opts.out_dir, "Output directory");
  add_threads_flag(c_verify, verify_opts.threads);

  nuva::cli::CalibrateOptions calibrate_opts;
  auto* c_calibrate = app.add_subcommand("calibrate", "Fit decision thresholds");
  c_calibrate->add_option("--attempts", calibrate_opts.attempts_path, "Attempt manifest csv")
      ->required();
  c_calibrate
      ->add_option("--templates", calibrate_opts.templates_path, "Template manifest csv")
      ->required();
  add_source_flags(c_calibrate, calibrate_opts.source);
  c_calibrate->add_option("--combiner", calibrate_opts.combiner,
                          "min | max | mean | single:<k>");
  c_calibrate->add_option("--mode", calibrate_opts.mode, "fixed | adapted");
  c_calibrate->add_option("--out-dir", calibrate_opts.out_dir, "Output directory");
  add_threads_flag(c_calibrate, calibrate_opts.threads);

  nuva::cli::CvOptions cv_opts;
  auto* c_cv = app.add_subcommand("cv", "K-fold cross validation of the calibration");
  c_cv->add_option("--attempts", cv_opts.attempts_path, "Attempt manifest csv")->required();
  c_cv->add_option("--templates", cv_opts.templates_path, "Template manifest csv")
      ->required();
  add_source_flags(c_cv, cv_opts.source);
  c_cv->add_option("--combiner", cv_opts.combiner, "min | max | mean | single:<k>");
  c_cv->add_option("--folds", cv_opts.folds, "Number of folds");
  c_cv->add_option("--seed", cv_opts.seed, "Shuffle seed")->required();
  c_cv->add_flag("--stratified", cv_opts.stratified, "Stratify folds by ground truth");
  c_cv->add_option("--out-dir", cv_opts.out_dir, "Output directory");
  add_threads_flag(c_cv, cv_opts.threads);

  nuva::cli::StatsOptions stats_opts;
  auto* c_stats = app.add_subcommand("stats", "Agreement and significance statistics");
  c_stats->add_option("--predictions", stats_opts.predictions_path, "Prediction table csv")
      ->required();
  c_stats->add_option("--out-dir", stats_opts.out_dir, "Output directory");

  nuva::cli::BenchOptions bench_opts;
  auto* c_bench = app.add_subcommand("bench", "Wall clock latency of the decision pipeline");
  c_bench->add_option("--attempts", bench_opts.attempts_path, "Attempt manifest csv")
      ->required();
  c_bench->add_option("--templates", bench_opts.templates_path, "Template manifest csv")
      ->required();
  add_source_flags(c_bench, bench_opts.source);
  c_bench->add_option("--combiner", bench_opts.combiner, "min | max | mean | single:<k>");
  c_bench->add_option("--threshold", bench_opts.threshold, "Decision threshold");
  c_bench->add_option("--warmup", bench_opts.warmup, "Untimed warmup passes");
  c_bench->add_option("--repeats", bench_opts.repeats, "Timed passes over the corpus");
  c_bench->add_option("--compare", bench_opts.compare_path,
                      "latency_raw.csv of a previous run for a paired Wilcoxon test");
  c_bench->add_option("--out-dir", bench_opts.out_dir, "Output directory");

  nuva::cli::SynthOptions synth_opts;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic evaluation corpus");
  c_synth->add_option("--out-dir", synth_opts.out_dir, "Output directory")->required();
  c_synth->add_option("--words", synth_opts.words, "Number of target words");
  c_synth->add_option("--patients", synth_opts.patients, "Number of patients");
  c_synth->add_option("--peak", synth_opts.peak, "Template peak probability");
  c_synth->add_option("--attempt-peak", synth_opts.attempt_peak,
                      "Attempt peak probability (defaults to --peak)");
  c_synth->add_option("--frames-per-phone", synth_opts.frames_per_phone,
                      "Frames per phone segment");
  c_synth->add_option("--seed", synth_opts.seed, "Corpus seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_extract)) nuva::cli::cmd_extract(extract_opts);
    if (app.got_subcommand(c_infer)) nuva::cli::cmd_infer(infer_opts);
    if (app.got_subcommand(c_enroll)) nuva::cli::cmd_enroll(enroll_opts);
    if (app.got_subcommand(c_verify)) nuva::cli::cmd_verify(verify_opts);
    if (app.got_subcommand(c_calibrate)) nuva::cli::cmd_calibrate(calibrate_opts);
    if (app.got_subcommand(c_cv)) nuva::cli::cmd_cv(cv_opts);
    if (app.got_subcommand(c_stats)) nuva::cli::cmd_stats(stats_opts);
    if (app.got_subcommand(c_bench)) nuva::cli::cmd_bench(bench_opts);
    if (app.got_subcommand(c_synth)) nuva::cli::cmd_synth(synth_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nuva::cli::exit_code_for(e);
  }
  return 0;
}
