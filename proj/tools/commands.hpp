// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_TOOLS_COMMANDS_HPP
#define NUVA_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <exception>
#include <string>

namespace nuva::cli {

// Posteriorgram source selection shared by every scoring command. At most one
// of model_path / synthetic_spec may be set; with neither, manifests must
// point at ".pg" caches.
struct SourceOptions {
  std::string model_path;
  std::string synthetic_spec;
  bool synthetic_set = false;
};

struct ExtractOptions {
  std::string audio_path;
  std::string out_dir = ".";
};

struct InferOptions {
  std::string audio_path;
  SourceOptions source;
  std::string word;  // defaults to the audio file stem
  std::string out_dir = ".";
  bool dump_features = false;
};

struct EnrollOptions {
  std::string templates_path;
  SourceOptions source;
  std::string out_dir = ".";
  int threads = 1;
};

struct VerifyOptions {
  std::string attempts_path;
  std::string templates_path;
  SourceOptions source;
  std::string combiner = "min";
  double threshold = 0.0;
  bool threshold_set = false;
  std::string calibration_path;
  std::string out_dir = ".";
  int threads = 1;
};

struct CalibrateOptions {
  std::string attempts_path;
  std::string templates_path;
  SourceOptions source;
  std::string combiner = "min";
  std::string mode = "fixed";
  std::string out_dir = ".";
  int threads = 1;
};

struct CvOptions {
  std::string attempts_path;
  std::string templates_path;
  SourceOptions source;
  std::string combiner = "min";
  int folds = 10;
  uint64_t seed = 0;
  bool stratified = false;
  std::string out_dir = ".";
  int threads = 1;
};

struct StatsOptions {
  std::string predictions_path;
  std::string out_dir = ".";
};

struct BenchOptions {
  std::string attempts_path;
  std::string templates_path;
  SourceOptions source;
  std::string combiner = "min";
  double threshold = 1.0;
  int warmup = 3;
  int repeats = 1;
  std::string compare_path;  // latency_raw.csv of a previous run
  std::string out_dir = ".";
};

struct SynthOptions {
  std::string out_dir = ".";
  int words = 100;
  int patients = 2;
  double peak = 0.95;
  double attempt_peak = -1.0;  // < 0 means same as peak
  int frames_per_phone = 8;
  uint64_t seed = 0;
};

// Each command writes its artifacts under out_dir and prints a one line
// summary; errors surface as typed nuva exceptions.
void cmd_extract(const ExtractOptions& opts);
void cmd_infer(const InferOptions& opts);
void cmd_enroll(const EnrollOptions& opts);
void cmd_verify(const VerifyOptions& opts);
void cmd_calibrate(const CalibrateOptions& opts);
void cmd_cv(const CvOptions& opts);
void cmd_stats(const StatsOptions& opts);
void cmd_bench(const BenchOptions& opts);
void cmd_synth(const SynthOptions& opts);

// Process exit code for a failed command: 2 usage, 3 file or format, 4
// manifest schema, 5 model weights, 6 computation domain, 7 missing
// template, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace nuva::cli

#endif
