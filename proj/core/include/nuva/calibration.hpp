// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_CALIBRATION_HPP
#define NUVA_CALIBRATION_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nuva/manifest.hpp"
#include "nuva/stats.hpp"

namespace nuva {

struct ScoredAttempt {
  std::string patient_id;
  std::string target_word;
  double distance = 0.0;
  Binary truth = Binary::Incorrect;
};

// Candidate thresholds: midpoints between consecutive distinct observed
// distances plus one point below the minimum and one above the maximum, so
// every reachable confusion table is visited exactly once.
std::vector<double> threshold_grid(std::span<const ScoredAttempt> attempts);

struct SweepPoint {
  double threshold = 0.0;
  double metric = 0.0; // Pearson's r of (distance < threshold) vs truth
};

// Evaluates each candidate threshold; a sweep that produces constant
// predictions scores 0 by convention.
std::vector<SweepPoint> sweep_thresholds(std::span<const ScoredAttempt> attempts,
                                         std::span<const double> grid);

enum class CalibrationMode { Fixed, Adapted };

CalibrationMode parse_calibration_mode(const std::string& s);
const char* to_string(CalibrationMode m);

struct CalibrationResult {
  CalibrationMode mode = CalibrationMode::Fixed;
  // Fixed: one entry per patient, all equal. Adapted: per patient optimum.
  std::map<std::string, double> thresholds;
  double fixed_threshold = 0.0;      // pooled optimum (also kept in adapted runs)
  double objective_value = 0.0;      // Pearson's r achieved at the optimum
  std::vector<SweepPoint> sweep;     // pooled sweep, for reporting
};

// Maximizes Pearson's r between thresholded predictions and ground truth.
// Ties pick the smallest threshold. Adapted mode repeats the sweep on each
// patient's own attempts.
CalibrationResult calibrate(std::span<const ScoredAttempt> attempts, CalibrationMode mode);

struct RocCurve {
  std::vector<std::pair<double, double>> points; // (fpr, tpr), (0,0) .. (1,1)
  double auc = 0.0;
};

// Threshold sweep over the distinct distances; accepting means
// distance < threshold. Throws SingleClass when only one class is present.
RocCurve roc(std::span<const ScoredAttempt> attempts);

struct SummaryStats {
  double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0, range = 0.0;
};

struct CrossValidationResult {
  struct Fold {
    size_t fold_index = 0;
    size_t test_size = 0;
    double threshold = 0.0;
    MetricsReport metrics;
  };
  std::vector<Fold> folds;
  SummaryStats accuracy, fp_rate, fn_rate, f1, pearson_r;
};

// k-fold cross validation of the threshold calibration for one patient's
// attempts: seeded shuffle, contiguous near equal folds (stratified by truth
// when requested), calibrate on the k-1 training folds, evaluate on the held
// out fold. SD is the population standard deviation across folds.
CrossValidationResult cross_validate(std::span<const ScoredAttempt> attempts, int k,
                                     uint64_t seed, bool stratified = false);

} // namespace nuva

#endif
