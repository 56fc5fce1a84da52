// SPDX-License-Identifier: Apache-2.0
#include "nuva/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nuva/errors.hpp"
#include "nuva/util.hpp"

namespace nuva {

namespace {

std::vector<Binary> threshold_predictions(std::span<const ScoredAttempt> attempts,
                                          double threshold) {
  std::vector<Binary> pred;
  pred.reserve(attempts.size());
  for (const auto& a : attempts) {
    pred.push_back(a.distance < threshold ? Binary::Correct : Binary::Incorrect);
  }
  return pred;
}

std::vector<Binary> truth_of(std::span<const ScoredAttempt> attempts) {
  std::vector<Binary> truth;
  truth.reserve(attempts.size());
  for (const auto& a : attempts) truth.push_back(a.truth);
  return truth;
}

// Best (threshold, metric) over the grid; ties keep the smallest threshold.
SweepPoint best_point(const std::vector<SweepPoint>& sweep) {
  SweepPoint best = sweep.front();
  for (const auto& p : sweep) {
    if (p.metric > best.metric) best = p;
  }
  return best;
}

} // namespace

std::vector<double> threshold_grid(std::span<const ScoredAttempt> attempts) {
  if (attempts.empty()) throw EmptyAttempts("no attempts to calibrate on");
  std::set<double> distinct;
  for (const auto& a : attempts) distinct.insert(a.distance);
  std::vector<double> d(distinct.begin(), distinct.end());
  std::vector<double> grid;
  grid.reserve(d.size() + 1);
  const double spread = d.back() - d.front();
  const double margin = spread > 0.0 ? 0.5 * spread / static_cast<double>(d.size())
                                     : 0.5;
  grid.push_back(d.front() - margin);
  for (size_t i = 0; i + 1 < d.size(); ++i) grid.push_back(0.5 * (d[i] + d[i + 1]));
  grid.push_back(d.back() + margin);
  return grid;
}

std::vector<SweepPoint> sweep_thresholds(std::span<const ScoredAttempt> attempts,
                                         std::span<const double> grid) {
  if (attempts.empty()) throw EmptyAttempts("no attempts to sweep");
  std::vector<Binary> truth = truth_of(attempts);
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    std::vector<Binary> pred = threshold_predictions(attempts, t);
    // Constant predictions have zero variance; score 0.
    MetricsReport m = metrics(confusion(truth, pred));
    out.push_back({t, m.pearson_r});
  }
  return out;
}

CalibrationMode parse_calibration_mode(const std::string& s) {
  if (s == "fixed") return CalibrationMode::Fixed;
  if (s == "adapted") return CalibrationMode::Adapted;
  throw UsageError("unknown calibration mode: '" + s + "' (want fixed|adapted)");
}

const char* to_string(CalibrationMode m) {
  return m == CalibrationMode::Fixed ? "fixed" : "adapted";
}

CalibrationResult calibrate(std::span<const ScoredAttempt> attempts, CalibrationMode mode) {
  if (attempts.empty()) throw EmptyAttempts("no attempts to calibrate on");
  CalibrationResult result;
  result.mode = mode;

  std::vector<double> pooled_grid = threshold_grid(attempts);
  result.sweep = sweep_thresholds(attempts, pooled_grid);
  SweepPoint pooled_best = best_point(result.sweep);
  result.fixed_threshold = pooled_best.threshold;

  std::vector<std::string> patients;
  for (const auto& a : attempts) {
    if (a.patient_id.empty()) {
      throw MissingPatientData("attempt with empty patient id");
    }
    if (std::find(patients.begin(), patients.end(), a.patient_id) == patients.end()) {
      patients.push_back(a.patient_id);
    }
  }

  if (mode == CalibrationMode::Fixed) {
    for (const auto& p : patients) result.thresholds[p] = pooled_best.threshold;
    result.objective_value = pooled_best.metric;
    return result;
  }

  for (const auto& p : patients) {
    std::vector<ScoredAttempt> own;
    for (const auto& a : attempts) {
      if (a.patient_id == p) own.push_back(a);
    }
    std::vector<double> grid = threshold_grid(own);
    std::vector<SweepPoint> sweep = sweep_thresholds(own, grid);
    result.thresholds[p] = best_point(sweep).threshold;
  }

  // Achieved pooled r when every attempt uses its patient's threshold.
  std::vector<Binary> truth = truth_of(attempts);
  std::vector<Binary> pred;
  pred.reserve(attempts.size());
  for (const auto& a : attempts) {
    pred.push_back(a.distance < result.thresholds.at(a.patient_id)
                       ? Binary::Correct
                       : Binary::Incorrect);
  }
  result.objective_value = metrics(confusion(truth, pred)).pearson_r;
  return result;
}

RocCurve roc(std::span<const ScoredAttempt> attempts) {
  if (attempts.empty()) throw SingleClass("no attempts for roc");
  size_t pos = 0, neg = 0;
  for (const auto& a : attempts) {
    if (a.truth == Binary::Correct) ++pos;
    else ++neg;
  }
  if (pos == 0 || neg == 0) {
    throw SingleClass("roc needs both correct and incorrect attempts");
  }

  std::set<double> distinct;
  for (const auto& a : attempts) distinct.insert(a.distance);

  RocCurve curve;
  curve.points.reserve(distinct.size() + 1);
  for (double t : distinct) { // ascending; t == min accepts nothing -> (0,0)
    size_t tp = 0, fp = 0;
    for (const auto& a : attempts) {
      if (a.distance < t) {
        if (a.truth == Binary::Correct) ++tp;
        else ++fp;
      }
    }
    curve.points.emplace_back(static_cast<double>(fp) / neg,
                              static_cast<double>(tp) / pos);
  }
  curve.points.emplace_back(1.0, 1.0); // threshold above the maximum

  double auc = 0.0;
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  curve.auc = auc;
  return curve;
}

CrossValidationResult cross_validate(std::span<const ScoredAttempt> attempts, int k,
                                     uint64_t seed, bool stratified) {
  const size_t n = attempts.size();
  if (k < 2) throw TooFewAttempts("cross validation needs k >= 2");
  if (n < static_cast<size_t>(k)) {
    throw TooFewAttempts("need at least k attempts for k-fold cross validation");
  }

  // Assign shuffled indices to contiguous near equal folds. Stratified mode
  // deals each truth class's shuffled members across folds the same way.
  std::vector<std::vector<size_t>> folds(k);
  auto split_contiguous = [&](const std::vector<size_t>& idx) {
    const size_t total = idx.size();
    size_t base = total / k, extra = total % k, at = 0;
    for (int f = 0; f < k; ++f) {
      size_t len = base + (static_cast<size_t>(f) < extra ? 1 : 0);
      for (size_t i = 0; i < len; ++i) folds[f].push_back(idx[at++]);
    }
  };
  if (!stratified) {
    split_contiguous(shuffled_indices(n, seed));
  } else {
    std::vector<size_t> shuffled = shuffled_indices(n, seed);
    for (Binary cls : {Binary::Correct, Binary::Incorrect}) {
      std::vector<size_t> members;
      for (size_t i : shuffled) {
        if (attempts[i].truth == cls) members.push_back(i);
      }
      split_contiguous(members);
    }
  }

  CrossValidationResult result;
  std::vector<double> acc, fpr, fnr, f1, r;
  for (int f = 0; f < k; ++f) {
    std::vector<ScoredAttempt> train, test;
    for (int g = 0; g < k; ++g) {
      for (size_t i : folds[g]) {
        (g == f ? test : train).push_back(attempts[i]);
      }
    }
    if (test.empty() || train.empty()) {
      throw TooFewAttempts("empty fold; reduce k");
    }
    CalibrationResult cal = calibrate(train, CalibrationMode::Fixed);
    const double threshold = cal.fixed_threshold;

    std::vector<Binary> truth = truth_of(test);
    std::vector<Binary> pred = threshold_predictions(test, threshold);
    MetricsReport m = metrics(confusion(truth, pred));

    CrossValidationResult::Fold fold;
    fold.fold_index = static_cast<size_t>(f);
    fold.test_size = test.size();
    fold.threshold = threshold;
    fold.metrics = m;
    result.folds.push_back(fold);
    acc.push_back(m.accuracy);
    fpr.push_back(m.fp_rate);
    fnr.push_back(m.fn_rate);
    f1.push_back(m.f1);
    r.push_back(m.pearson_r);
  }

  auto summarize = [](const std::vector<double>& v) {
    SummaryStats s;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    s.range = s.max - s.min;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return s;
  };
  result.accuracy = summarize(acc);
  result.fp_rate = summarize(fpr);
  result.fn_rate = summarize(fnr);
  result.f1 = summarize(f1);
  result.pearson_r = summarize(r);
  return result;
}

} // namespace nuva
