// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_STATS_HPP
#define NUVA_STATS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nuva/manifest.hpp"

namespace nuva {

// --- special functions ------------------------------------------------

// Standard normal CDF via erfc; absolute error well below 1e-7.
double normal_cdf(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// P(X > x) for X ~ chi squared with df degrees of freedom.
double chi_square_upper_tail(double x, int df);

// --- confusion metrics -------------------------------------------------

// Positive class is "correct": tp counts attempts both raters call correct,
// fp truth-incorrect predicted-correct, fn truth-correct predicted-incorrect.
struct ConfusionCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long n() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion(std::span<const Binary> truth, std::span<const Binary> pred);

struct MetricsReport {
  double accuracy = 0.0;
  double fp_rate = 0.0; // fp / n
  double fn_rate = 0.0; // fn / n
  double f1 = 0.0;      // 0 when 2tp+fp+fn == 0
  double pearson_r = 0.0; // phi coefficient; 0 when any marginal is 0
};

MetricsReport metrics(const ConfusionCounts& c);

// Pearson's r between two binary vectors with correct coded as 1.
double pearson_binary(std::span<const Binary> a, std::span<const Binary> b);

// --- chance corrected agreement -----------------------------------------

struct AgreementReport {
  double pa = 0.0;      // raw percentage agreement
  double ac1 = 0.0;     // first order agreement coefficient
  double std_err = 0.0;
  std::pair<double, double> ci95{0.0, 0.0}; // ac1 +- 1.96 se, not clamped
  int level_code = 0;
  std::string level_name;
};

// Two rater, two category first order agreement coefficient with the
// matching subject level variance estimator. pa == 1 gives ac1 == 1 and a
// zero standard error.
AgreementReport gwet_ac1(std::span<const Binary> a, std::span<const Binary> b);

// --- probabilistic benchmarking of a coefficient -------------------------

struct BenchmarkInterval {
  double lo;        // exclusive
  double hi;        // inclusive
  int code;
  const char* name;
};

// Agreement strength scale, descending: (0.90, inf] almost perfect,
// (0.80, 0.90] strong, (0.60, 0.80] moderate, (0.40, 0.60] weak,
// (0.20, 0.40] minimal, (-inf, 0.20] none.
std::span<const BenchmarkInterval> agreement_benchmark_scale();

struct BenchmarkResult {
  int level_code = 0;
  std::string level_name;
  std::vector<double> membership; // one per interval, descending codes
  std::vector<double> cumulative; // running sum of membership
};

// Interval membership probabilities for a coefficient with the given
// standard error, cumulated from the top; the reported level is the highest
// one whose cumulative probability reaches 0.95. A zero standard error
// degenerates to the interval containing the estimate.
BenchmarkResult benchmark_level(double coefficient, double std_err,
                                std::span<const BenchmarkInterval> scale =
                                    agreement_benchmark_scale());

// --- k system significance tests ----------------------------------------

// items x systems binary matrix, 1 meaning a correctly classified item.
struct BinaryTable {
  size_t n_items = 0;
  size_t n_systems = 0;
  std::vector<uint8_t> values; // row major

  uint8_t at(size_t i, size_t j) const { return values[i * n_systems + j]; }
  uint8_t& at(size_t i, size_t j) { return values[i * n_systems + j]; }
};

struct CochranResult {
  double q = 0.0;
  int df = 0;
  double p = 1.0;
  bool degenerate = false; // all row sums 0 or k: Q := 0, p := 1
};

CochranResult cochran_q(const BinaryTable& table);

enum class Stars { NS, OneStar, TwoStars, ThreeStars };
const char* to_string(Stars s);
Stars stars_for(double p);

struct PairwiseComparison {
  size_t a = 0, b = 0;   // column indices
  std::string label_a, label_b;
  double mean_rank_a = 0.0, mean_rank_b = 0.0;
  double z = 0.0;
  double raw_p = 1.0;
  double holm_p = 1.0;
  Stars stars = Stars::NS;
};

// Holm step-down adjustment; input order is preserved in the output.
std::vector<double> holm_adjust(std::span<const double> raw_p);

// Rank based all-pairs post hoc test on matched binary outcomes: items are
// ranked across systems with mid-ranks for ties, z = mean rank difference
// over sqrt(k(k+1)/(6N)) with the usual tie correction factor
// 1 - sum(t^3 - t) / (N k (k^2 - 1)), two sided normal p values, Holm
// adjusted. Fully tied tables degenerate to p = 1 everywhere.
std::vector<PairwiseComparison> dunn_holm(const BinaryTable& table,
                                          std::span<const std::string> labels);

// --- paired Wilcoxon signed rank ------------------------------------------

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  size_t n_pairs = 0;
  size_t n_zero = 0; // zero differences, kept in the ranking (Pratt)
  double z = 0.0;
  double p = 1.0;
};

// Two sided, normal approximation with tie correction; zero differences are
// ranked then dropped (Pratt). All-zero differences give p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

} // namespace nuva

#endif
