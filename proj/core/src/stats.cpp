// SPDX-License-Identifier: Apache-2.0
#include "nuva/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nuva/errors.hpp"

namespace nuva {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw Error("gamma_p requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw Error("gamma_q requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_upper_tail(double x, int df) {
  if (df < 1) throw Error("chi_square_upper_tail requires df >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

ConfusionCounts confusion(std::span<const Binary> truth, std::span<const Binary> pred) {
  if (truth.size() != pred.size() || truth.empty()) {
    throw LengthMismatch("truth and prediction vectors must have equal non-zero length");
  }
  ConfusionCounts c;
  for (size_t i = 0; i < truth.size(); ++i) {
    bool t = truth[i] == Binary::Correct;
    bool p = pred[i] == Binary::Correct;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t && !p) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport metrics(const ConfusionCounts& c) {
  const double n = static_cast<double>(c.n());
  if (n <= 0.0) throw LengthMismatch("empty confusion table");
  MetricsReport m;
  m.accuracy = (c.tp + c.tn) / n;
  m.fp_rate = c.fp / n;
  m.fn_rate = c.fn / n;
  const double f1_den = static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.f1 = f1_den > 0.0 ? 2.0 * c.tp / f1_den : 0.0;
  const double m1 = static_cast<double>(c.tp + c.fp);
  const double m2 = static_cast<double>(c.tp + c.fn);
  const double m3 = static_cast<double>(c.tn + c.fp);
  const double m4 = static_cast<double>(c.tn + c.fn);
  if (m1 > 0.0 && m2 > 0.0 && m3 > 0.0 && m4 > 0.0) {
    m.pearson_r = (static_cast<double>(c.tp) * c.tn - static_cast<double>(c.fp) * c.fn) /
                  std::sqrt(m1 * m2 * m3 * m4);
  }
  return m;
}

double pearson_binary(std::span<const Binary> a, std::span<const Binary> b) {
  return metrics(confusion(a, b)).pearson_r;
}

AgreementReport gwet_ac1(std::span<const Binary> a, std::span<const Binary> b) {
  if (a.size() != b.size() || a.empty()) {
    throw LengthMismatch("rating vectors must have equal non-zero length");
  }
  const size_t n = a.size();
  size_t agree = 0, a_correct = 0, b_correct = 0;
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) ++agree;
    if (a[i] == Binary::Correct) ++a_correct;
    if (b[i] == Binary::Correct) ++b_correct;
  }
  const double pa = static_cast<double>(agree) / n;
  const double pi_hat = static_cast<double>(a_correct + b_correct) / (2.0 * n);
  const double pe = 2.0 * pi_hat * (1.0 - pi_hat); // <= 0.5 for two categories
  const double ac1 = (pa - pe) / (1.0 - pe);

  // Subject level jackknife style variance: gamma_i is the per subject
  // coefficient, corrected for the chance term's own sampling variation.
  double var = 0.0;
  if (n > 1) {
    double sum_sq = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double pa_i = a[i] == b[i] ? 1.0 : 0.0;
      const double gamma_i = (pa_i - pe) / (1.0 - pe);
      // Per subject chance share: both correct -> 1 - pi, both incorrect ->
      // pi, split -> 1/2.
      const double share =
          0.5 * ((a[i] == Binary::Correct ? 1.0 - pi_hat : pi_hat) +
                 (b[i] == Binary::Correct ? 1.0 - pi_hat : pi_hat));
      const double gamma_star =
          gamma_i - 2.0 * (1.0 - ac1) * (share - pe) / (1.0 - pe);
      sum_sq += (gamma_star - ac1) * (gamma_star - ac1);
    }
    var = sum_sq / (static_cast<double>(n) * (n - 1));
  }

  AgreementReport r;
  r.pa = pa;
  r.ac1 = ac1;
  r.std_err = std::sqrt(std::max(var, 0.0));
  r.ci95 = {ac1 - 1.96 * r.std_err, ac1 + 1.96 * r.std_err};
  BenchmarkResult level = benchmark_level(ac1, r.std_err);
  r.level_code = level.level_code;
  r.level_name = level.level_name;
  return r;
}

std::span<const BenchmarkInterval> agreement_benchmark_scale() {
  static const BenchmarkInterval kScale[] = {
      {0.90, std::numeric_limits<double>::infinity(), 6, "Almost Perfect"},
      {0.80, 0.90, 5, "Strong"},
      {0.60, 0.80, 4, "Moderate"},
      {0.40, 0.60, 3, "Weak"},
      {0.20, 0.40, 2, "Minimal"},
      {-std::numeric_limits<double>::infinity(), 0.20, 1, "None"},
  };
  return kScale;
}

BenchmarkResult benchmark_level(double coefficient, double std_err,
                                std::span<const BenchmarkInterval> scale) {
  if (std_err < 0.0 || !std::isfinite(coefficient)) {
    throw ZeroStdErr("benchmark_level requires a finite coefficient and std_err >= 0");
  }
  BenchmarkResult r;
  double cum = 0.0;
  bool chosen = false;
  for (const auto& iv : scale) {
    // P(lo < K <= hi) for K ~ N(coefficient, std_err^2).
    double member;
    if (std_err == 0.0) {
      member = (coefficient > iv.lo && coefficient <= iv.hi) ? 1.0 : 0.0;
    } else if (std::isinf(iv.hi)) {
      member = normal_cdf((coefficient - iv.lo) / std_err);
    } else if (std::isinf(iv.lo)) {
      member = 1.0 - normal_cdf((coefficient - iv.hi) / std_err);
    } else {
      member = normal_cdf((coefficient - iv.lo) / std_err) -
               normal_cdf((coefficient - iv.hi) / std_err);
    }
    r.membership.push_back(member);
    cum += member;
    r.cumulative.push_back(cum);
    if (!chosen && cum >= 0.95) {
      r.level_code = iv.code;
      r.level_name = iv.name;
      chosen = true;
    }
  }
  if (!chosen && !scale.empty()) {
    r.level_code = scale.back().code;
    r.level_name = scale.back().name;
  }
  return r;
}

CochranResult cochran_q(const BinaryTable& table) {
  const size_t n = table.n_items;
  const size_t k = table.n_systems;
  if (n == 0 || k < 2) throw LengthMismatch("cochran_q needs >= 1 item and >= 2 systems");

  std::vector<double> col_sums(k, 0.0);
  double sum_rows = 0.0, sum_rows_sq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (size_t j = 0; j < k; ++j) {
      double v = table.at(i, j);
      col_sums[j] += v;
      row += v;
    }
    sum_rows += row;
    sum_rows_sq += row * row;
  }
  CochranResult r;
  r.df = static_cast<int>(k) - 1;
  const double denom = k * sum_rows - sum_rows_sq;
  if (denom <= 0.0) {
    r.degenerate = true;
    r.q = 0.0;
    r.p = 1.0;
    return r;
  }
  const double mean_col = sum_rows / k;
  double ss_cols = 0.0;
  for (double c : col_sums) ss_cols += (c - mean_col) * (c - mean_col);
  r.q = static_cast<double>(k) * (k - 1) * ss_cols / denom;
  r.p = chi_square_upper_tail(r.q, r.df);
  return r;
}

const char* to_string(Stars s) {
  switch (s) {
    case Stars::NS: return "NS";
    case Stars::OneStar: return "*";
    case Stars::TwoStars: return "**";
    case Stars::ThreeStars: return "***";
  }
  return "NS";
}

Stars stars_for(double p) {
  if (p < 0.001) return Stars::ThreeStars;
  if (p < 0.01) return Stars::TwoStars;
  if (p < 0.05) return Stars::OneStar;
  return Stars::NS;
}

std::vector<double> holm_adjust(std::span<const double> raw_p) {
  const size_t m = raw_p.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return raw_p[x] < raw_p[y]; });
  std::vector<double> adjusted(m, 0.0);
  double running = 0.0;
  for (size_t rank = 0; rank < m; ++rank) {
    double scaled = std::min(1.0, static_cast<double>(m - rank) * raw_p[order[rank]]);
    running = std::max(running, scaled);
    adjusted[order[rank]] = running;
  }
  return adjusted;
}

std::vector<PairwiseComparison> dunn_holm(const BinaryTable& table,
                                          std::span<const std::string> labels) {
  const size_t n = table.n_items;
  const size_t k = table.n_systems;
  if (n == 0 || k < 2) throw LengthMismatch("dunn_holm needs >= 1 item and >= 2 systems");
  if (labels.size() != k) throw LengthMismatch("label count does not match system count");

  // Within item mid-ranks. Binary outcomes make this a two group split.
  std::vector<double> mean_rank(k, 0.0);
  double tie_sum = 0.0; // sum over items of (t^3 - t) per tied group
  for (size_t i = 0; i < n; ++i) {
    size_t ones = 0;
    for (size_t j = 0; j < k; ++j) ones += table.at(i, j);
    const size_t zeros = k - ones;
    // zeros occupy ranks 1..zeros, ones the remainder; mid-ranks of a tied
    // block are the block average.
    const double rank_zero = 0.5 * (1.0 + zeros);
    const double rank_one = 0.5 * (zeros + 1.0 + k);
    for (size_t j = 0; j < k; ++j) {
      mean_rank[j] += table.at(i, j) ? rank_one : rank_zero;
    }
    tie_sum += static_cast<double>(zeros) * zeros * zeros - zeros;
    tie_sum += static_cast<double>(ones) * ones * ones - ones;
  }
  for (double& r : mean_rank) r /= static_cast<double>(n);

  const double kk = static_cast<double>(k);
  const double correction =
      1.0 - tie_sum / (static_cast<double>(n) * kk * (kk * kk - 1.0));
  const double base_var = kk * (kk + 1.0) / (6.0 * static_cast<double>(n));
  const bool degenerate = correction <= 1e-12;
  const double se = degenerate ? 0.0 : std::sqrt(base_var * correction);

  std::vector<PairwiseComparison> pairs;
  std::vector<double> raw;
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      PairwiseComparison pc;
      pc.a = a;
      pc.b = b;
      pc.label_a = labels[a];
      pc.label_b = labels[b];
      pc.mean_rank_a = mean_rank[a];
      pc.mean_rank_b = mean_rank[b];
      if (!degenerate) {
        pc.z = (mean_rank[a] - mean_rank[b]) / se;
        pc.raw_p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(pc.z))));
      } else {
        pc.z = 0.0;
        pc.raw_p = 1.0;
      }
      raw.push_back(pc.raw_p);
      pairs.push_back(std::move(pc));
    }
  }
  std::vector<double> holm = holm_adjust(raw);
  for (size_t i = 0; i < pairs.size(); ++i) {
    pairs[i].holm_p = holm[i];
    pairs[i].stars = stars_for(holm[i]);
  }
  return pairs;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw LengthMismatch("paired samples must have equal non-zero length");
  }
  const size_t n = x.size();
  std::vector<double> diff(n);
  for (size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];

  // Rank |d| with mid-ranks for ties, zeros included (Pratt).
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::fabs(diff[a]) < std::fabs(diff[b]);
  });
  std::vector<double> rank(n, 0.0);
  std::vector<double> nonzero_tie_blocks;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && std::fabs(diff[order[j]]) == std::fabs(diff[order[i]])) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t t = i; t < j; ++t) rank[order[t]] = mid;
    if (std::fabs(diff[order[i]]) > 0.0) {
      nonzero_tie_blocks.push_back(static_cast<double>(j - i));
    }
    i = j;
  }

  WilcoxonResult r;
  r.n_pairs = n;
  for (size_t t = 0; t < n; ++t) {
    if (diff[t] > 0.0) r.w_plus += rank[t];
    else if (diff[t] < 0.0) r.w_minus += rank[t];
    else ++r.n_zero;
  }
  const double nn = static_cast<double>(n);
  const double z0 = static_cast<double>(r.n_zero);
  const double mean = (nn * (nn + 1.0) - z0 * (z0 + 1.0)) / 4.0;
  double var24 = nn * (nn + 1.0) * (2.0 * nn + 1.0) - z0 * (z0 + 1.0) * (2.0 * z0 + 1.0);
  for (double t : nonzero_tie_blocks) var24 -= 0.5 * t * (t * t - 1.0);
  const double var = var24 / 24.0;
  if (var <= 0.0) {
    r.z = 0.0;
    r.p = 1.0;
    return r;
  }
  r.z = (r.w_plus - mean) / std::sqrt(var);
  r.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(r.z))));
  return r;
}

} // namespace nuva
