// SPDX-License-Identifier: Apache-2.0
#include "nuva/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nuva/errors.hpp"

namespace nuva {

double local_cost(std::span<const double> p, std::span<const double> q, double eps) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("posterior frames of different dimension");
  }
  double dot = 0.0;
  for (size_t k = 0; k < p.size(); ++k) dot += p[k] * q[k];
  return -std::log(std::max(dot, eps));
}

DtwResult dtw_distance(const PosteriorgramSequence& h, const PosteriorgramSequence& a,
                       double eps) {
  const size_t n = h.frames();
  const size_t m = a.frames();
  if (n == 0 || m == 0) throw EmptySequence("cannot align an empty sequence");

  // Rolling rows of (accumulated cost, cells on path so far).
  std::vector<double> prev_acc(m), cur_acc(m);
  std::vector<size_t> prev_len(m), cur_len(m);

  for (size_t i = 0; i < n; ++i) {
    auto hrow = h.row(i);
    for (size_t j = 0; j < m; ++j) {
      double cost = local_cost(hrow, a.row(j), eps);
      if (i == 0 && j == 0) {
        cur_acc[0] = cost;
        cur_len[0] = 1;
        continue;
      }
      double best;
      size_t best_len;
      if (i > 0 && j > 0) { // diagonal preferred on ties
        best = prev_acc[j - 1];
        best_len = prev_len[j - 1];
        if (prev_acc[j] < best) {
          best = prev_acc[j];
          best_len = prev_len[j];
        }
        if (cur_acc[j - 1] < best) {
          best = cur_acc[j - 1];
          best_len = cur_len[j - 1];
        }
      } else if (i > 0) {
        best = prev_acc[j];
        best_len = prev_len[j];
      } else {
        best = cur_acc[j - 1];
        best_len = cur_len[j - 1];
      }
      cur_acc[j] = best + cost;
      cur_len[j] = best_len + 1;
    }
    if (i + 1 < n) {
      prev_acc.swap(cur_acc);
      prev_len.swap(cur_len);
    }
  }
  DtwResult r;
  r.path_len = cur_len[m - 1];
  r.distance = cur_acc[m - 1] / static_cast<double>(r.path_len);
  return r;
}

Combiner Combiner::parse(const std::string& s) {
  Combiner c;
  if (s == "min") {
    c.kind = CombinerKind::Min;
  } else if (s == "max") {
    c.kind = CombinerKind::Max;
  } else if (s == "mean") {
    c.kind = CombinerKind::Mean;
  } else if (s.rfind("single:", 0) == 0) {
    c.kind = CombinerKind::Single;
    try {
      c.index = std::stoi(s.substr(7));
    } catch (const std::exception&) {
      throw UsageError("bad combiner spec: '" + s + "'");
    }
    if (c.index < 0) throw UsageError("combiner index must be non-negative");
  } else {
    throw UsageError("unknown combiner: '" + s + "' (want min|max|mean|single:<k>)");
  }
  return c;
}

std::string Combiner::name() const {
  switch (kind) {
    case CombinerKind::Min: return "min";
    case CombinerKind::Max: return "max";
    case CombinerKind::Mean: return "mean";
    case CombinerKind::Single: return "single:" + std::to_string(index);
  }
  return "min";
}

double combine(const std::vector<double>& distances, const Combiner& combiner) {
  if (distances.empty()) throw EmptyList("no template distances to combine");
  switch (combiner.kind) {
    case CombinerKind::Min:
      return *std::min_element(distances.begin(), distances.end());
    case CombinerKind::Max:
      return *std::max_element(distances.begin(), distances.end());
    case CombinerKind::Mean: {
      double sum = 0.0;
      for (double d : distances) sum += d;
      return sum / static_cast<double>(distances.size());
    }
    case CombinerKind::Single:
      if (combiner.index >= static_cast<int>(distances.size())) {
        throw IndexOutOfRange("combiner index " + std::to_string(combiner.index) +
                              " out of range for " + std::to_string(distances.size()) +
                              " templates");
      }
      return distances[combiner.index];
  }
  throw Error("unreachable combiner kind");
}

VerificationResult verify(const PosteriorgramSequence& attempt, const TemplateSet& templates,
                          double threshold, const Combiner& combiner) {
  if (!(threshold > 0.0)) {
    throw InvalidThreshold("threshold must be positive, got " + std::to_string(threshold));
  }
  if (templates.templates.empty()) {
    throw MissingTemplate("no templates for word '" + templates.target_word + "'");
  }
  VerificationResult r;
  r.target_word = templates.target_word;
  r.per_template_distance.reserve(templates.templates.size());
  for (const auto& tpl : templates.templates) {
    r.per_template_distance.push_back(dtw_distance(tpl, attempt).distance);
  }
  r.combined_distance = combine(r.per_template_distance, combiner);
  r.threshold = threshold;
  r.verdict = r.combined_distance < threshold ? Binary::Correct : Binary::Incorrect;
  return r;
}

} // namespace nuva
