// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_MATCHER_HPP
#define NUVA_MATCHER_HPP

#include <span>
#include <string>
#include <vector>

#include "nuva/manifest.hpp"
#include "nuva/posteriorgram.hpp"

namespace nuva {

inline constexpr double kLocalCostEps = 1e-10;

// Frame level cost: -ln(max(p.q, eps)). Identical one-hot frames cost 0,
// orthogonal frames cost -ln(eps), two flat distributions cost ln(45).
double local_cost(std::span<const double> p, std::span<const double> q,
                  double eps = kLocalCostEps);

struct DtwResult {
  double distance = 0.0; // accumulated cost / cells on the optimal path
  size_t path_len = 0;
};

// Dynamic time warping with steps (i-1,j), (i,j-1), (i-1,j-1), matched
// endpoints, no transition weights, no band constraint. Cost ties prefer the
// diagonal step, then (i-1,j).
DtwResult dtw_distance(const PosteriorgramSequence& h, const PosteriorgramSequence& a,
                       double eps = kLocalCostEps);

enum class CombinerKind { Min, Max, Mean, Single };

struct Combiner {
  CombinerKind kind = CombinerKind::Min;
  int index = 0; // Single only

  // "min" | "max" | "mean" | "single:<k>"
  static Combiner parse(const std::string& s);
  std::string name() const;
};

double combine(const std::vector<double>& distances, const Combiner& combiner);

struct TemplateSet {
  std::string target_word;
  std::vector<std::string> speaker_ids;
  std::vector<PosteriorgramSequence> templates;
};

struct VerificationResult {
  std::string target_word;
  std::vector<double> per_template_distance;
  double combined_distance = 0.0;
  double threshold = 0.0;
  Binary verdict = Binary::Incorrect;
};

// Verdict is correct iff the combined distance is strictly below the
// threshold; a distance equal to the threshold is incorrect.
VerificationResult verify(const PosteriorgramSequence& attempt, const TemplateSet& templates,
                          double threshold, const Combiner& combiner);

} // namespace nuva

#endif
