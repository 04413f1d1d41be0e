#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

enum class ThresholdPolicy { mu_minus_half_sigma, fixed };

struct TilingConfig {
  std::size_t window = 2;
  ThresholdPolicy policy = ThresholdPolicy::mu_minus_half_sigma;
  double fixed_threshold = 0.5;  // used with ThresholdPolicy::fixed, in [0, 1]
  std::optional<std::size_t> smoothing;  // moving-average width over gap scores

  void validate() const;
};

// Block cohesion across each gap: g[i-1] is the mean of common(p, q) over
// p in [max(1, i-w+1), i] and q in [i+1, min(n, i+w)] (1-based utterances).
std::vector<double> gap_scores(const ScoreMatrix& common, const TilingConfig& cfg);

// Centered moving average of the given odd or even width, truncated at the ends.
std::vector<double> smooth(const std::vector<double>& g, std::size_t width);

// Depth of each gap below the highest points reached by climbing outward
// on both sides while the scores do not decrease.
std::vector<double> depth_scores(const std::vector<double>& g);

// Boundary gaps: valleys of the gap scores whose depth is positive and
// exceeds the threshold (mean - std/2 of the depths, or a fixed cutoff).
// Within a run of equal-valued adjacent valleys only the first is kept.
Segmentation texttiling(const ScoreMatrix& common, const TilingConfig& cfg);

// Maximum-score projective tree rooted at utterance 1 with rightward arcs
// only. Equal-score alternatives resolve toward the shortest arc from the
// current span head.
DependencyStructure eisner(const ScoreMatrix& common);

// Sum of common(head, dependent) over the arcs of a tree.
double tree_score(const ScoreMatrix& common, const DependencyStructure& tree);

}  // namespace dialstruct
