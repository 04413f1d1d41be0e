#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

struct SegEvalConfig {
  // Explicit window; when absent the window follows the half-mean-segment rule.
  std::optional<std::size_t> k;
};

// Window used for gold segmentation `gold`: cfg.k if set, otherwise
// max(2, round(n / (2 * gold segments))) capped at n - 1.
std::size_t resolve_window(const Segmentation& gold, const SegEvalConfig& cfg);

// Fraction of positions i in [1, n-k] where "i and i+k share a segment"
// disagrees between gold and prediction.
double pk(const Segmentation& gold, const Segmentation& pred, const SegEvalConfig& cfg);

// Fraction of positions i in [1, n-k] where the boundary counts between
// utterances i and i+k differ.
double window_diff(const Segmentation& gold, const Segmentation& pred, const SegEvalConfig& cfg);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact (head, dependent) matching.
PRF arc_f1(const std::set<Arc>& gold, const std::set<Arc>& pred);

// Micro-averaged counts for corpus aggregation.
struct ArcCounts {
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t predicted = 0;

  ArcCounts& operator+=(const ArcCounts& o) {
    matched += o.matched;
    gold += o.gold;
    predicted += o.predicted;
    return *this;
  }
  PRF prf() const;
};

ArcCounts arc_counts(const std::set<Arc>& gold, const std::set<Arc>& pred);

// Sum over i < j of entry(i, j) / (j - i).
double local_rhetorical_intensity(const ScoreMatrix& a_top_rhe);

// Min-max rescales raw intensities over a set of dialogues to [0, 1]; a
// degenerate range maps everything to 0.
std::vector<double> rescale_intensities(std::span<const double> raw);

}  // namespace dialstruct
