#include "dialstruct/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dialstruct/error.hpp"

namespace dialstruct {

void TilingConfig::validate() const {
  if (window < 1) throw InvalidArgument("tiling window must be >= 1");
  if (policy == ThresholdPolicy::fixed && (fixed_threshold < 0.0 || fixed_threshold > 1.0)) {
    throw InvalidArgument("fixed threshold must be in [0, 1]");
  }
  if (smoothing && *smoothing < 1) throw InvalidArgument("smoothing width must be >= 1");
}

std::vector<double> gap_scores(const ScoreMatrix& common, const TilingConfig& cfg) {
  cfg.validate();
  const std::size_t n = common.n();
  if (n < 2) throw InvalidArgument("gap scores need n >= 2");
  const std::size_t w = cfg.window;
  std::vector<double> g;
  g.reserve(n - 1);
  // 0-based gap i sits between rows i and i+1.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t p_lo = i + 1 >= w ? i + 1 - w : 0;
    const std::size_t q_hi = std::min(n - 1, i + w);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = p_lo; p <= i; ++p)
      for (std::size_t q = i + 1; q <= q_hi; ++q) {
        sum += common(p, q);
        ++count;
      }
    g.push_back(sum / static_cast<double>(count));
  }
  return g;
}

std::vector<double> smooth(const std::vector<double>& g, std::size_t width) {
  if (width <= 1) return g;
  const std::size_t before = (width - 1) / 2;
  const std::size_t after = width - 1 - before;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t lo = i >= before ? i - before : 0;
    const std::size_t hi = std::min(g.size() - 1, i + after);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += g[k];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<double> depth_scores(const std::vector<double>& g) {
  std::vector<double> depth(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double left = g[i];
    for (std::size_t k = i; k-- > 0;) {
      if (g[k] >= left) left = g[k];
      else break;
    }
    double right = g[i];
    for (std::size_t k = i + 1; k < g.size(); ++k) {
      if (g[k] >= right) right = g[k];
      else break;
    }
    depth[i] = (left - g[i]) + (right - g[i]);
  }
  return depth;
}

Segmentation texttiling(const ScoreMatrix& common, const TilingConfig& cfg) {
  std::vector<double> g = gap_scores(common, cfg);
  if (cfg.smoothing) g = smooth(g, *cfg.smoothing);
  const std::vector<double> depth = depth_scores(g);

  double threshold = cfg.fixed_threshold;
  if (cfg.policy == ThresholdPolicy::mu_minus_half_sigma) {
    const double count = static_cast<double>(depth.size());
    const double mean = std::accumulate(depth.begin(), depth.end(), 0.0) / count;
    double sq = 0.0;
    for (double d : depth) sq += (d - mean) * (d - mean);
    threshold = mean - std::sqrt(sq / count) / 2.0;
  }

  std::set<std::size_t> boundaries;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool valley = (i == 0 || g[i] <= g[i - 1]) && (i + 1 == g.size() || g[i] <= g[i + 1]);
    if (!valley || depth[i] <= 0.0 || depth[i] <= threshold) continue;
    // Plateau of equal valleys: the first gap stands for the run.
    if (i > 0 && g[i] == g[i - 1] && boundaries.contains(i)) continue;
    boundaries.insert(i + 1);
  }
  return Segmentation(common.n(), std::move(boundaries));
}

DependencyStructure eisner(const ScoreMatrix& common) {
  const std::size_t n = common.n();
  if (n < 2) throw InvalidArgument("eisner needs n >= 2");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // complete[s][t]: s heads every node in (s, t]. incomplete[s][t]: arc s -> t
  // with s heading (s, t). Leftward items are empty because only rightward
  // arcs carry scores, so incomplete[s][t] = complete[s][t-1] + score(s, t).
  std::vector<std::vector<double>> complete(n, std::vector<double>(n, kNegInf));
  std::vector<std::vector<double>> incomplete(n, std::vector<double>(n, kNegInf));
  std::vector<std::vector<std::size_t>> split(n, std::vector<std::size_t>(n, 0));
  for (std::size_t s = 0; s < n; ++s) complete[s][s] = 0.0;

  for (std::size_t len = 1; len < n; ++len) {
    for (std::size_t s = 0; s + len < n; ++s) {
      const std::size_t t = s + len;
      incomplete[s][t] = complete[s][t - 1] + common(s, t);
      double best = kNegInf;
      std::size_t best_r = s + 1;
      for (std::size_t r = s + 1; r <= t; ++r) {
        const double v = incomplete[s][r] + complete[r][t];
        if (v > best) {
          best = v;
          best_r = r;
        }
      }
      complete[s][t] = best;
      split[s][t] = best_r;
    }
  }

  std::set<Arc> arcs;
  // Explicit stack of complete spans to expand.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    auto [s, t] = stack.back();
    stack.pop_back();
    if (s == t) continue;
    const std::size_t r = split[s][t];
    arcs.insert(Arc{s + 1, r + 1});
    stack.emplace_back(s, r - 1);  // rest of s's span inside the incomplete item
    stack.emplace_back(r, t);
  }
  return DependencyStructure(n, std::move(arcs));
}

double tree_score(const ScoreMatrix& common, const DependencyStructure& tree) {
  double sum = 0.0;
  for (const Arc& a : tree.arcs()) sum += common(a.head - 1, a.dependent - 1);
  return sum;
}

}  // namespace dialstruct
