#include "dialstruct/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dialstruct/error.hpp"

namespace dialstruct {

namespace {

void check_pair(const Segmentation& gold, const Segmentation& pred, std::size_t k) {
  if (gold.n() != pred.n()) throw DimensionMismatch(gold.n(), pred.n());
  if (k == 0) throw InvalidArgument("segmentation window must be positive");
  if (k >= gold.n()) throw WindowTooLarge(k, gold.n());
}

std::size_t boundaries_between(const Segmentation& s, std::size_t i, std::size_t k) {
  // Gaps g with i <= g < i + k.
  const auto& b = s.boundaries();
  return static_cast<std::size_t>(std::distance(b.lower_bound(i), b.lower_bound(i + k)));
}

}  // namespace

std::size_t resolve_window(const Segmentation& gold, const SegEvalConfig& cfg) {
  if (cfg.k) return *cfg.k;
  const double n = static_cast<double>(gold.n());
  const double segments = static_cast<double>(gold.segment_count());
  auto k = static_cast<std::size_t>(std::llround(n / (2.0 * segments)));
  k = std::max<std::size_t>(2, k);
  if (gold.n() >= 2) k = std::min(k, gold.n() - 1);
  return k;
}

double pk(const Segmentation& gold, const Segmentation& pred, const SegEvalConfig& cfg) {
  const std::size_t k = resolve_window(gold, cfg);
  check_pair(gold, pred, k);
  const std::size_t positions = gold.n() - k;
  std::size_t disagree = 0;
  for (std::size_t i = 1; i <= positions; ++i) {
    const bool same_gold = boundaries_between(gold, i, k) == 0;
    const bool same_pred = boundaries_between(pred, i, k) == 0;
    if (same_gold != same_pred) ++disagree;
  }
  return static_cast<double>(disagree) / static_cast<double>(positions);
}

double window_diff(const Segmentation& gold, const Segmentation& pred, const SegEvalConfig& cfg) {
  const std::size_t k = resolve_window(gold, cfg);
  check_pair(gold, pred, k);
  const std::size_t positions = gold.n() - k;
  std::size_t differ = 0;
  for (std::size_t i = 1; i <= positions; ++i)
    if (boundaries_between(gold, i, k) != boundaries_between(pred, i, k)) ++differ;
  return static_cast<double>(differ) / static_cast<double>(positions);
}

PRF ArcCounts::prf() const {
  PRF out;
  if (predicted > 0) out.precision = static_cast<double>(matched) / static_cast<double>(predicted);
  if (gold > 0) out.recall = static_cast<double>(matched) / static_cast<double>(gold);
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

ArcCounts arc_counts(const std::set<Arc>& gold, const std::set<Arc>& pred) {
  ArcCounts c;
  c.gold = gold.size();
  c.predicted = pred.size();
  for (const Arc& a : pred)
    if (gold.contains(a)) ++c.matched;
  return c;
}

PRF arc_f1(const std::set<Arc>& gold, const std::set<Arc>& pred) {
  return arc_counts(gold, pred).prf();
}

double local_rhetorical_intensity(const ScoreMatrix& a_top_rhe) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a_top_rhe.n(); ++i)
    for (std::size_t j = i + 1; j < a_top_rhe.n(); ++j)
      sum += a_top_rhe(i, j) / static_cast<double>(j - i);
  return sum;
}

std::vector<double> rescale_intensities(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / range;
  return out;
}

}  // namespace dialstruct
