#include "dialstruct/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "dialstruct/error.hpp"

namespace dialstruct {

Segmentation::Segmentation(std::size_t n, std::set<std::size_t> boundaries)
    : n_(n), boundaries_(std::move(boundaries)) {
  for (std::size_t g : boundaries_) {
    if (g < 1 || g + 1 > n_) throw IndexOutOfRange(g, n_ > 0 ? n_ - 1 : 0);
  }
}

std::size_t Segmentation::segment_of(std::size_t u) const {
  // Boundaries strictly before u, i.e. gaps g < u.
  return static_cast<std::size_t>(std::distance(boundaries_.begin(), boundaries_.lower_bound(u)));
}

bool arcs_cross(const Arc& x, const Arc& y) {
  const auto [a, b] = std::minmax(x.head, x.dependent);
  const auto [c, d] = std::minmax(y.head, y.dependent);
  return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

std::optional<std::string> validate_tree(std::size_t n, const std::set<Arc>& arcs) {
  if (n < 2) return "tree needs at least two utterances";
  if (arcs.size() != n - 1) return "expected " + std::to_string(n - 1) + " arcs";
  std::vector<int> seen(n + 1, 0);
  for (const Arc& a : arcs) {
    if (a.head < 1 || a.dependent > n) return "arc index out of range";
    if (!a.rightward()) return "arc is not rightward";
    if (a.dependent == 1) return "utterance 1 must be the root";
    if (++seen[a.dependent] > 1) return "utterance " + std::to_string(a.dependent) + " has two heads";
  }
  for (std::size_t d = 2; d <= n; ++d)
    if (seen[d] != 1) return "utterance " + std::to_string(d) + " has no head";
  for (auto it = arcs.begin(); it != arcs.end(); ++it)
    for (auto jt = std::next(it); jt != arcs.end(); ++jt)
      if (arcs_cross(*it, *jt)) return "arcs cross";
  return std::nullopt;
}

DependencyStructure::DependencyStructure(std::size_t n, std::set<Arc> arcs)
    : n_(n), arcs_(std::move(arcs)) {
  if (auto reason = validate_tree(n_, arcs_)) throw InvalidArgument("invalid tree: " + *reason);
}

std::vector<std::size_t> DependencyStructure::heads() const {
  std::vector<std::size_t> out(n_ + 1, 0);
  for (const Arc& a : arcs_) out[a.dependent] = a.head;
  return out;
}

std::set<Arc> Dialogue::gold_arc_set() const {
  std::set<Arc> out;
  if (gold_arcs)
    for (const auto& la : *gold_arcs) out.insert(la.arc);
  return out;
}

void validate_dialogue(const Dialogue& d) {
  const std::size_t n = d.n();
  for (std::size_t i = 0; i < n; ++i) {
    const Utterance& u = d.utterances[i];
    if (u.index != i + 1) {
      throw InvalidArgument("dialogue " + d.id + ": utterance indices must be contiguous from 1");
    }
    const bool blank = std::all_of(u.text.begin(), u.text.end(),
                                   [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) throw InvalidArgument("dialogue " + d.id + ": utterance " + std::to_string(u.index) + " is empty");
  }
  if (d.gold_arcs) {
    for (const auto& la : *d.gold_arcs) {
      if (la.arc.head < 1 || la.arc.head > n) throw IndexOutOfRange(la.arc.head, n);
      if (la.arc.dependent < 1 || la.arc.dependent > n) throw IndexOutOfRange(la.arc.dependent, n);
    }
  }
  if (d.gold_boundaries && d.gold_boundaries->n() != n) {
    throw DimensionMismatch(n, d.gold_boundaries->n());
  }
}

ModelParams ModelParams::zeros(std::size_t n_max, WeightMode mode) {
  ModelParams p;
  p.n_max = n_max;
  p.mode = mode;
  const std::size_t len = mode == WeightMode::scalar ? 1 : n_max;
  p.w_col.assign(len, 0.0);
  p.w_row.assign(len, 0.0);
  p.w_left = Eigen::MatrixXd::Zero(n_max, n_max);
  p.w_right = Eigen::MatrixXd::Zero(n_max, n_max);
  return p;
}

ModelParams ModelParams::identity(std::size_t n_max, WeightMode mode) {
  ModelParams p = zeros(n_max, mode);
  p.w_left.setIdentity();
  p.w_right.setIdentity();
  return p;
}

bool ModelParams::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(w_col) && finite(w_row) && w_left.allFinite() && w_right.allFinite();
}

std::size_t ModelParams::parameter_count() const {
  return w_col.size() + w_row.size() + static_cast<std::size_t>(w_left.size() + w_right.size());
}

}  // namespace dialstruct
