#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dialstruct {

// Utterance and structure indices in this header are 1-based.

struct Utterance {
  std::size_t index = 0;
  std::string speaker;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

// Unlabeled link head -> dependent. Predicted arcs are always rightward
// (head < dependent); gold arcs loaded from corpora may point left.
struct Arc {
  std::size_t head = 0;
  std::size_t dependent = 0;

  bool rightward() const { return head < dependent; }
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Gold arcs keep their relation label for round-tripping; metrics ignore it.
struct LabeledArc {
  Arc arc;
  std::string relation;

  friend bool operator==(const LabeledArc&, const LabeledArc&) = default;
};

// Topic boundaries as gap indices: g means a boundary between utterance g and g+1.
class Segmentation {
 public:
  Segmentation() = default;
  // Throws IndexOutOfRange if a boundary falls outside [1, n-1].
  Segmentation(std::size_t n, std::set<std::size_t> boundaries);

  static Segmentation single_topic(std::size_t n) { return Segmentation(n, {}); }

  std::size_t n() const { return n_; }
  const std::set<std::size_t>& boundaries() const { return boundaries_; }
  std::size_t segment_count() const { return boundaries_.size() + 1; }

  // Segment ordinal (0-based) of utterance u (1-based).
  std::size_t segment_of(std::size_t u) const;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;

 private:
  std::size_t n_ = 0;
  std::set<std::size_t> boundaries_;
};

// Projective tree over utterances 1..n rooted at utterance 1 with rightward arcs.
class DependencyStructure {
 public:
  DependencyStructure() = default;
  // Validates every tree invariant; throws InvalidArgument on violation.
  DependencyStructure(std::size_t n, std::set<Arc> arcs);

  std::size_t n() const { return n_; }
  const std::set<Arc>& arcs() const { return arcs_; }
  // heads()[d] is the head of utterance d; heads()[0] and heads()[1] are 0.
  std::vector<std::size_t> heads() const;

  friend bool operator==(const DependencyStructure&, const DependencyStructure&) = default;

 private:
  std::size_t n_ = 0;
  std::set<Arc> arcs_;
};

// Reason the arc set fails the tree invariants, or nullopt when it is a valid
// rightward projective tree rooted at 1.
std::optional<std::string> validate_tree(std::size_t n, const std::set<Arc>& arcs);

// True when two arcs cross (a < c < b < d for spans (a,b), (c,d)).
bool arcs_cross(const Arc& x, const Arc& y);

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
  std::optional<std::vector<LabeledArc>> gold_arcs;
  std::optional<Segmentation> gold_boundaries;

  std::size_t n() const { return utterances.size(); }
  std::set<Arc> gold_arc_set() const;

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

// Validates index contiguity, non-empty text and gold index ranges.
void validate_dialogue(const Dialogue& d);

enum class WeightMode { scalar, vector };

// Learnable weights of the two aggregators.
//
// w_col / w_row hold one entry in scalar mode and n_max entries (indexed by
// the summation variable) in vector mode. w_left / w_right are n_max x n_max
// and get sliced to the leading n x n block for a dialogue of length n.
struct ModelParams {
  std::size_t n_max = 0;
  WeightMode mode = WeightMode::scalar;
  std::vector<double> w_col;
  std::vector<double> w_row;
  Eigen::MatrixXd w_left;
  Eigen::MatrixXd w_right;

  // Weight applied to summation index k (0-based).
  double col_weight(std::size_t k) const { return mode == WeightMode::scalar ? w_col[0] : w_col[k]; }
  double row_weight(std::size_t k) const { return mode == WeightMode::scalar ? w_row[0] : w_row[k]; }

  // All-zero parameters with correctly sized storage.
  static ModelParams zeros(std::size_t n_max, WeightMode mode = WeightMode::scalar);

  // W_left = W_right = I and zero flow weights: the topic-assisted matrix
  // reduces to A^top + A^rhe and the rhetoric-enhanced matrix vanishes.
  static ModelParams identity(std::size_t n_max, WeightMode mode = WeightMode::scalar);

  bool all_finite() const;
  std::size_t parameter_count() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.n_max == b.n_max && a.mode == b.mode && a.w_col == b.w_col && a.w_row == b.w_row &&
           a.w_left == b.w_left && a.w_right == b.w_right;
  }
};

}  // namespace dialstruct
