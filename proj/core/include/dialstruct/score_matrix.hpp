#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dialstruct {

// Strictly upper-triangular n x n matrix of pairwise utterance scores.
//
// Element access is 0-based like any dense matrix: entry (i, j) with i < j
// scores utterance i+1 against utterance j+1. Everything on or below the
// diagonal is a structural zero and is never part of the data.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  // All-zero matrix of dimension n.
  explicit ScoreMatrix(std::size_t n);

  // Validates that `dense` is square, finite and strictly upper triangular.
  explicit ScoreMatrix(Eigen::MatrixXd dense);

  // Keeps only the strictly upper part of `dense` (diagonal and below zeroed).
  static ScoreMatrix masked(const Eigen::MatrixXd& dense);

  // Builds from the n(n-1)/2 upper entries in row-major order.
  static ScoreMatrix from_upper(std::size_t n, std::span<const double> upper);

  // Matrix with every upper entry equal to `value`.
  static ScoreMatrix constant(std::size_t n, double value);

  std::size_t n() const { return static_cast<std::size_t>(dense_.rows()); }
  std::size_t upper_size() const { return n() * (n() - (n() > 0 ? 1 : 0)) / 2; }

  double operator()(std::size_t i, std::size_t j) const { return dense_(i, j); }
  const Eigen::MatrixXd& dense() const { return dense_; }

  // Returns a copy with entry (i, j), i < j, replaced.
  ScoreMatrix with(std::size_t i, std::size_t j, double value) const;

  friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
    return a.dense_.rows() == b.dense_.rows() && a.dense_ == b.dense_;
  }

 private:
  Eigen::MatrixXd dense_;
};

struct MatStats {
  double mean = 0.0;
  double std = 0.0;
};

// Row-major traversal of all (i, j) with i < j.
std::vector<double> upper_entries(const ScoreMatrix& m);

// Population mean and standard deviation over the strictly upper entries.
MatStats mat_stats(const ScoreMatrix& m);

// Strict-upper-triangularity check used by tests and debug assertions.
bool is_strictly_upper(const Eigen::MatrixXd& dense);

// Mask keeping i < j: 1.0 on the strict upper triangle, 0.0 elsewhere.
Eigen::MatrixXd upper_mask(std::size_t n);

}  // namespace dialstruct
