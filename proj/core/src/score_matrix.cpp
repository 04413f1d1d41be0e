#include "dialstruct/score_matrix.hpp"

#include <cmath>
#include <string>

#include "dialstruct/error.hpp"

namespace dialstruct {

ScoreMatrix::ScoreMatrix(std::size_t n) : dense_(Eigen::MatrixXd::Zero(n, n)) {}

ScoreMatrix::ScoreMatrix(Eigen::MatrixXd dense) : dense_(std::move(dense)) {
  if (dense_.rows() != dense_.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(dense_.rows()),
                            static_cast<std::size_t>(dense_.cols()));
  }
  if (!dense_.allFinite()) throw InvalidArgument("score matrix has non-finite entries");
  if (!is_strictly_upper(dense_)) {
    throw InvalidArgument("score matrix is not strictly upper triangular");
  }
}

ScoreMatrix ScoreMatrix::masked(const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(dense.rows()),
                            static_cast<std::size_t>(dense.cols()));
  }
  Eigen::MatrixXd upper = dense.triangularView<Eigen::StrictlyUpper>();
  return ScoreMatrix(std::move(upper));
}

ScoreMatrix ScoreMatrix::from_upper(std::size_t n, std::span<const double> upper) {
  const std::size_t expected = n * (n > 0 ? n - 1 : 0) / 2;
  if (upper.size() != expected) throw DimensionMismatch(expected, upper.size());
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dense(i, j) = upper[pos++];
  return ScoreMatrix(std::move(dense));
}

ScoreMatrix ScoreMatrix::constant(std::size_t n, double value) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Constant(n, n, value);
  return masked(dense);
}

ScoreMatrix ScoreMatrix::with(std::size_t i, std::size_t j, double value) const {
  if (i >= j || j >= n()) throw InvalidArgument("entry (" + std::to_string(i) + ", " +
                                                std::to_string(j) + ") is not strictly upper");
  ScoreMatrix out = *this;
  out.dense_(i, j) = value;
  if (!std::isfinite(value)) throw InvalidArgument("score matrix has non-finite entries");
  return out;
}

std::vector<double> upper_entries(const ScoreMatrix& m) {
  std::vector<double> out;
  out.reserve(m.upper_size());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i + 1; j < m.n(); ++j) out.push_back(m(i, j));
  return out;
}

MatStats mat_stats(const ScoreMatrix& m) {
  const auto entries = upper_entries(m);
  if (entries.empty()) return {};
  double sum = 0.0;
  for (double v : entries) sum += v;
  const double mean = sum / static_cast<double>(entries.size());
  double sq = 0.0;
  for (double v : entries) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(entries.size()))};
}

bool is_strictly_upper(const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols()) return false;
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (dense(i, j) != 0.0) return false;
  return true;
}

Eigen::MatrixXd upper_mask(std::size_t n) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  return ones.triangularView<Eigen::StrictlyUpper>();
}

}  // namespace dialstruct
