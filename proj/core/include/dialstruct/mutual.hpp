#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/scoring.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

// A^{top_rhe} (rhetoric-enhanced topic) and A^{rhe_top} (topic-assisted rhetorical).
struct FusedPair {
  ScoreMatrix top_rhe;
  ScoreMatrix rhe_top;
};

struct TrainConfig {
  double learning_rate = 3e-6;
  double lambda1 = 1e-3;
  double lambda2 = 1e-3;
  std::size_t max_epochs = 20;
  std::size_t patience = 3;
  std::uint64_t seed = 42;
  std::size_t n_max = 24;
  std::size_t max_train_turns = 18;
  WeightMode weight_mode = WeightMode::scalar;
  // Fused matrices whose upper mean falls to or below this skip the step.
  double degenerate_epsilon = 1e-6;
  // Half-width of the uniform noise added to the identity W_left / W_right.
  double init_noise = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Worker threads for validation loss evaluation; updates stay sequential.
  std::size_t workers = 1;

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct ParamGrads {
  std::vector<double> w_col;
  std::vector<double> w_row;
  Eigen::MatrixXd w_left;
  Eigen::MatrixXd w_right;
};

struct Penalties {
  double p1 = 0.0;  // std(top_rhe) + std(rhe_top)
  double p2 = 0.0;  // 1/mean(top_rhe) + 1/mean(rhe_top)
};

struct LossGrad {
  double loss = 0.0;
  ParamGrads grads;
};

// Topic information flow W^re: for i < j,
//   W^re_ij = sum_{k >= i} c_k A_kj + sum_{k <= j} A_ik r_k
// with c, r the column/row weights (a single shared scalar in scalar mode).
ScoreMatrix local_flow(const ScoreMatrix& a_top, const ModelParams& p);

// W^R = W^re (elementwise) A^rhe.
ScoreMatrix local_rhetorical(const ScoreMatrix& w_re, const ScoreMatrix& a_rhe);

// A^{top_rhe} = W^R A^top. A product of strictly upper matrices, so its
// superdiagonal is identically zero.
ScoreMatrix rhetoric_enhanced_topic(const ScoreMatrix& w_r, const ScoreMatrix& a_top);

// A^{rhe_top} = strict_upper(W_left[n] A^top W_right[n]) + A^rhe.
ScoreMatrix topic_assisted_rhetorical(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe,
                                      const ModelParams& p);

FusedPair fuse(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe, const ModelParams& p);

// Throws DegenerateMean when either matrix mean is <= epsilon.
Penalties penalties(const FusedPair& f, double epsilon = 1e-6);

// Mean squared difference over the strict upper triangle.
double upper_mse(const ScoreMatrix& a, const ScoreMatrix& b);

// MSE(top_rhe, rhe_top) - lambda1 * P1 - lambda2 * P2. Throws DegenerateMean
// only when lambda2 > 0, since P2 is the only term that needs a positive mean.
double loss(const FusedPair& f, const TrainConfig& cfg);

// Loss and exact gradients for one dialogue. Gradient entries of W_left /
// W_right outside the leading n x n block are zero.
LossGrad gradients(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe, const ModelParams& p,
                   const TrainConfig& cfg);

// (top_rhe + rhe_top) / 2, min-max normalized.
ScoreMatrix common_matrix(const FusedPair& f);

// Baseline that adds the raw matrices: normalized A^top + A^rhe.
ScoreMatrix simple_incorporation(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe);

// w_col = w_row = 1; W_left, W_right = I + U(-init_noise, init_noise) from cfg.seed.
ModelParams init_params(const TrainConfig& cfg);

class Adam {
 public:
  Adam(const ModelParams& shape, double lr, double beta1, double beta2, double epsilon);
  void step(ModelParams& p, const ParamGrads& g);
  std::size_t steps() const { return t_; }

 private:
  void update(std::span<double> param, std::span<const double> grad, std::span<double> m,
              std::span<double> v) const;

  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  ParamGrads m_, v_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;      // mean pre-update loss over stepped dialogues
  double validation_loss = 0.0; // mean loss over validation dialogues
  std::size_t steps = 0;
  std::size_t skipped_degenerate = 0;
};

struct TrainResult {
  ModelParams params;  // best-validation parameters
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::size_t skipped_too_long = 0;
  std::size_t validation_size = 0;
  bool early_stopped = false;
};

// Trains on pre-scored matrix pairs. With an empty `validation`, the last
// 10% of `train_set` (at least one dialogue) is held out.
TrainResult train(std::vector<MatrixPair> train_set, std::vector<MatrixPair> validation,
                  const TrainConfig& cfg);

// Scores each dialogue with `source` and trains on the result.
TrainResult train(const std::vector<Dialogue>& corpus, const std::vector<Dialogue>& validation,
                  const ScoreSource& source, const ScorerConfig& scorer, const TrainConfig& cfg);

// Mean loss over pairs under fixed parameters; degenerate pairs are skipped
// and counted in `skipped` when provided.
double mean_loss(std::span<const MatrixPair> pairs, const ModelParams& p, const TrainConfig& cfg,
                 std::size_t* skipped = nullptr);

}  // namespace dialstruct
