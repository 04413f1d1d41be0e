#include "dialstruct/mutual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dialstruct/error.hpp"
#include "dialstruct/parallel.hpp"

namespace dialstruct {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

void check_same_n(const ScoreMatrix& a, const ScoreMatrix& b) {
  if (a.n() != b.n()) throw DimensionMismatch(a.n(), b.n());
}

void check_fits(std::size_t n, const ModelParams& p) {
  if (n > p.n_max) throw DialogueTooLong(n, p.n_max);
}

double upper_count(std::size_t n) { return static_cast<double>(n * (n - 1) / 2); }

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments upper_moments(const MatrixXd& x) {
  const auto s = mat_stats(ScoreMatrix(MatrixXd(x)));
  return {s.mean, s.std};
}

// Gradient of -lambda1*std(x) - lambda2/mean(x) with respect to each upper entry.
MatrixXd penalty_grad(const MatrixXd& x, const Moments& mom, const MatrixXd& mask, double m,
                      double lambda1, double lambda2) {
  MatrixXd g = MatrixXd::Zero(x.rows(), x.cols());
  if (mom.std > 0.0) g -= lambda1 * ((x.array() - mom.mean) / (m * mom.std)).matrix();
  if (lambda2 != 0.0) g.array() += lambda2 / (mom.mean * mom.mean * m);
  return g.cwiseProduct(mask);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw InvalidArgument("penalty coefficients must be non-negative");
  if (max_epochs == 0) throw InvalidArgument("max_epochs must be positive");
  if (patience == 0 || patience > max_epochs) throw InvalidArgument("patience must be in [1, max_epochs]");
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  if (max_train_turns < 2 || max_train_turns > n_max) {
    throw InvalidArgument("max_train_turns must be in [2, n_max]");
  }
  if (!(degenerate_epsilon > 0.0)) throw InvalidArgument("degenerate_epsilon must be positive");
}

ScoreMatrix local_flow(const ScoreMatrix& a_top, const ModelParams& p) {
  const std::size_t n = a_top.n();
  check_fits(n, p);
  const MatrixXd& a = a_top.dense();
  MatrixXd out = MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double col = 0.0;
      for (std::size_t k = i; k < n; ++k) col += p.col_weight(k) * a(Index(k), Index(j));
      double row = 0.0;
      for (std::size_t k = 0; k <= j; ++k) row += a(Index(i), Index(k)) * p.row_weight(k);
      out(Index(i), Index(j)) = col + row;
    }
  }
  return ScoreMatrix(std::move(out));
}

ScoreMatrix local_rhetorical(const ScoreMatrix& w_re, const ScoreMatrix& a_rhe) {
  check_same_n(w_re, a_rhe);
  return ScoreMatrix(MatrixXd(w_re.dense().cwiseProduct(a_rhe.dense())));
}

ScoreMatrix rhetoric_enhanced_topic(const ScoreMatrix& w_r, const ScoreMatrix& a_top) {
  check_same_n(w_r, a_top);
  return ScoreMatrix::masked(w_r.dense() * a_top.dense());
}

ScoreMatrix topic_assisted_rhetorical(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe,
                                      const ModelParams& p) {
  check_same_n(a_top, a_rhe);
  const std::size_t n = a_top.n();
  check_fits(n, p);
  const auto nn = Index(n);
  MatrixXd transformed =
      p.w_left.topLeftCorner(nn, nn) * a_top.dense() * p.w_right.topLeftCorner(nn, nn);
  MatrixXd upper = transformed.triangularView<Eigen::StrictlyUpper>();
  return ScoreMatrix(MatrixXd(upper + a_rhe.dense()));
}

FusedPair fuse(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe, const ModelParams& p) {
  ScoreMatrix w_r = local_rhetorical(local_flow(a_top, p), a_rhe);
  return {rhetoric_enhanced_topic(w_r, a_top), topic_assisted_rhetorical(a_top, a_rhe, p)};
}

Penalties penalties(const FusedPair& f, double epsilon) {
  check_same_n(f.top_rhe, f.rhe_top);
  const auto t = mat_stats(f.top_rhe);
  const auto r = mat_stats(f.rhe_top);
  if (t.mean <= epsilon) throw DegenerateMean(t.mean);
  if (r.mean <= epsilon) throw DegenerateMean(r.mean);
  return {t.std + r.std, 1.0 / t.mean + 1.0 / r.mean};
}

double upper_mse(const ScoreMatrix& a, const ScoreMatrix& b) {
  check_same_n(a, b);
  if (a.n() < 2) return 0.0;
  return (a.dense() - b.dense()).squaredNorm() / upper_count(a.n());
}

double loss(const FusedPair& f, const TrainConfig& cfg) {
  const double mse = upper_mse(f.top_rhe, f.rhe_top);
  // The mean guard protects the reciprocal penalty; without it the loss is
  // defined everywhere.
  if (cfg.lambda2 == 0.0) return mse - cfg.lambda1 * (mat_stats(f.top_rhe).std + mat_stats(f.rhe_top).std);
  const Penalties pen = penalties(f, cfg.degenerate_epsilon);
  return mse - cfg.lambda1 * pen.p1 - cfg.lambda2 * pen.p2;
}

LossGrad gradients(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe, const ModelParams& p,
                   const TrainConfig& cfg) {
  check_same_n(a_top, a_rhe);
  const std::size_t n = a_top.n();
  if (n < 2) throw InvalidArgument("gradients need n >= 2");
  check_fits(n, p);
  const auto nn = Index(n);
  const MatrixXd& a = a_top.dense();
  const MatrixXd& b = a_rhe.dense();
  const MatrixXd mask = upper_mask(n);
  const double m = upper_count(n);

  // Forward.
  const MatrixXd w_re = local_flow(a_top, p).dense();
  const MatrixXd w_r = w_re.cwiseProduct(b);
  const MatrixXd top_rhe = w_r * a;  // strictly upper by construction
  const auto wl = p.w_left.topLeftCorner(nn, nn);
  const auto wr = p.w_right.topLeftCorner(nn, nn);
  const MatrixXd left_a = wl * a;
  const MatrixXd a_right = a * wr;
  const MatrixXd rhe_top = (left_a * wr).cwiseProduct(mask) + b;

  const Moments mt = upper_moments(top_rhe);
  const Moments mr = upper_moments(rhe_top);
  if (cfg.lambda2 != 0.0) {
    if (mt.mean <= cfg.degenerate_epsilon) throw DegenerateMean(mt.mean);
    if (mr.mean <= cfg.degenerate_epsilon) throw DegenerateMean(mr.mean);
  }

  const MatrixXd diff = top_rhe - rhe_top;
  LossGrad out;
  out.loss = diff.squaredNorm() / m - cfg.lambda1 * (mt.std + mr.std);
  if (cfg.lambda2 != 0.0) out.loss -= cfg.lambda2 * (1.0 / mt.mean + 1.0 / mr.mean);

  // Backward: dL/d(top_rhe) and dL/d(rhe_top) on the upper triangle.
  const MatrixXd g_top = (2.0 / m) * diff + penalty_grad(top_rhe, mt, mask, m, cfg.lambda1, cfg.lambda2);
  const MatrixXd g_rhe = (-2.0 / m) * diff + penalty_grad(rhe_top, mr, mask, m, cfg.lambda1, cfg.lambda2);

  ParamGrads& g = out.grads;
  g.w_left = MatrixXd::Zero(Index(p.n_max), Index(p.n_max));
  g.w_right = MatrixXd::Zero(Index(p.n_max), Index(p.n_max));
  g.w_left.topLeftCorner(nn, nn) = g_rhe * a_right.transpose();
  g.w_right.topLeftCorner(nn, nn) = left_a.transpose() * g_rhe;

  // top_rhe = W^R A, and only the upper entries of W^R depend on parameters.
  const MatrixXd g_wr = (g_top * a.transpose()).cwiseProduct(mask);
  const MatrixXd g_wre = g_wr.cwiseProduct(b);

  g.w_col.assign(p.w_col.size(), 0.0);
  g.w_row.assign(p.w_row.size(), 0.0);
  const bool scalar = p.mode == WeightMode::scalar;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gij = g_wre(Index(i), Index(j));
      if (gij == 0.0) continue;
      for (std::size_t k = i; k < n; ++k) g.w_col[scalar ? 0 : k] += gij * a(Index(k), Index(j));
      for (std::size_t k = 0; k <= j; ++k) g.w_row[scalar ? 0 : k] += gij * a(Index(i), Index(k));
    }
  }
  return out;
}

ScoreMatrix common_matrix(const FusedPair& f) {
  check_same_n(f.top_rhe, f.rhe_top);
  ScoreMatrix mean(MatrixXd(0.5 * (f.top_rhe.dense() + f.rhe_top.dense())));
  return normalize(mean, ScorerConfig{});
}

ScoreMatrix simple_incorporation(const ScoreMatrix& a_top, const ScoreMatrix& a_rhe) {
  check_same_n(a_top, a_rhe);
  return normalize(ScoreMatrix(MatrixXd(a_top.dense() + a_rhe.dense())), ScorerConfig{});
}

ModelParams init_params(const TrainConfig& cfg) {
  ModelParams p = ModelParams::identity(cfg.n_max, cfg.weight_mode);
  std::fill(p.w_col.begin(), p.w_col.end(), 1.0);
  std::fill(p.w_row.begin(), p.w_row.end(), 1.0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> noise(-cfg.init_noise, cfg.init_noise);
  for (Eigen::MatrixXd* w : {&p.w_left, &p.w_right})
    for (Index r = 0; r < w->rows(); ++r)
      for (Index c = 0; c < w->cols(); ++c) (*w)(r, c) += noise(rng);
  return p;
}

Adam::Adam(const ModelParams& shape, double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (ParamGrads* s : {&m_, &v_}) {
    s->w_col.assign(shape.w_col.size(), 0.0);
    s->w_row.assign(shape.w_row.size(), 0.0);
    s->w_left = MatrixXd::Zero(shape.w_left.rows(), shape.w_left.cols());
    s->w_right = MatrixXd::Zero(shape.w_right.rows(), shape.w_right.cols());
  }
}

void Adam::update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                  std::span<double> v) const {
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
    v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
    param[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
  }
}

void Adam::step(ModelParams& p, const ParamGrads& g) {
  ++t_;
  auto span_of = [](auto& x) { return std::span(x.data(), static_cast<std::size_t>(x.size())); };
  update(span_of(p.w_col), span_of(g.w_col), span_of(m_.w_col), span_of(v_.w_col));
  update(span_of(p.w_row), span_of(g.w_row), span_of(m_.w_row), span_of(v_.w_row));
  update(span_of(p.w_left), span_of(g.w_left), span_of(m_.w_left), span_of(v_.w_left));
  update(span_of(p.w_right), span_of(g.w_right), span_of(m_.w_right), span_of(v_.w_right));
}

double mean_loss(std::span<const MatrixPair> pairs, const ModelParams& p, const TrainConfig& cfg,
                 std::size_t* skipped) {
  std::vector<double> losses(pairs.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t i) {
    try {
      losses[i] = loss(fuse(pairs[i].topic, pairs[i].rhetorical, p), cfg);
    } catch (const DegenerateMean&) {
    }
  });
  double sum = 0.0;
  std::size_t used = 0;
  for (double l : losses) {
    if (std::isnan(l)) continue;
    sum += l;
    ++used;
  }
  if (skipped != nullptr) *skipped = pairs.size() - used;
  return used == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(used);
}

TrainResult train(std::vector<MatrixPair> train_set, std::vector<MatrixPair> validation,
                  const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  auto usable = [&](const MatrixPair& mp) {
    if (mp.topic.n() != mp.rhetorical.n() || mp.topic.n() < 2) return false;
    if (mp.topic.n() > cfg.n_max) {
      ++result.skipped_too_long;
      return false;
    }
    return true;
  };
  std::erase_if(train_set, [&](const MatrixPair& mp) { return !usable(mp); });
  std::erase_if(validation, [&](const MatrixPair& mp) { return !usable(mp); });
  if (train_set.empty()) throw EmptyCorpus();

  if (validation.empty() && train_set.size() >= 2) {
    const std::size_t held = std::max<std::size_t>(1, train_set.size() / 10);
    validation.assign(std::make_move_iterator(train_set.end() - static_cast<std::ptrdiff_t>(held)),
                      std::make_move_iterator(train_set.end()));
    train_set.resize(train_set.size() - held);
  }
  // A single dialogue is its own validation set.
  const std::span<const MatrixPair> val_view =
      validation.empty() ? std::span<const MatrixPair>(train_set) : std::span<const MatrixPair>(validation);
  result.validation_size = val_view.size();

  ModelParams params = init_params(cfg);
  Adam adam(params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best = std::numeric_limits<double>::infinity();
  result.params = params;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    double sum = 0.0;
    for (std::size_t idx : order) {
      const MatrixPair& mp = train_set[idx];
      try {
        LossGrad lg = gradients(mp.topic, mp.rhetorical, params, cfg);
        adam.step(params, lg.grads);
        sum += lg.loss;
        ++rec.steps;
      } catch (const DegenerateMean&) {
        ++rec.skipped_degenerate;
      }
    }
    rec.train_loss = rec.steps == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : sum / static_cast<double>(rec.steps);
    rec.validation_loss = mean_loss(val_view, params, cfg);
    result.history.push_back(rec);

    if (rec.validation_loss < best) {
      best = rec.validation_loss;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

TrainResult train(const std::vector<Dialogue>& corpus, const std::vector<Dialogue>& validation,
                  const ScoreSource& source, const ScorerConfig& scorer, const TrainConfig& cfg) {
  if (corpus.empty()) throw EmptyCorpus();
  auto score_all = [&](const std::vector<Dialogue>& ds) {
    std::vector<MatrixPair> out;
    out.reserve(ds.size());
    for (const auto& d : ds)
      if (d.n() >= 2) out.push_back(score_dialogue(source, d, scorer));
    return out;
  };
  return train(score_all(corpus), score_all(validation), cfg);
}

}  // namespace dialstruct
