#include "dialstruct/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "dialstruct/error.hpp"

namespace dialstruct {

ScoreMatrix cosine_matrix(const UtteranceEmbeddings& e, double epsilon) {
  const Eigen::MatrixXd& v = e.vectors;
  const auto n = static_cast<std::size_t>(v.rows());
  if (!v.allFinite()) throw InvalidArgument("embeddings for " + e.dialogue_id + " contain NaN/Inf");
  Eigen::VectorXd norms = v.rowwise().norm();
  for (std::size_t i = 0; i < n; ++i)
    if (norms(static_cast<Eigen::Index>(i)) < epsilon) throw ZeroNormVector(i + 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      double c = v.row(ii).dot(v.row(jj)) / (norms(ii) * norms(jj));
      c = std::clamp(c, -1.0, 1.0);
      out(ii, jj) = (c + 1.0) / 2.0;
    }
  }
  return ScoreMatrix(std::move(out));
}

ScoreMatrix normalize(const ScoreMatrix& m, const ScorerConfig& cfg) {
  if (cfg.normalization == Normalization::none || m.n() < 2) return m;
  const auto entries = upper_entries(m);
  const auto [lo, hi] = std::minmax_element(entries.begin(), entries.end());
  const double range = *hi - *lo;
  if (range < cfg.epsilon) return ScoreMatrix::constant(m.n(), 0.5);
  Eigen::MatrixXd shifted = (m.dense().array() - *lo) / range;
  return ScoreMatrix::masked(shifted);
}

ScoreMatrix compose_boundary_scores(const ScoreMatrix& consistency, const ScoreMatrix& coherence,
                                    const ScorerConfig& cfg) {
  if (consistency.n() != coherence.n()) throw DimensionMismatch(consistency.n(), coherence.n());
  ScoreMatrix sum(Eigen::MatrixXd(consistency.dense() + coherence.dense()));
  // An all-zero sum carries no boundary signal; keep it zero instead of
  // letting the degenerate-range rule lift it to 0.5.
  if (sum.dense().cwiseAbs().maxCoeff() < cfg.epsilon) return sum;
  return normalize(sum, cfg);
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

using TermCounts = std::unordered_map<std::string, double>;

TermCounts term_counts(const std::string& text) {
  TermCounts tf;
  for (auto& t : tokenize(text)) tf[t] += 1.0;
  return tf;
}

double tf_cosine(const TermCounts& a, const TermCounts& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [term, count] : a) {
    na += count * count;
    if (auto it = b.find(term); it != b.end()) dot += count * it->second;
  }
  for (const auto& [term, count] : b) nb += count * count;
  return dot / std::sqrt(na * nb);
}

}  // namespace

ScoreMatrix lexical_scores(const Dialogue& d, LexicalKind kind) {
  const std::size_t n = d.n();
  std::vector<TermCounts> bags;
  bags.reserve(n);
  for (const auto& u : d.utterances) bags.push_back(term_counts(u.text));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (bags[i].empty()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (bags[j].empty()) continue;
      double s = (tf_cosine(bags[i], bags[j]) + 1.0) / 2.0;
      if (kind == LexicalKind::rhetorical) s /= static_cast<double>(j - i);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  }
  return ScoreMatrix(std::move(out));
}

MatrixPair LexicalSource::raw_scores(const Dialogue& d) const {
  return {lexical_scores(d, LexicalKind::topic), lexical_scores(d, LexicalKind::rhetorical)};
}

EmbeddingSource::EmbeddingSource(std::vector<UtteranceEmbeddings> embeddings, ScorerConfig cfg)
    : cfg_(cfg) {
  for (auto& e : embeddings) {
    auto key = std::make_pair(e.dialogue_id, e.kind);
    channels_.insert_or_assign(std::move(key), std::move(e));
  }
}

const UtteranceEmbeddings* EmbeddingSource::find(const std::string& id, EmbeddingKind kind) const {
  auto it = channels_.find({id, kind});
  return it == channels_.end() ? nullptr : &it->second;
}

MatrixPair EmbeddingSource::raw_scores(const Dialogue& d) const {
  const auto* rhe = find(d.id, EmbeddingKind::rhetorical);
  const auto* consistency = find(d.id, EmbeddingKind::topic_consistency);
  if (rhe == nullptr || consistency == nullptr) {
    throw InvalidArgument("no rhetorical/topic_consistency embeddings for dialogue " + d.id);
  }
  auto checked = [&](const UtteranceEmbeddings& e) {
    const auto rows = static_cast<std::size_t>(e.vectors.rows());
    if (rows != d.n()) throw DimensionMismatch(d.n(), rows);
    return cosine_matrix(e, cfg_.epsilon);
  };
  ScoreMatrix rhetorical = checked(*rhe);
  ScoreMatrix topic_consistency = checked(*consistency);
  ScoreMatrix coherence(d.n());
  if (const auto* coh = find(d.id, EmbeddingKind::topic_coherence)) coherence = checked(*coh);
  return {compose_boundary_scores(topic_consistency, coherence, cfg_), std::move(rhetorical)};
}

MatrixSource::MatrixSource(std::map<std::string, ScoreMatrix> topic,
                           std::map<std::string, ScoreMatrix> rhetorical)
    : topic_(std::move(topic)), rhetorical_(std::move(rhetorical)) {}

MatrixPair MatrixSource::raw_scores(const Dialogue& d) const {
  auto t = topic_.find(d.id);
  auto r = rhetorical_.find(d.id);
  if (t == topic_.end() || r == rhetorical_.end()) {
    throw InvalidArgument("no topic/rhetorical matrix for dialogue " + d.id);
  }
  if (t->second.n() != d.n()) throw DimensionMismatch(d.n(), t->second.n());
  if (r->second.n() != d.n()) throw DimensionMismatch(d.n(), r->second.n());
  return {t->second, r->second};
}

MatrixPair score_dialogue(const ScoreSource& source, const Dialogue& d, const ScorerConfig& cfg) {
  MatrixPair raw = source.raw_scores(d);
  return {normalize(raw.topic, cfg), normalize(raw.rhetorical, cfg)};
}

std::string to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::rhetorical: return "rhetorical";
    case EmbeddingKind::topic_consistency: return "topic_consistency";
    case EmbeddingKind::topic_coherence: return "topic_coherence";
  }
  return "?";
}

EmbeddingKind embedding_kind_from_string(const std::string& s) {
  if (s == "rhetorical") return EmbeddingKind::rhetorical;
  if (s == "topic_consistency") return EmbeddingKind::topic_consistency;
  if (s == "topic_coherence") return EmbeddingKind::topic_coherence;
  throw InvalidArgument("unknown embedding kind '" + s + "'");
}

std::string to_string(ScoreSourceKind kind) {
  switch (kind) {
    case ScoreSourceKind::matrix_file: return "matrix_file";
    case ScoreSourceKind::embedding_file: return "embedding_file";
    case ScoreSourceKind::lexical: return "lexical";
  }
  return "?";
}

ScoreSourceKind score_source_from_string(const std::string& s) {
  if (s == "matrix_file") return ScoreSourceKind::matrix_file;
  if (s == "embedding_file") return ScoreSourceKind::embedding_file;
  if (s == "lexical") return ScoreSourceKind::lexical;
  throw InvalidArgument("unknown score source '" + s + "'");
}

std::string to_string(Normalization kind) {
  return kind == Normalization::minmax ? "minmax" : "none";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "minmax") return Normalization::minmax;
  if (s == "none") return Normalization::none;
  throw InvalidArgument("unknown normalization '" + s + "'");
}

}  // namespace dialstruct
