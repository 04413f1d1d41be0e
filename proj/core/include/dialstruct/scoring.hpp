#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

enum class EmbeddingKind { rhetorical, topic_consistency, topic_coherence };

struct UtteranceEmbeddings {
  std::string dialogue_id;
  EmbeddingKind kind = EmbeddingKind::rhetorical;
  Eigen::MatrixXd vectors;  // n rows, d columns
};

enum class ScoreSourceKind { matrix_file, embedding_file, lexical };
enum class Normalization { minmax, none };

struct ScorerConfig {
  ScoreSourceKind source = ScoreSourceKind::lexical;
  Normalization normalization = Normalization::minmax;
  double epsilon = 1e-9;
};

// The two structure matrices mutual learning starts from.
struct MatrixPair {
  ScoreMatrix topic;
  ScoreMatrix rhetorical;
};

enum class LexicalKind { rhetorical, topic };

// Cosine similarity of every pair of rows, mapped from [-1, 1] to [0, 1].
ScoreMatrix cosine_matrix(const UtteranceEmbeddings& e, double epsilon = 1e-9);

// Consistency + coherence, renormalized under `cfg`.
ScoreMatrix compose_boundary_scores(const ScoreMatrix& consistency, const ScoreMatrix& coherence,
                                    const ScorerConfig& cfg);

// Min-max over upper entries; a range below epsilon yields the constant 0.5
// matrix. Normalization::none returns the input unchanged.
ScoreMatrix normalize(const ScoreMatrix& m, const ScorerConfig& cfg);

// Lowercased alphanumeric tokens; bytes >= 0x80 are kept as word characters.
std::vector<std::string> tokenize(const std::string& text);

// Term-frequency cosine between utterances mapped to [0, 1]. The rhetorical
// kind multiplies by 1/(j-i). Utterances without tokens score 0.
ScoreMatrix lexical_scores(const Dialogue& d, LexicalKind kind);

// Pluggable producer of the initial matrices for a dialogue. Implementations
// return raw (unnormalized) matrices; score_dialogue applies normalization.
class ScoreSource {
 public:
  virtual ~ScoreSource() = default;
  virtual MatrixPair raw_scores(const Dialogue& d) const = 0;
};

class LexicalSource final : public ScoreSource {
 public:
  MatrixPair raw_scores(const Dialogue& d) const override;
};

// Embedding channels keyed by dialogue id. Rhetorical scores are the cosine
// matrix of the rhetorical channel; topic scores are the boundary composition
// of the consistency and (optional, default zero) coherence channels.
class EmbeddingSource final : public ScoreSource {
 public:
  explicit EmbeddingSource(std::vector<UtteranceEmbeddings> embeddings, ScorerConfig cfg = {});
  MatrixPair raw_scores(const Dialogue& d) const override;

 private:
  const UtteranceEmbeddings* find(const std::string& id, EmbeddingKind kind) const;

  std::map<std::pair<std::string, EmbeddingKind>, UtteranceEmbeddings> channels_;
  ScorerConfig cfg_;
};

// Precomputed matrices keyed by dialogue id.
class MatrixSource final : public ScoreSource {
 public:
  MatrixSource(std::map<std::string, ScoreMatrix> topic, std::map<std::string, ScoreMatrix> rhetorical);
  MatrixPair raw_scores(const Dialogue& d) const override;

 private:
  std::map<std::string, ScoreMatrix> topic_;
  std::map<std::string, ScoreMatrix> rhetorical_;
};

// Raw scores from `source`, both matrices normalized under `cfg`.
MatrixPair score_dialogue(const ScoreSource& source, const Dialogue& d, const ScorerConfig& cfg);

std::string to_string(EmbeddingKind kind);
EmbeddingKind embedding_kind_from_string(const std::string& s);
std::string to_string(ScoreSourceKind kind);
ScoreSourceKind score_source_from_string(const std::string& s);
std::string to_string(Normalization kind);
Normalization normalization_from_string(const std::string& s);

}  // namespace dialstruct
