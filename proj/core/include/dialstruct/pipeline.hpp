#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dialstruct/corpus.hpp"
#include "dialstruct/decode.hpp"
#include "dialstruct/formats.hpp"
#include "dialstruct/metrics.hpp"
#include "dialstruct/mutual.hpp"

namespace dialstruct {

// Decodes a common matrix into both structures.
PredictedStructure decode_common(const std::string& id, const ScoreMatrix& common, const TilingConfig& tiling);

// Fused pair -> common matrix -> structures. Throws DialogueTooLong when the
// dialogue exceeds the parameter size.
PredictedStructure infer_structures(const std::string& id, const MatrixPair& pair, const ModelParams& params,
                                    const TilingConfig& tiling);

// Simple Incorporation baseline: decode normalized A^top + A^rhe.
PredictedStructure infer_simple_incorporation(const std::string& id, const MatrixPair& pair,
                                              const TilingConfig& tiling);

// Direct decoding of each raw matrix on its own task: Eisner on A^rhe,
// TextTiling on A^top.
PredictedStructure infer_direct(const std::string& id, const MatrixPair& pair, const TilingConfig& tiling);

struct DialogueScores {
  std::string id;
  std::size_t n = 0;
  std::optional<std::size_t> k;
  std::optional<double> pk;
  std::optional<double> wd;
  std::optional<ArcCounts> arcs;
  std::size_t leftward_gold = 0;  // gold arcs a rightward decoder cannot produce
};

struct EvalSummary {
  std::vector<DialogueScores> rows;
  std::size_t segmentation_dialogues = 0;
  double macro_pk = 0.0;
  double macro_wd = 0.0;
  ArcCounts micro_arcs;
  std::size_t leftward_gold = 0;
};

// Joins predictions with gold by id; throws InvalidArgument on a missing or
// extra id, DimensionMismatch when n differs.
EvalSummary evaluate(const CorpusBundle& gold, const std::vector<PredictedStructure>& predictions,
                     const SegEvalConfig& seg);

}  // namespace dialstruct
