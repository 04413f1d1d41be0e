#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialstruct/corpus.hpp"
#include "dialstruct/decode.hpp"
#include "dialstruct/metrics.hpp"
#include "dialstruct/mutual.hpp"
#include "dialstruct/scoring.hpp"

namespace dialstruct::app {

enum class InferMode { mutual, simple, direct };

struct Paths {
  std::string corpus;
  CorpusFormat corpus_format = CorpusFormat::canonical;
  std::string validation_corpus;
  std::vector<std::string> embeddings;
  std::string topic_source;
  std::string rhetorical_source;
  std::string topic_matrices;
  std::string rhetorical_matrices;
  std::string params_in;
  std::string params_out;
  std::string history_out;
  std::string structures;
  std::string report;
};

struct RunConfig {
  Paths paths;
  ScorerConfig scorer;
  TrainConfig train;
  TilingConfig tiling;
  SegEvalConfig eval;
  InferMode infer_mode = InferMode::mutual;
  SyntheticSpec synth;
  std::optional<std::string> stats_reference;
  std::size_t workers = 1;
};

// Every recognised key with its default value.
nlohmann::json default_config();

// Overlays `overlay` onto `base`. Keys missing from `base` are rejected with
// InvalidArgument naming the dotted path.
void merge_config(nlohmann::json& base, const nlohmann::json& overlay, const std::string& prefix = "");

// Applies one `dotted.key=value` override. The value is read as JSON when it
// parses and as a plain string otherwise.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Typed view of a merged config; throws InvalidArgument on bad values.
RunConfig parse_config(const nlohmann::json& config);

std::string to_string(InferMode m);
InferMode infer_mode_from_string(const std::string& s);

}  // namespace dialstruct::app
