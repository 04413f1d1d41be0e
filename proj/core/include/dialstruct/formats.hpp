#pragma once

// Line-oriented file formats. Every file starts with a JSON header line
// {"format": <name>, "version": 1, ...}; record files follow with one JSON
// object per line. See docs/formats.md for worked examples.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/scoring.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kCorpusFormatName = "dialstruct.corpus";
inline constexpr const char* kEmbeddingFormatName = "dialstruct.embeddings";
inline constexpr const char* kMatrixFormatName = "dialstruct.matrices";
inline constexpr const char* kParamsFormatName = "dialstruct.params";
inline constexpr const char* kStructuresFormatName = "dialstruct.structures";
inline constexpr const char* kReportFormatName = "dialstruct.report";

std::string read_text_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Throws ParseError unless `header` names `format` at a supported version.
void check_header(const nlohmann::json& header, const std::string& format, std::size_t line);

// ---- embeddings: {"id", "kind", "n", "d", "data": row-major n*d} ---------

std::string embeddings_to_text(const std::vector<UtteranceEmbeddings>& e, const nlohmann::json& extra_header = {});
std::vector<UtteranceEmbeddings> parse_embeddings_text(const std::string& text);

// ---- matrices: header carries "kind"; records {"id", "n", "upper"} ------

enum class MatrixKind { topic, rhetorical };

struct MatrixFile {
  MatrixKind kind = MatrixKind::topic;
  std::map<std::string, ScoreMatrix> matrices;
  std::vector<std::string> order;  // ids in file order
  nlohmann::json header;
};

std::string matrices_to_text(MatrixKind kind, const std::vector<std::pair<std::string, ScoreMatrix>>& ms,
                             const nlohmann::json& extra_header = {});
MatrixFile parse_matrices_text(const std::string& text);

std::string to_string(MatrixKind k);
MatrixKind matrix_kind_from_string(const std::string& s);

// ---- params: one JSON document ------------------------------------------

std::string params_to_text(const ModelParams& p, const nlohmann::json& config_echo, std::uint64_t seed);
ModelParams parse_params_text(const std::string& text);

// ---- structures: records {"id", "n", "arcs": [[h, d]...], "boundaries"} --

struct PredictedStructure {
  std::string id;
  std::size_t n = 0;
  std::set<Arc> arcs;
  Segmentation boundaries;
};

std::string structures_to_text(const std::vector<PredictedStructure>& s, const nlohmann::json& extra_header = {});
std::vector<PredictedStructure> parse_structures_text(const std::string& text);

}  // namespace dialstruct
