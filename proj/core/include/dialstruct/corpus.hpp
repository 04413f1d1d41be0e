#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialstruct/score_matrix.hpp"
#include "dialstruct/scoring.hpp"
#include "dialstruct/types.hpp"

namespace dialstruct {

enum class Task { discourse_parsing, topic_segmentation, both };
enum class Split { train, val, test };

struct CorpusBundle {
  std::vector<Dialogue> dialogues;
  Task task = Task::both;
  Split split = Split::test;

  friend bool operator==(const CorpusBundle&, const CorpusBundle&) = default;
};

// Gold arcs present iff the task includes parsing, gold boundaries iff it
// includes segmentation; every dialogue passes validate_dialogue.
void validate_bundle(const CorpusBundle& c);

enum class CorpusFormat { canonical, stac_links, molweni_links, linear_segments };

// Non-fatal findings collected while loading (duplicate arcs, empty EDUs, ...).
using Warnings = std::vector<std::string>;

// Loads and normalizes a corpus. The link formats read the JSON dialogue
// lists distributed with STAC and Molweni (edus + relations with 0-based
// x/y); linear_segments reads utterance-per-line text with ===== delimiter
// lines, from one file (dialogues separated by blank lines) or a directory
// (one dialogue per file). `split` is used by formats that do not record it.
CorpusBundle load_corpus(const std::filesystem::path& path, CorpusFormat format,
                         Warnings* warnings = nullptr, Split split = Split::test);

// `extra_header` fields are merged into the header line and ignored on load.
void save_canonical(const CorpusBundle& c, const std::filesystem::path& path,
                    const nlohmann::json& extra_header = {});
std::string to_canonical_text(const CorpusBundle& c, const nlohmann::json& extra_header = {});
CorpusBundle parse_canonical_text(const std::string& text, Warnings* warnings = nullptr);

// Cuts train/val dialogues to their first max_turns utterances and drops
// gold structure that referenced removed utterances. Test splits pass through.
CorpusBundle truncate_for_training(const CorpusBundle& c, std::size_t max_turns);

struct SyntheticSpec {
  std::size_t n_dialogues = 200;
  std::size_t turns_min = 8;
  std::size_t turns_max = 16;
  std::size_t topics_min = 2;
  std::size_t topics_max = 4;
  std::size_t min_topic_length = 2;
  double noise_sigma = 0.2;
  double within_score = 0.8;
  double cross_score = 0.2;
  double arc_score = 0.8;
  std::uint64_t seed = 42;

  // Throws InfeasibleSpec.
  void validate() const;
};

struct SyntheticCorpus {
  CorpusBundle corpus;                   // task both, split test
  std::map<std::string, MatrixPair> oracle;  // normalized planted matrices by id
};

// Planted topic blocks and a planted rightward projective tree per dialogue.
// Tree arcs stay inside topic blocks except one link into each block's first
// utterance from the block before it.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

struct CorpusStats {
  std::size_t dialogues = 0;
  double avg_utterances = 0.0;
  double avg_relations = 0.0;    // gold arcs per dialogue
  double avg_topic_shifts = 0.0; // gold boundaries per dialogue
};

CorpusStats corpus_stats(const CorpusBundle& c);

// Published dataset inventory used as fixture values by `stats`.
struct ReferenceStats {
  std::string name;
  Task task;
  double avg_utterances;
  std::optional<double> avg_relations;
  std::optional<double> avg_topic_shifts;
  std::size_t train, val, test;  // val 0 where the dataset has none
  double tolerance;              // accepted |loaded - published| on averages
};

const std::vector<ReferenceStats>& reference_stats();
const ReferenceStats* find_reference(const std::string& name);

std::string to_string(Task t);
Task task_from_string(const std::string& s);
std::string to_string(Split s);
Split split_from_string(const std::string& s);
std::string to_string(CorpusFormat f);
CorpusFormat corpus_format_from_string(const std::string& s);

}  // namespace dialstruct
