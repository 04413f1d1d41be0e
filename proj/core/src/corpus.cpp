#include "dialstruct/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dialstruct/error.hpp"
#include "dialstruct/formats.hpp"

namespace dialstruct {

using nlohmann::json;

namespace {

void warn(Warnings* w, std::string msg) {
  if (w != nullptr) w->push_back(std::move(msg));
}

bool has_arcs(Task t) { return t != Task::topic_segmentation; }
bool has_boundaries(Task t) { return t != Task::discourse_parsing; }

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// ---- canonical ---------------------------------------------------------

json dialogue_to_json(const Dialogue& d) {
  json j;
  j["id"] = d.id;
  json utts = json::array();
  for (const auto& u : d.utterances) utts.push_back({{"speaker", u.speaker}, {"text", u.text}});
  j["utterances"] = std::move(utts);
  if (d.gold_arcs) {
    json arcs = json::array();
    for (const auto& la : *d.gold_arcs) arcs.push_back({la.arc.head, la.arc.dependent, la.relation});
    j["gold_arcs"] = std::move(arcs);
  }
  if (d.gold_boundaries) j["gold_boundaries"] = d.gold_boundaries->boundaries();
  return j;
}

Dialogue dialogue_from_json(const json& j, std::size_t line, Warnings* warnings) {
  Dialogue d;
  try {
    d.id = j.at("id").get<std::string>();
    std::size_t idx = 0;
    for (const auto& u : j.at("utterances")) {
      d.utterances.push_back({++idx, u.value("speaker", std::string{}), u.at("text").get<std::string>()});
    }
    const std::size_t n = d.n();
    if (auto it = j.find("gold_arcs"); it != j.end() && !it->is_null()) {
      std::vector<LabeledArc> arcs;
      std::set<Arc> seen;
      for (const auto& a : *it) {
        if (!a.is_array() || a.size() < 2) throw ParseError(line, "gold arc must be [head, dependent, relation]");
        LabeledArc la{{a[0].get<std::size_t>(), a[1].get<std::size_t>()},
                      a.size() > 2 ? a[2].get<std::string>() : std::string{}};
        if (la.arc.head < 1 || la.arc.head > n) throw IndexOutOfRange(la.arc.head, n);
        if (la.arc.dependent < 1 || la.arc.dependent > n) throw IndexOutOfRange(la.arc.dependent, n);
        if (!seen.insert(la.arc).second) {
          warn(warnings, "dialogue " + d.id + ": duplicate arc " + std::to_string(la.arc.head) + "->" +
                             std::to_string(la.arc.dependent) + " dropped");
          continue;
        }
        arcs.push_back(std::move(la));
      }
      d.gold_arcs = std::move(arcs);
    }
    if (auto it = j.find("gold_boundaries"); it != j.end() && !it->is_null()) {
      d.gold_boundaries = Segmentation(n, it->get<std::set<std::size_t>>());
    }
  } catch (const json::exception& e) {
    throw ParseError(line, e.what());
  }
  return d;
}

// ---- link formats ------------------------------------------------------

CorpusBundle load_links(const std::filesystem::path& path, Warnings* warnings, Split split) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_array()) throw ParseError(0, "expected a JSON list of dialogues");

  CorpusBundle out;
  out.task = Task::discourse_parsing;
  out.split = split;
  std::size_t ordinal = 0;
  for (const auto& rec : doc) {
    ++ordinal;
    Dialogue d;
    try {
      d.id = rec.contains("id") ? (rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump())
                                : std::to_string(ordinal);
      std::size_t idx = 0;
      for (const auto& edu : rec.at("edus")) {
        std::string text = edu.value("text", std::string{});
        if (blank(text)) {
          warn(warnings, "dialogue " + d.id + ": empty EDU " + std::to_string(idx + 1) + " replaced");
          text = "[empty]";
        }
        d.utterances.push_back({++idx, edu.value("speaker", std::string{}), std::move(text)});
      }
      const std::size_t n = d.n();
      std::vector<LabeledArc> arcs;
      std::set<Arc> seen;
      for (const auto& rel : rec.value("relations", json::array())) {
        const auto x = rel.at("x").get<long long>();
        const auto y = rel.at("y").get<long long>();
        if (x < 0 || static_cast<std::size_t>(x) >= n) throw IndexOutOfRange(static_cast<std::size_t>(x + 1), n);
        if (y < 0 || static_cast<std::size_t>(y) >= n) throw IndexOutOfRange(static_cast<std::size_t>(y + 1), n);
        Arc arc{static_cast<std::size_t>(x) + 1, static_cast<std::size_t>(y) + 1};
        if (!seen.insert(arc).second) {
          warn(warnings, "dialogue " + d.id + ": duplicate arc " + std::to_string(arc.head) + "->" +
                             std::to_string(arc.dependent) + " dropped");
          continue;
        }
        arcs.push_back({arc, rel.value("type", std::string{})});
      }
      d.gold_arcs = std::move(arcs);
    } catch (const json::exception& e) {
      throw ParseError(ordinal, e.what());
    }
    out.dialogues.push_back(std::move(d));
  }
  return out;
}

// ---- linear segments ---------------------------------------------------

bool is_delimiter(const std::string& line) {
  static const std::regex kDelimiter(R"(^\s*={3,}\s*$)");
  return std::regex_match(line, kDelimiter);
}

struct LinearBuilder {
  Dialogue d;
  std::set<std::size_t> boundaries;
  bool pending_boundary = false;

  void add_line(const std::string& raw, Warnings* warnings) {
    if (is_delimiter(raw)) {
      if (d.utterances.empty() || pending_boundary) {
        warn(warnings, "dialogue " + d.id + ": delimiter without preceding utterance ignored");
      }
      pending_boundary = !d.utterances.empty();
      return;
    }
    const std::string text = trim(raw);
    if (text.empty()) return;
    if (pending_boundary) boundaries.insert(d.utterances.size());
    pending_boundary = false;
    d.utterances.push_back({d.utterances.size() + 1, std::string{}, text});
  }

  bool empty() const { return d.utterances.empty(); }

  Dialogue finish(Warnings* warnings) {
    if (pending_boundary) warn(warnings, "dialogue " + d.id + ": trailing delimiter ignored");
    d.gold_boundaries = Segmentation(d.n(), std::move(boundaries));
    return std::move(d);
  }
};

std::vector<Dialogue> parse_linear_stream(std::istream& in, const std::string& default_id,
                                          bool single_dialogue, Warnings* warnings) {
  std::vector<Dialogue> out;
  LinearBuilder cur;
  std::string next_id;
  auto flush = [&] {
    if (cur.empty()) return;
    if (cur.d.id.empty()) cur.d.id = default_id + "-" + std::to_string(out.size() + 1);
    out.push_back(cur.finish(warnings));
    cur = LinearBuilder{};
  };
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!single_dialogue && line.rfind("# id:", 0) == 0) {
      flush();
      cur.d.id = trim(line.substr(5));
      continue;
    }
    if (!single_dialogue && blank(line)) {
      const std::string id = cur.d.id;
      if (!cur.empty()) flush();
      else cur.d.id = id;
      continue;
    }
    cur.add_line(line, warnings);
  }
  if (single_dialogue && cur.d.id.empty()) cur.d.id = default_id;
  flush();
  return out;
}

CorpusBundle load_linear(const std::filesystem::path& path, Warnings* warnings, Split split) {
  CorpusBundle out;
  out.task = Task::topic_segmentation;
  out.split = split;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f);
      if (!in) throw Error("cannot open " + f.string());
      for (auto& d : parse_linear_stream(in, f.stem().string(), true, warnings)) out.dialogues.push_back(std::move(d));
    }
  } else {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    out.dialogues = parse_linear_stream(in, path.stem().string(), false, warnings);
  }
  return out;
}

}  // namespace

void validate_bundle(const CorpusBundle& c) {
  for (const auto& d : c.dialogues) {
    validate_dialogue(d);
    if (d.gold_arcs.has_value() != has_arcs(c.task)) {
      throw InvalidArgument("dialogue " + d.id + ": gold arcs must be present iff the task includes parsing");
    }
    if (d.gold_boundaries.has_value() != has_boundaries(c.task)) {
      throw InvalidArgument("dialogue " + d.id +
                            ": gold boundaries must be present iff the task includes segmentation");
    }
  }
}

std::string to_canonical_text(const CorpusBundle& c, const json& extra_header) {
  json header = {{"format", kCorpusFormatName},
                 {"version", kFormatVersion},
                 {"task", to_string(c.task)},
                 {"split", to_string(c.split)}};
  if (extra_header.is_object())
    for (const auto& [k, v] : extra_header.items())
      if (!header.contains(k)) header[k] = v;
  std::string out = header.dump();
  out += '\n';
  for (const auto& d : c.dialogues) {
    out += dialogue_to_json(d).dump();
    out += '\n';
  }
  return out;
}

void save_canonical(const CorpusBundle& c, const std::filesystem::path& path, const json& extra_header) {
  write_text_file(path, to_canonical_text(c, extra_header));
}

CorpusBundle parse_canonical_text(const std::string& text, Warnings* warnings) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  CorpusBundle out;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
    if (!header) {
      check_header(j, kCorpusFormatName, lineno);
      try {
        out.task = task_from_string(j.at("task").get<std::string>());
        out.split = split_from_string(j.at("split").get<std::string>());
      } catch (const json::exception& e) {
        throw ParseError(lineno, e.what());
      } catch (const InvalidArgument& e) {
        throw ParseError(lineno, e.what());
      }
      header = true;
      continue;
    }
    out.dialogues.push_back(dialogue_from_json(j, lineno, warnings));
  }
  if (!header) throw ParseError(lineno, "missing corpus header line");
  validate_bundle(out);
  return out;
}

CorpusBundle load_corpus(const std::filesystem::path& path, CorpusFormat format, Warnings* warnings,
                         Split split) {
  CorpusBundle out;
  switch (format) {
    case CorpusFormat::canonical: out = parse_canonical_text(read_text_file(path), warnings); break;
    case CorpusFormat::stac_links:
    case CorpusFormat::molweni_links: out = load_links(path, warnings, split); break;
    case CorpusFormat::linear_segments: out = load_linear(path, warnings, split); break;
  }
  validate_bundle(out);
  return out;
}

CorpusBundle truncate_for_training(const CorpusBundle& c, std::size_t max_turns) {
  if (max_turns < 2) throw InvalidArgument("max_turns must be at least 2");
  if (c.split == Split::test) return c;
  CorpusBundle out = c;
  for (auto& d : out.dialogues) {
    if (d.n() <= max_turns) continue;
    d.utterances.resize(max_turns);
    if (d.gold_arcs) {
      std::erase_if(*d.gold_arcs, [&](const LabeledArc& la) {
        return la.arc.head > max_turns || la.arc.dependent > max_turns;
      });
    }
    if (d.gold_boundaries) {
      std::set<std::size_t> kept;
      for (std::size_t g : d.gold_boundaries->boundaries())
        if (g < max_turns) kept.insert(g);
      d.gold_boundaries = Segmentation(max_turns, std::move(kept));
    }
  }
  return out;
}

// ---- synthetic ---------------------------------------------------------

void SyntheticSpec::validate() const {
  if (n_dialogues == 0) throw InfeasibleSpec("n_dialogues must be positive");
  if (turns_min < 2 || turns_min > turns_max) throw InfeasibleSpec("turns range must satisfy 2 <= min <= max");
  if (topics_min < 1 || topics_min > topics_max) throw InfeasibleSpec("topics range must satisfy 1 <= min <= max");
  if (min_topic_length < 1) throw InfeasibleSpec("min_topic_length must be positive");
  if (topics_min * min_topic_length > turns_min) {
    throw InfeasibleSpec("topics_min * min_topic_length exceeds turns_min");
  }
  if (!(within_score > cross_score) || cross_score < 0.0) {
    throw InfeasibleSpec("planted levels must satisfy within_score > cross_score >= 0");
  }
  if (noise_sigma < 0.0) throw InfeasibleSpec("noise_sigma must be non-negative");
}

namespace {

const std::vector<std::vector<std::string>>& topic_vocabularies() {
  static const std::vector<std::vector<std::string>> vocab = {
      {"flight", "ticket", "airport", "seat", "boarding"},
      {"pizza", "order", "delivery", "cheese", "topping"},
      {"wheat", "sheep", "trade", "ore", "brick"},
      {"hotel", "room", "booking", "night", "checkin"},
      {"weather", "rain", "forecast", "sunny", "cold"},
      {"install", "ubuntu", "kernel", "driver", "package"},
  };
  return vocab;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Sizes of `topics` blocks, each >= min_len, summing to n.
std::vector<std::size_t> sample_blocks(std::mt19937_64& rng, std::size_t n, std::size_t topics,
                                       std::size_t min_len) {
  std::vector<std::size_t> sizes(topics, min_len);
  for (std::size_t extra = n - topics * min_len; extra > 0; --extra) ++sizes[uniform_index(rng, 0, topics - 1)];
  return sizes;
}

// Random rightward projective tree over [first, last] (0-based) rooted at first.
// Heads come from the open right spine, preferring the most recent node.
void plant_block_tree(std::mt19937_64& rng, std::size_t first, std::size_t last, std::vector<std::size_t>& head) {
  std::vector<std::size_t> spine{first};
  std::bernoulli_distribution attach_to_last(0.6);
  for (std::size_t v = first + 1; v <= last; ++v) {
    std::size_t pick = spine.size() - 1;
    if (pick > 0 && !attach_to_last(rng)) pick = uniform_index(rng, 0, spine.size() - 1);
    head[v] = spine[pick];
    spine.resize(pick + 1);
    spine.push_back(v);
  }
}

// Nodes of [first, last] not strictly covered by an arc inside the block.
std::vector<std::size_t> uncovered(std::size_t first, std::size_t last, const std::vector<std::size_t>& head) {
  std::vector<std::size_t> out;
  for (std::size_t x = first; x <= last; ++x) {
    bool covered = false;
    for (std::size_t v = first + 1; v <= last && !covered; ++v) covered = head[v] < x && x < v;
    if (!covered) out.push_back(x);
  }
  return out;
}

ScoreMatrix planted_matrix(std::mt19937_64& rng, std::size_t n, double sigma,
                           const std::function<double(std::size_t, std::size_t)>& level) {
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = level(i, j) + (sigma > 0.0 ? sigma * noise(rng) : 0.0);
      m(Eigen::Index(i), Eigen::Index(j)) = std::clamp(v, 0.0, 1.0);
    }
  return normalize(ScoreMatrix(std::move(m)), ScorerConfig{});
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SyntheticCorpus out;
  out.corpus.task = Task::both;
  out.corpus.split = Split::test;
  const auto& vocab = topic_vocabularies();
  static const char* kSpeakers[] = {"A", "B", "C"};

  for (std::size_t di = 0; di < spec.n_dialogues; ++di) {
    const std::size_t n = uniform_index(rng, spec.turns_min, spec.turns_max);
    const std::size_t max_topics = std::min(spec.topics_max, n / spec.min_topic_length);
    const std::size_t topics = uniform_index(rng, spec.topics_min, max_topics);
    const auto sizes = sample_blocks(rng, n, topics, spec.min_topic_length);

    std::vector<std::size_t> block_of(n), block_start;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < topics; ++b) {
      block_start.push_back(pos);
      for (std::size_t k = 0; k < sizes[b]; ++k) block_of[pos++] = b;
    }

    std::vector<std::size_t> head(n, 0);
    for (std::size_t b = 0; b < topics; ++b) {
      const std::size_t first = block_start[b];
      const std::size_t last = first + sizes[b] - 1;
      plant_block_tree(rng, first, last, head);
      if (b > 0) {
        const std::size_t prev_first = block_start[b - 1];
        const auto anchors = uncovered(prev_first, first - 1, head);
        head[first] = anchors[uniform_index(rng, 0, anchors.size() - 1)];
      }
    }

    Dialogue d;
    d.id = "synth-" + std::to_string(di + 1);
    std::vector<std::size_t> topic_ids(topics);
    for (auto& t : topic_ids) t = uniform_index(rng, 0, vocab.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& words = vocab[topic_ids[block_of[i]]];
      std::string text = words[uniform_index(rng, 0, words.size() - 1)];
      text += ' ';
      text += words[uniform_index(rng, 0, words.size() - 1)];
      d.utterances.push_back({i + 1, kSpeakers[i % 3], std::move(text)});
    }
    std::vector<LabeledArc> arcs;
    for (std::size_t v = 1; v < n; ++v) arcs.push_back({{head[v] + 1, v + 1}, ""});
    d.gold_arcs = std::move(arcs);
    std::set<std::size_t> boundaries;
    for (std::size_t b = 1; b < topics; ++b) boundaries.insert(block_start[b]);
    d.gold_boundaries = Segmentation(n, std::move(boundaries));

    ScoreMatrix topic = planted_matrix(rng, n, spec.noise_sigma, [&](std::size_t i, std::size_t j) {
      return block_of[i] == block_of[j] ? spec.within_score : spec.cross_score;
    });
    ScoreMatrix rhetorical = planted_matrix(rng, n, spec.noise_sigma, [&](std::size_t i, std::size_t j) {
      return head[j] == i ? spec.arc_score : spec.cross_score;
    });
    out.oracle.emplace(d.id, MatrixPair{std::move(topic), std::move(rhetorical)});
    out.corpus.dialogues.push_back(std::move(d));
  }
  return out;
}

// ---- statistics --------------------------------------------------------

CorpusStats corpus_stats(const CorpusBundle& c) {
  CorpusStats s;
  s.dialogues = c.dialogues.size();
  if (s.dialogues == 0) return s;
  double utts = 0.0, rels = 0.0, shifts = 0.0;
  for (const auto& d : c.dialogues) {
    utts += static_cast<double>(d.n());
    if (d.gold_arcs) rels += static_cast<double>(d.gold_arcs->size());
    if (d.gold_boundaries) shifts += static_cast<double>(d.gold_boundaries->boundaries().size());
  }
  const double count = static_cast<double>(s.dialogues);
  s.avg_utterances = utts / count;
  s.avg_relations = rels / count;
  s.avg_topic_shifts = shifts / count;
  return s;
}

const std::vector<ReferenceStats>& reference_stats() {
  static const std::vector<ReferenceStats> table = {
      {"molweni", Task::discourse_parsing, 8.8, 7.8, std::nullopt, 8771, 883, 100, 0.1},
      // Published as "10." so only the integer part is known.
      {"stac", Task::discourse_parsing, 10.0, 11.4, std::nullopt, 965, 0, 116, 0.5},
      {"doc2dial", Task::topic_segmentation, 12.7, std::nullopt, 2.9, 2895, 621, 621, 0.1},
      {"tiage", Task::topic_segmentation, 14.8, std::nullopt, 3.5, 300, 100, 100, 0.1},
      {"dialseg711", Task::topic_segmentation, 27.2, std::nullopt, 5.6, 711, 0, 711, 0.1},
  };
  return table;
}

const ReferenceStats* find_reference(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& r : reference_stats())
    if (r.name == lower) return &r;
  return nullptr;
}

std::string to_string(Task t) {
  switch (t) {
    case Task::discourse_parsing: return "discourse_parsing";
    case Task::topic_segmentation: return "topic_segmentation";
    case Task::both: return "both";
  }
  return "?";
}

Task task_from_string(const std::string& s) {
  if (s == "discourse_parsing") return Task::discourse_parsing;
  if (s == "topic_segmentation") return Task::topic_segmentation;
  if (s == "both") return Task::both;
  throw InvalidArgument("unknown task '" + s + "'");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val" || s == "dev") return Split::val;
  if (s == "test") return Split::test;
  throw InvalidArgument("unknown split '" + s + "'");
}

std::string to_string(CorpusFormat f) {
  switch (f) {
    case CorpusFormat::canonical: return "canonical";
    case CorpusFormat::stac_links: return "stac_links";
    case CorpusFormat::molweni_links: return "molweni_links";
    case CorpusFormat::linear_segments: return "linear_segments";
  }
  return "?";
}

CorpusFormat corpus_format_from_string(const std::string& s) {
  if (s == "canonical") return CorpusFormat::canonical;
  if (s == "stac_links") return CorpusFormat::stac_links;
  if (s == "molweni_links") return CorpusFormat::molweni_links;
  if (s == "linear_segments") return CorpusFormat::linear_segments;
  throw InvalidArgument("unknown corpus format '" + s + "'");
}

}  // namespace dialstruct
