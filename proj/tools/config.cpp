#include "config.hpp"

#include "dialstruct/error.hpp"

namespace dialstruct::app {

using nlohmann::json;

namespace {

const json& field(const json& section, const std::string& sec, const char* key) {
  if (!section.contains(key)) throw InvalidArgument("missing config key: " + sec + "." + key);
  return section.at(key);
}

std::string where(const std::string& section, const char* key) {
  return section.empty() ? std::string(key) : section + "." + key;
}

std::string get_string(const json& s, const std::string& sec, const char* key) {
  const auto& v = field(s, sec, key);
  if (!v.is_string()) throw InvalidArgument(where(sec, key) + " must be a string");
  return v.get<std::string>();
}

double get_double(const json& s, const std::string& sec, const char* key) {
  const auto& v = field(s, sec, key);
  if (!v.is_number()) throw InvalidArgument(where(sec, key) + " must be a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& s, const std::string& sec, const char* key) {
  const auto& v = field(s, sec, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::uint64_t(v.get<std::int64_t>());
  throw InvalidArgument(where(sec, key) + " must be a non-negative integer");
}

std::size_t get_size(const json& s, const std::string& sec, const char* key) {
  return static_cast<std::size_t>(get_unsigned(s, sec, key));
}

std::optional<std::size_t> get_optional_size(const json& s, const std::string& sec, const char* key) {
  if (field(s, sec, key).is_null()) return std::nullopt;
  return get_size(s, sec, key);
}

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "scalar") return WeightMode::scalar;
  if (s == "vector") return WeightMode::vector;
  throw InvalidArgument("unknown weight mode: " + s);
}

ThresholdPolicy policy_from_string(const std::string& s) {
  if (s == "mu_minus_half_sigma") return ThresholdPolicy::mu_minus_half_sigma;
  if (s == "fixed") return ThresholdPolicy::fixed;
  throw InvalidArgument("unknown threshold policy: " + s);
}

}  // namespace

json default_config() {
  const TrainConfig t;
  const TilingConfig tl;
  const SyntheticSpec sy;
  const ScorerConfig sc;
  return {
      {"paths",
       {{"corpus", ""},
        {"corpus_format", "canonical"},
        {"validation_corpus", ""},
        {"embeddings", json::array()},
        {"topic_source", ""},
        {"rhetorical_source", ""},
        {"topic_matrices", ""},
        {"rhetorical_matrices", ""},
        {"params_in", ""},
        {"params_out", ""},
        {"history_out", ""},
        {"structures", ""},
        {"report", ""}}},
      {"scorer",
       {{"source", to_string(sc.source)}, {"normalization", to_string(sc.normalization)}, {"epsilon", sc.epsilon}}},
      {"train",
       {{"learning_rate", t.learning_rate},
        {"lambda1", t.lambda1},
        {"lambda2", t.lambda2},
        {"max_epochs", t.max_epochs},
        {"patience", t.patience},
        {"seed", t.seed},
        {"n_max", t.n_max},
        {"max_train_turns", t.max_train_turns},
        {"weight_mode", "scalar"},
        {"degenerate_epsilon", t.degenerate_epsilon},
        {"init_noise", t.init_noise},
        {"adam_beta1", t.adam_beta1},
        {"adam_beta2", t.adam_beta2},
        {"adam_epsilon", t.adam_epsilon}}},
      {"tiling",
       {{"window", tl.window}, {"policy", "mu_minus_half_sigma"}, {"fixed_threshold", tl.fixed_threshold},
        {"smoothing", nullptr}}},
      {"eval", {{"k", nullptr}}},
      {"infer", {{"mode", "mutual"}}},
      {"synth",
       {{"n_dialogues", sy.n_dialogues},
        {"turns_min", sy.turns_min},
        {"turns_max", sy.turns_max},
        {"topics_min", sy.topics_min},
        {"topics_max", sy.topics_max},
        {"min_topic_length", sy.min_topic_length},
        {"noise_sigma", sy.noise_sigma},
        {"within_score", sy.within_score},
        {"cross_score", sy.cross_score},
        {"arc_score", sy.arc_score},
        {"seed", sy.seed}}},
      {"stats", {{"reference", nullptr}}},
      {"workers", 1},
  };
}

void merge_config(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) throw InvalidArgument("config " + (prefix.empty() ? "root" : prefix) + " must be an object");
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw InvalidArgument("unknown config key: " + path);
    auto& slot = base[key];
    if (slot.is_object())
      merge_config(slot, value, path);
    else
      slot = value;
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json overlay = value;
  std::size_t end = key.size();
  while (true) {
    const auto dot = key.rfind('.', end - 1);
    const std::string part = key.substr(dot == std::string::npos ? 0 : dot + 1,
                                        end - (dot == std::string::npos ? 0 : dot + 1));
    if (part.empty()) throw InvalidArgument("bad override key: " + key);
    overlay = json{{part, overlay}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  merge_config(config, overlay);
}

RunConfig parse_config(const json& c) {
  RunConfig r;

  const auto& p = c.at("paths");
  const std::string ps = "paths";
  r.paths.corpus = get_string(p, ps, "corpus");
  r.paths.corpus_format = corpus_format_from_string(get_string(p, ps, "corpus_format"));
  r.paths.validation_corpus = get_string(p, ps, "validation_corpus");
  const auto& emb = p.at("embeddings");
  if (emb.is_string()) {
    r.paths.embeddings.push_back(emb.get<std::string>());
  } else if (emb.is_array()) {
    for (const auto& e : emb) {
      if (!e.is_string()) throw InvalidArgument("paths.embeddings entries must be strings");
      r.paths.embeddings.push_back(e.get<std::string>());
    }
  } else {
    throw InvalidArgument("paths.embeddings must be a string or a list of strings");
  }
  r.paths.topic_source = get_string(p, ps, "topic_source");
  r.paths.rhetorical_source = get_string(p, ps, "rhetorical_source");
  r.paths.topic_matrices = get_string(p, ps, "topic_matrices");
  r.paths.rhetorical_matrices = get_string(p, ps, "rhetorical_matrices");
  r.paths.params_in = get_string(p, ps, "params_in");
  r.paths.params_out = get_string(p, ps, "params_out");
  r.paths.history_out = get_string(p, ps, "history_out");
  r.paths.structures = get_string(p, ps, "structures");
  r.paths.report = get_string(p, ps, "report");

  const auto& s = c.at("scorer");
  r.scorer.source = score_source_from_string(get_string(s, "scorer", "source"));
  r.scorer.normalization = normalization_from_string(get_string(s, "scorer", "normalization"));
  r.scorer.epsilon = get_double(s, "scorer", "epsilon");
  if (!(r.scorer.epsilon > 0.0)) throw InvalidArgument("scorer.epsilon must be positive");

  const auto& t = c.at("train");
  const std::string ts = "train";
  r.train.learning_rate = get_double(t, ts, "learning_rate");
  r.train.lambda1 = get_double(t, ts, "lambda1");
  r.train.lambda2 = get_double(t, ts, "lambda2");
  r.train.max_epochs = get_size(t, ts, "max_epochs");
  r.train.patience = get_size(t, ts, "patience");
  r.train.seed = get_unsigned(t, ts, "seed");
  r.train.n_max = get_size(t, ts, "n_max");
  r.train.max_train_turns = get_size(t, ts, "max_train_turns");
  r.train.weight_mode = weight_mode_from_string(get_string(t, ts, "weight_mode"));
  r.train.degenerate_epsilon = get_double(t, ts, "degenerate_epsilon");
  r.train.init_noise = get_double(t, ts, "init_noise");
  r.train.adam_beta1 = get_double(t, ts, "adam_beta1");
  r.train.adam_beta2 = get_double(t, ts, "adam_beta2");
  r.train.adam_epsilon = get_double(t, ts, "adam_epsilon");

  const auto& tl = c.at("tiling");
  r.tiling.window = get_size(tl, "tiling", "window");
  r.tiling.policy = policy_from_string(get_string(tl, "tiling", "policy"));
  r.tiling.fixed_threshold = get_double(tl, "tiling", "fixed_threshold");
  r.tiling.smoothing = get_optional_size(tl, "tiling", "smoothing");

  r.eval.k = get_optional_size(c.at("eval"), "eval", "k");
  r.infer_mode = infer_mode_from_string(get_string(c.at("infer"), "infer", "mode"));

  const auto& sy = c.at("synth");
  const std::string ss = "synth";
  r.synth.n_dialogues = get_size(sy, ss, "n_dialogues");
  r.synth.turns_min = get_size(sy, ss, "turns_min");
  r.synth.turns_max = get_size(sy, ss, "turns_max");
  r.synth.topics_min = get_size(sy, ss, "topics_min");
  r.synth.topics_max = get_size(sy, ss, "topics_max");
  r.synth.min_topic_length = get_size(sy, ss, "min_topic_length");
  r.synth.noise_sigma = get_double(sy, ss, "noise_sigma");
  r.synth.within_score = get_double(sy, ss, "within_score");
  r.synth.cross_score = get_double(sy, ss, "cross_score");
  r.synth.arc_score = get_double(sy, ss, "arc_score");
  r.synth.seed = get_unsigned(sy, ss, "seed");

  const auto& ref = c.at("stats").at("reference");
  if (!ref.is_null()) {
    if (!ref.is_string()) throw InvalidArgument("stats.reference must be a string or null");
    r.stats_reference = ref.get<std::string>();
  }

  r.workers = get_size(c, "", "workers");
  if (r.workers == 0) throw InvalidArgument("workers must be at least 1");
  r.train.workers = r.workers;

  r.train.validate();
  r.tiling.validate();
  return r;
}

std::string to_string(InferMode m) {
  switch (m) {
    case InferMode::mutual: return "mutual";
    case InferMode::simple: return "simple";
    case InferMode::direct: return "direct";
  }
  return "?";
}

InferMode infer_mode_from_string(const std::string& s) {
  if (s == "mutual") return InferMode::mutual;
  if (s == "simple") return InferMode::simple;
  if (s == "direct") return InferMode::direct;
  throw InvalidArgument("unknown infer mode: " + s);
}

}  // namespace dialstruct::app
