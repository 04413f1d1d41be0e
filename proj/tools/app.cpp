#include "app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "dialstruct/error.hpp"
#include "dialstruct/formats.hpp"
#include "dialstruct/parallel.hpp"
#include "dialstruct/pipeline.hpp"

namespace dialstruct::app {

using nlohmann::json;

namespace {

constexpr const char* kHistoryFormatName = "dialstruct.history";
constexpr const char* kReportFormatName = "dialstruct.report";

struct Context {
  std::string command;
  json config;  // merged effective config
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

// Effective config minus the output paths this command writes, so that the
// provenance block does not change with where results are stored.
json config_echo(const Context& ctx, std::initializer_list<const char*> outputs) {
  json c = ctx.config;
  for (const char* key : outputs) c["paths"].erase(key);
  return c;
}

json provenance(const Context& ctx, std::initializer_list<const char*> outputs) {
  return {{"tool", "dialstruct"},
          {"tool_version", version()},
          {"command", ctx.command},
          {"config", config_echo(ctx, outputs)}};
}

const std::string& require_path(const std::string& value, const char* key) {
  if (value.empty()) throw InvalidArgument(std::string("paths.") + key + " is required for this command");
  return value;
}

void report_warnings(const Warnings& w, std::ostream& err) {
  for (const auto& msg : w) err << "warning: " << msg << "\n";
}

CorpusBundle load(const Context& ctx, const std::string& path, Split split) {
  Warnings w;
  auto c = load_corpus(path, ctx.cfg.paths.corpus_format, &w, split);
  report_warnings(w, ctx.err);
  return c;
}

std::map<std::string, ScoreMatrix> load_matrix_map(const std::string& path, MatrixKind expected) {
  auto mf = parse_matrices_text(read_text_file(path));
  if (mf.kind != expected)
    throw InvalidArgument(path + " holds " + to_string(mf.kind) + " matrices, expected " + to_string(expected));
  return std::move(mf.matrices);
}

std::unique_ptr<ScoreSource> make_source(const Context& ctx) {
  const auto& p = ctx.cfg.paths;
  switch (ctx.cfg.scorer.source) {
    case ScoreSourceKind::lexical:
      return std::make_unique<LexicalSource>();
    case ScoreSourceKind::embedding_file: {
      if (p.embeddings.empty()) throw InvalidArgument("paths.embeddings is required for the embedding source");
      std::vector<UtteranceEmbeddings> all;
      for (const auto& f : p.embeddings) {
        auto es = parse_embeddings_text(read_text_file(f));
        for (auto& e : es) all.push_back(std::move(e));
      }
      return std::make_unique<EmbeddingSource>(std::move(all), ctx.cfg.scorer);
    }
    case ScoreSourceKind::matrix_file:
      return std::make_unique<MatrixSource>(
          load_matrix_map(require_path(p.topic_source, "topic_source"), MatrixKind::topic),
          load_matrix_map(require_path(p.rhetorical_source, "rhetorical_source"), MatrixKind::rhetorical));
  }
  throw InvalidArgument("unknown score source");
}

ScoreMatrix leading_block(const ScoreMatrix& m, std::size_t n) {
  if (m.n() <= n) return m;
  const auto k = static_cast<Eigen::Index>(n);
  return ScoreMatrix(Eigen::MatrixXd(m.dense().topLeftCorner(k, k)));
}

// Scores each dialogue on its first `max_turns` utterances. Pairwise scores
// of a prefix equal the leading block of the full matrix, so sources keyed
// by full-length dialogues work unchanged.
std::vector<MatrixPair> score_for_training(const Context& ctx, const ScoreSource& source,
                                           const std::vector<Dialogue>& ds, std::size_t max_turns) {
  std::vector<std::optional<MatrixPair>> slots(ds.size());
  parallel_for(ds.size(), ctx.cfg.workers, [&](std::size_t i) {
    const auto& d = ds[i];
    const std::size_t n = std::min(d.n(), max_turns);
    if (n < 2) return;
    const auto raw = source.raw_scores(d);
    slots[i] = MatrixPair{normalize(leading_block(raw.topic, n), ctx.cfg.scorer),
                          normalize(leading_block(raw.rhetorical, n), ctx.cfg.scorer)};
  });
  std::vector<MatrixPair> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

std::vector<MatrixPair> score_all(const Context& ctx, const ScoreSource& source, const CorpusBundle& c) {
  std::vector<MatrixPair> out(c.dialogues.size());
  parallel_for(c.dialogues.size(), ctx.cfg.workers,
               [&](std::size_t i) { out[i] = score_dialogue(source, c.dialogues[i], ctx.cfg.scorer); });
  return out;
}

std::string fmt(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int cmd_score(Context& ctx) {
  const auto& p = ctx.cfg.paths;
  const auto corpus = load(ctx, require_path(p.corpus, "corpus"), Split::test);
  require_path(p.topic_matrices, "topic_matrices");
  require_path(p.rhetorical_matrices, "rhetorical_matrices");
  const auto source = make_source(ctx);
  const auto pairs = score_all(ctx, *source, corpus);

  std::vector<std::pair<std::string, ScoreMatrix>> topic, rhetorical;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    topic.emplace_back(corpus.dialogues[i].id, pairs[i].topic);
    rhetorical.emplace_back(corpus.dialogues[i].id, pairs[i].rhetorical);
  }
  const auto header = provenance(ctx, {"topic_matrices", "rhetorical_matrices"});
  write_text_file(p.topic_matrices, matrices_to_text(MatrixKind::topic, topic, header));
  write_text_file(p.rhetorical_matrices, matrices_to_text(MatrixKind::rhetorical, rhetorical, header));
  ctx.out << "scored " << pairs.size() << " dialogues\n";
  return 0;
}

std::string history_to_text(const TrainResult& r, const json& header_extra) {
  json header = {{"format", kHistoryFormatName}, {"version", 1}};
  for (const auto& [k, v] : header_extra.items()) header[k] = v;
  std::string out = header.dump() + "\n";
  for (const auto& e : r.history) {
    out += json{{"epoch", e.epoch},
                {"train_loss", e.train_loss},
                {"validation_loss", e.validation_loss},
                {"steps", e.steps},
                {"skipped_degenerate", e.skipped_degenerate}}
               .dump() +
           "\n";
  }
  out += json{{"summary",
               {{"best_epoch", r.best_epoch},
                {"early_stopped", r.early_stopped},
                {"skipped_too_long", r.skipped_too_long},
                {"validation_size", r.validation_size}}}}
             .dump() +
         "\n";
  return out;
}

int cmd_train(Context& ctx) {
  const auto& p = ctx.cfg.paths;
  const auto& tc = ctx.cfg.train;
  require_path(p.params_out, "params_out");
  const auto corpus = load(ctx, require_path(p.corpus, "corpus"), Split::train);
  const auto source = make_source(ctx);
  auto train_pairs = score_for_training(ctx, *source, corpus.dialogues, tc.max_train_turns);
  std::vector<MatrixPair> val_pairs;
  if (!p.validation_corpus.empty()) {
    const auto val = load(ctx, p.validation_corpus, Split::val);
    val_pairs = score_for_training(ctx, *source, val.dialogues, tc.max_train_turns);
  }
  if (train_pairs.empty()) throw EmptyCorpus();

  const auto result = train(std::move(train_pairs), std::move(val_pairs), tc);
  for (const auto& e : result.history) {
    ctx.out << "epoch " << e.epoch << " train_loss " << fmt(e.train_loss, 8) << " validation_loss "
            << fmt(e.validation_loss, 8) << " steps " << e.steps;
    if (e.skipped_degenerate > 0) ctx.out << " skipped_degenerate " << e.skipped_degenerate;
    ctx.out << "\n";
  }
  if (result.skipped_too_long > 0)
    ctx.err << "warning: " << result.skipped_too_long << " dialogues longer than n_max were skipped\n";
  ctx.out << "best epoch " << result.best_epoch << (result.early_stopped ? " (early stop)" : "") << "\n";

  const auto echo = provenance(ctx, {"params_out", "history_out"});
  write_text_file(p.params_out, params_to_text(result.params, echo, tc.seed));
  if (!p.history_out.empty()) write_text_file(p.history_out, history_to_text(result, echo));
  return 0;
}

int cmd_infer(Context& ctx) {
  const auto& p = ctx.cfg.paths;
  require_path(p.structures, "structures");
  const auto corpus = load(ctx, require_path(p.corpus, "corpus"), Split::test);
  const auto mode = ctx.cfg.infer_mode;
  std::optional<ModelParams> params;
  if (mode == InferMode::mutual) params = parse_params_text(read_text_file(require_path(p.params_in, "params_in")));
  const auto source = make_source(ctx);

  const auto& ds = corpus.dialogues;
  std::vector<std::optional<PredictedStructure>> slots(ds.size());
  parallel_for(ds.size(), ctx.cfg.workers, [&](std::size_t i) {
    const auto& d = ds[i];
    if (d.n() < 2) {
      slots[i] = PredictedStructure{d.id, d.n(), {}, Segmentation(d.n(), {})};
      return;
    }
    if (params && d.n() > params->n_max) return;
    const auto pair = score_dialogue(*source, d, ctx.cfg.scorer);
    switch (mode) {
      case InferMode::mutual: slots[i] = infer_structures(d.id, pair, *params, ctx.cfg.tiling); break;
      case InferMode::simple: slots[i] = infer_simple_incorporation(d.id, pair, ctx.cfg.tiling); break;
      case InferMode::direct: slots[i] = infer_direct(d.id, pair, ctx.cfg.tiling); break;
    }
  });

  std::vector<PredictedStructure> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (slots[i]) {
      out.push_back(std::move(*slots[i]));
    } else {
      ctx.err << "warning: skipping " << ds[i].id << ": " << DialogueTooLong(ds[i].n(), params->n_max).what()
              << "\n";
    }
  }
  write_text_file(p.structures, structures_to_text(out, provenance(ctx, {"structures"})));
  ctx.out << "inferred " << out.size() << " of " << ds.size() << " dialogues (" << to_string(mode) << ")\n";
  return 0;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_eval(Context& ctx) {
  const auto& p = ctx.cfg.paths;
  const auto gold = load(ctx, require_path(p.corpus, "corpus"), Split::test);
  const auto preds = parse_structures_text(read_text_file(require_path(p.structures, "structures")));
  const auto e = evaluate(gold, preds, ctx.cfg.eval);

  const bool has_seg = e.segmentation_dialogues > 0;
  const bool has_arcs = e.micro_arcs.gold > 0 || e.micro_arcs.predicted > 0 ||
                        gold.task != Task::topic_segmentation;
  const auto prf = e.micro_arcs.prf();

  json header = provenance(ctx, {"report"});
  header["format"] = kReportFormatName;
  header["version"] = 1;
  header["orientation"] = "segmentation scores are reported as 1-Pk and 1-WD, higher is better";
  header["averaging"] = {{"segmentation", "macro over dialogues with gold boundaries"},
                         {"arcs", "micro over all arcs"}};
  header["k_rule"] = ctx.cfg.eval.k ? json("fixed") : json("max(2, round(n / (2 * gold segments))), below n");
  std::string text = header.dump() + "\n";

  for (const auto& r : e.rows) {
    json row = {{"id", r.id}, {"n", r.n}};
    row["k"] = r.k ? json(*r.k) : json(nullptr);
    row["one_minus_pk"] = optional_number(r.pk ? std::optional<double>(1.0 - *r.pk) : std::nullopt);
    row["one_minus_wd"] = optional_number(r.wd ? std::optional<double>(1.0 - *r.wd) : std::nullopt);
    if (r.arcs) {
      const auto a = r.arcs->prf();
      row["arc_precision"] = a.precision;
      row["arc_recall"] = a.recall;
      row["arc_f1"] = a.f1;
      row["arcs_matched"] = r.arcs->matched;
      row["arcs_gold"] = r.arcs->gold;
      row["arcs_predicted"] = r.arcs->predicted;
    }
    row["leftward_gold"] = r.leftward_gold;
    text += row.dump() + "\n";
  }

  json agg = {{"dialogues", e.rows.size()}, {"segmentation_dialogues", e.segmentation_dialogues}};
  agg["macro_one_minus_pk"] = has_seg ? json(1.0 - e.macro_pk) : json(nullptr);
  agg["macro_one_minus_wd"] = has_seg ? json(1.0 - e.macro_wd) : json(nullptr);
  if (has_arcs) {
    agg["micro_arc_precision"] = prf.precision;
    agg["micro_arc_recall"] = prf.recall;
    agg["micro_arc_f1"] = prf.f1;
  }
  agg["leftward_gold"] = e.leftward_gold;
  text += json{{"aggregate", agg}}.dump() + "\n";
  if (!p.report.empty()) write_text_file(p.report, text);

  ctx.out << "dialogues " << e.rows.size() << "\n";
  if (has_seg)
    ctx.out << "1-Pk " << fmt(1.0 - e.macro_pk) << "  1-WD " << fmt(1.0 - e.macro_wd) << "  (macro, "
            << e.segmentation_dialogues << " dialogues)\n";
  if (has_arcs)
    ctx.out << "arc P " << fmt(prf.precision) << "  R " << fmt(prf.recall) << "  F1 " << fmt(prf.f1)
            << "  (micro)\n";
  if (e.leftward_gold > 0) ctx.out << "leftward gold arcs (unreachable) " << e.leftward_gold << "\n";
  return 0;
}

int cmd_synth(Context& ctx) {
  const auto& p = ctx.cfg.paths;
  require_path(p.corpus, "corpus");
  ctx.cfg.synth.validate();
  const auto syn = generate_synthetic(ctx.cfg.synth);
  const auto header = provenance(ctx, {"corpus", "topic_matrices", "rhetorical_matrices"});
  save_canonical(syn.corpus, p.corpus, header);
  if (!p.topic_matrices.empty() || !p.rhetorical_matrices.empty()) {
    std::vector<std::pair<std::string, ScoreMatrix>> topic, rhetorical;
    for (const auto& d : syn.corpus.dialogues) {
      const auto& m = syn.oracle.at(d.id);
      topic.emplace_back(d.id, m.topic);
      rhetorical.emplace_back(d.id, m.rhetorical);
    }
    if (!p.topic_matrices.empty())
      write_text_file(p.topic_matrices, matrices_to_text(MatrixKind::topic, topic, header));
    if (!p.rhetorical_matrices.empty())
      write_text_file(p.rhetorical_matrices, matrices_to_text(MatrixKind::rhetorical, rhetorical, header));
  }
  ctx.out << "generated " << syn.corpus.dialogues.size() << " dialogues\n";
  return 0;
}

int cmd_stats(Context& ctx) {
  const auto corpus = load(ctx, require_path(ctx.cfg.paths.corpus, "corpus"), Split::test);
  const auto s = corpus_stats(corpus);
  ctx.out << "dialogues " << s.dialogues << "\n";
  ctx.out << "avg utterances " << fmt(s.avg_utterances, 2) << "\n";
  ctx.out << "avg relations " << fmt(s.avg_relations, 2) << "\n";
  ctx.out << "avg topic shifts " << fmt(s.avg_topic_shifts, 2) << "\n";
  if (!ctx.cfg.stats_reference) return 0;

  const auto* ref = find_reference(*ctx.cfg.stats_reference);
  if (!ref) throw InvalidArgument("unknown reference dataset: " + *ctx.cfg.stats_reference);
  auto line = [&](const char* name, double loaded, std::optional<double> published) {
    if (!published) return;
    const bool ok = std::abs(loaded - *published) <= ref->tolerance + 1e-12;
    ctx.out << ref->name << " " << name << " loaded " << fmt(loaded, 2) << " published " << fmt(*published, 1)
            << " tolerance " << fmt(ref->tolerance, 1) << (ok ? " ok" : " OUTSIDE") << "\n";
  };
  line("avg utterances", s.avg_utterances, ref->avg_utterances);
  line("avg relations", s.avg_relations, ref->avg_relations);
  line("avg topic shifts", s.avg_topic_shifts, ref->avg_topic_shifts);
  return 0;
}

}  // namespace

std::string version() { return DIALSTRUCT_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Mutual learning of topic and rhetorical structure for dialogues", "dialstruct"};
  cli.set_version_flag("--version", version());
  cli.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool print_config = false;

  const std::map<std::string, std::pair<std::string, int (*)(Context&)>> commands = {
      {"score", {"Score a corpus into topic and rhetorical matrix files", cmd_score}},
      {"train", {"Train mutual-learning parameters", cmd_train}},
      {"infer", {"Decode discourse trees and topic segments", cmd_infer}},
      {"eval", {"Score predicted structures against gold", cmd_eval}},
      {"synth", {"Generate a synthetic corpus with planted structure", cmd_synth}},
      {"stats", {"Report corpus statistics", cmd_stats}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = cli.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--set", overrides, "Override a config field: dotted.key=value")->take_all();
    sub->add_option("--seed", seed, "Override train.seed and synth.seed");
    sub->add_flag("--print-config", print_config, "Print the effective config and exit");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = cli.get_subcommands();
    out << (subs.empty() ? cli.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << cli.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const auto selected = cli.get_subcommands();
  const std::string command = selected.front()->get_name();

  try {
    json config = default_config();
    if (!config_path.empty()) {
      const auto user = json::parse(read_text_file(config_path));
      merge_config(config, user);
    }
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) {
      config["train"]["seed"] = *seed;
      config["synth"]["seed"] = *seed;
    }
    if (print_config) {
      out << config.dump(2) << "\n";
      return 0;
    }
    Context ctx{command, config, parse_config(config), out, err};
    return commands.at(command).second(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace dialstruct::app
