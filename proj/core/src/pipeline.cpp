#include "dialstruct/pipeline.hpp"

#include <map>

#include "dialstruct/error.hpp"

namespace dialstruct {

PredictedStructure decode_common(const std::string& id, const ScoreMatrix& common, const TilingConfig& tiling) {
  PredictedStructure out;
  out.id = id;
  out.n = common.n();
  out.arcs = eisner(common).arcs();
  out.boundaries = texttiling(common, tiling);
  return out;
}

PredictedStructure infer_structures(const std::string& id, const MatrixPair& pair, const ModelParams& params,
                                    const TilingConfig& tiling) {
  return decode_common(id, common_matrix(fuse(pair.topic, pair.rhetorical, params)), tiling);
}

PredictedStructure infer_simple_incorporation(const std::string& id, const MatrixPair& pair,
                                              const TilingConfig& tiling) {
  return decode_common(id, simple_incorporation(pair.topic, pair.rhetorical), tiling);
}

PredictedStructure infer_direct(const std::string& id, const MatrixPair& pair, const TilingConfig& tiling) {
  PredictedStructure out;
  out.id = id;
  out.n = pair.topic.n();
  out.arcs = eisner(pair.rhetorical).arcs();
  out.boundaries = texttiling(pair.topic, tiling);
  return out;
}

EvalSummary evaluate(const CorpusBundle& gold, const std::vector<PredictedStructure>& predictions,
                     const SegEvalConfig& seg) {
  std::map<std::string, const PredictedStructure*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) throw InvalidArgument("duplicate prediction id " + p.id);
  }
  if (by_id.size() != gold.dialogues.size()) {
    throw InvalidArgument("prediction count " + std::to_string(by_id.size()) + " does not match gold count " +
                          std::to_string(gold.dialogues.size()));
  }
  EvalSummary out;
  double pk_sum = 0.0, wd_sum = 0.0;
  for (const auto& d : gold.dialogues) {
    auto it = by_id.find(d.id);
    if (it == by_id.end()) throw InvalidArgument("no prediction for dialogue " + d.id);
    const PredictedStructure& p = *it->second;
    if (p.n != d.n()) throw DimensionMismatch(d.n(), p.n);
    DialogueScores row;
    row.id = d.id;
    row.n = d.n();
    if (d.gold_boundaries && d.n() >= 2) {
      row.k = resolve_window(*d.gold_boundaries, seg);
      SegEvalConfig fixed{row.k};
      row.pk = pk(*d.gold_boundaries, p.boundaries, fixed);
      row.wd = window_diff(*d.gold_boundaries, p.boundaries, fixed);
      pk_sum += *row.pk;
      wd_sum += *row.wd;
      ++out.segmentation_dialogues;
    }
    if (d.gold_arcs) {
      const auto gold_arcs = d.gold_arc_set();
      row.arcs = arc_counts(gold_arcs, p.arcs);
      for (const Arc& a : gold_arcs)
        if (!a.rightward()) ++row.leftward_gold;
      out.micro_arcs += *row.arcs;
      out.leftward_gold += row.leftward_gold;
    }
    out.rows.push_back(std::move(row));
  }
  if (out.segmentation_dialogues > 0) {
    out.macro_pk = pk_sum / static_cast<double>(out.segmentation_dialogues);
    out.macro_wd = wd_sum / static_cast<double>(out.segmentation_dialogues);
  }
  return out;
}

}  // namespace dialstruct
