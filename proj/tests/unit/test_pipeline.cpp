#include <doctest.h>

#include <random>

#include "dialstruct/error.hpp"
#include "dialstruct/pipeline.hpp"
#include "oracles/oracles.hpp"

using namespace dialstruct;

namespace {

CorpusBundle gold_bundle() {
  CorpusBundle c;
  c.task = Task::both;
  Dialogue d;
  d.id = "g";
  for (std::size_t i = 1; i <= 4; ++i) d.utterances.push_back({i, "A", "u" + std::to_string(i)});
  d.gold_arcs = std::vector<LabeledArc>{{{1, 2}, ""}, {{2, 3}, ""}, {{3, 4}, ""}};
  d.gold_boundaries = Segmentation(4, {2});
  c.dialogues.push_back(d);
  return c;
}

}  // namespace

TEST_CASE("identity parameters decode exactly like simple incorporation") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + std::size_t(trial % 20);
    const MatrixPair pair{oracle::random_upper(rng, n), oracle::random_upper(rng, n)};
    const auto a = infer_structures("x", pair, ModelParams::identity(24), {});
    const auto b = infer_simple_incorporation("x", pair, {});
    CHECK(a.arcs == b.arcs);
    CHECK(a.boundaries == b.boundaries);
  }
}

TEST_CASE("inference rejects dialogues longer than the parameters") {
  const MatrixPair pair{ScoreMatrix::constant(6, 0.5), ScoreMatrix::constant(6, 0.5)};
  CHECK_THROWS_AS(infer_structures("x", pair, ModelParams::identity(5), {}), DialogueTooLong);
}

TEST_CASE("a two-utterance dialogue always gets the single arc") {
  const std::vector<double> v{0.3};
  const MatrixPair pair{ScoreMatrix::from_upper(2, v), ScoreMatrix::from_upper(2, v)};
  const auto s = infer_structures("two", pair, ModelParams::identity(4), {});
  CHECK(s.arcs == std::set<Arc>{{1, 2}});
  CHECK(s.boundaries.n() == 2);
}

TEST_CASE("direct decoding recovers noiseless planted structures") {
  SyntheticSpec spec;
  spec.noise_sigma = 0.0;
  spec.n_dialogues = 30;
  const auto syn = generate_synthetic(spec);
  std::vector<PredictedStructure> preds;
  for (const auto& d : syn.corpus.dialogues) preds.push_back(infer_direct(d.id, syn.oracle.at(d.id), {}));
  const auto e = evaluate(syn.corpus, preds, {});
  CHECK(e.macro_pk == 0.0);
  CHECK(e.macro_wd == 0.0);
  CHECK(e.micro_arcs.prf().f1 == 1.0);
  CHECK(e.segmentation_dialogues == 30);
}

TEST_CASE("evaluate joins by id and aggregates") {
  const auto gold = gold_bundle();
  std::vector<PredictedStructure> preds{{"g", 4, {{1, 2}, {1, 3}, {3, 4}}, Segmentation(4, {})}};
  const auto e = evaluate(gold, preds, {SegEvalConfig{1}});
  REQUIRE(e.rows.size() == 1);
  CHECK(*e.rows[0].k == 1);
  CHECK(*e.rows[0].pk == 1.0 / 3.0);
  CHECK(e.macro_wd == 1.0 / 3.0);
  CHECK(e.micro_arcs.matched == 2);
  CHECK(e.micro_arcs.prf().f1 == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(evaluate(gold, {}, {}), InvalidArgument);
  std::vector<PredictedStructure> wrong_id{{"h", 4, {}, Segmentation(4, {})}};
  CHECK_THROWS_AS(evaluate(gold, wrong_id, {}), InvalidArgument);
  std::vector<PredictedStructure> wrong_n{{"g", 3, {}, Segmentation(3, {})}};
  CHECK_THROWS_AS(evaluate(gold, wrong_n, {}), DimensionMismatch);
  auto dup = preds;
  dup.push_back(preds[0]);
  CHECK_THROWS_AS(evaluate(gold, dup, {}), InvalidArgument);
}

TEST_CASE("leftward gold arcs are counted as unreachable") {
  auto gold = gold_bundle();
  gold.dialogues[0].gold_arcs->push_back({{4, 2}, "Comment"});
  std::vector<PredictedStructure> preds{{"g", 4, {{1, 2}, {2, 3}, {3, 4}}, Segmentation(4, {2})}};
  const auto e = evaluate(gold, preds, {});
  CHECK(e.leftward_gold == 1);
  CHECK(e.micro_arcs.prf().recall == 0.75);
  CHECK(e.macro_pk == 0.0);
}
