#include <doctest.h>

#include <random>

#include "dialstruct/error.hpp"
#include "dialstruct/formats.hpp"
#include "dialstruct/mutual.hpp"
#include "oracles/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace dialstruct;
using testing_support::TempDir;

TEST_CASE("embedding files round trip bit-exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<UtteranceEmbeddings> es;
  for (int i = 0; i < 3; ++i) {
    UtteranceEmbeddings e;
    e.dialogue_id = "d" + std::to_string(i);
    e.kind = i == 2 ? EmbeddingKind::topic_coherence : EmbeddingKind::rhetorical;
    e.vectors.resize(3 + i, 5);
    for (Eigen::Index r = 0; r < e.vectors.rows(); ++r)
      for (Eigen::Index c = 0; c < 5; ++c) e.vectors(r, c) = g(rng);
    es.push_back(e);
  }
  const auto text = embeddings_to_text(es, {{"encoder", "toy"}});
  const auto back = parse_embeddings_text(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].dialogue_id == es[i].dialogue_id);
    CHECK(back[i].kind == es[i].kind);
    CHECK(back[i].vectors == es[i].vectors);
  }
  CHECK(embeddings_to_text(back, {{"encoder", "toy"}}) == text);
}

TEST_CASE("embedding file validation") {
  const std::string header = "{\"format\":\"dialstruct.embeddings\",\"version\":1}\n";
  CHECK_THROWS_AS(parse_embeddings_text(header + R"({"id":"a","kind":"rhetorical","n":2,"d":2,"data":[1,2,3]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_embeddings_text(header + R"({"id":"a","kind":"syntax","n":1,"d":1,"data":[1]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_embeddings_text(header + R"({"id":"a","kind":"rhetorical","n":1,"d":0,"data":[]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_embeddings_text(R"({"format":"dialstruct.matrices","version":1})"), ParseError);
  CHECK_THROWS_AS(parse_embeddings_text(""), ParseError);
}

TEST_CASE("exporter-style files load cleanly and duplicated utterances score 1.0") {
  // What the embedding exporter writes for a 3-dialogue toy corpus: one file
  // per channel, header with the recipe, rows of identical utterances equal.
  const std::string text =
      "{\"format\":\"dialstruct.embeddings\",\"version\":1,\"encoder\":\"toy-16\",\"channel\":\"rhetorical\"}\n"
      "{\"id\":\"t1\",\"kind\":\"rhetorical\",\"n\":3,\"d\":4,\"data\":[0.1,0.2,0.3,0.4,0.1,0.2,0.3,0.4,-1,0,0.5,2]}\n"
      "{\"id\":\"t2\",\"kind\":\"rhetorical\",\"n\":2,\"d\":4,\"data\":[1,0,0,0,0,1,0,0]}\n"
      "{\"id\":\"t3\",\"kind\":\"rhetorical\",\"n\":2,\"d\":4,\"data\":[3,3,3,3,3,3,3,3]}\n";
  const auto es = parse_embeddings_text(text);
  REQUIRE(es.size() == 3);
  CHECK(cosine_matrix(es[0])(0, 1) == doctest::Approx(1.0));
  CHECK(cosine_matrix(es[1])(0, 1) == doctest::Approx(0.5));
  CHECK(cosine_matrix(es[2])(0, 1) == doctest::Approx(1.0));

  const std::string matrices =
      "{\"format\":\"dialstruct.matrices\",\"version\":1,\"kind\":\"rhetorical\",\"aggregation\":\"mean\"}\n"
      "{\"id\":\"t2\",\"n\":2,\"upper\":[0.7]}\n"
      "{\"id\":\"t1\",\"n\":3,\"upper\":[0.0,1.0,0.25]}\n";
  const auto mf = parse_matrices_text(matrices);
  CHECK(mf.kind == MatrixKind::rhetorical);
  CHECK(mf.order == std::vector<std::string>{"t2", "t1"});
  const auto& t1 = mf.matrices.at("t1");
  CHECK(normalize(t1, ScorerConfig{}) == t1);
}

TEST_CASE("matrix files round trip") {
  std::mt19937_64 rng(2);
  std::vector<std::pair<std::string, ScoreMatrix>> ms;
  for (std::size_t n = 2; n <= 9; ++n) ms.emplace_back("m" + std::to_string(n), oracle::random_upper(rng, n));
  const auto text = matrices_to_text(MatrixKind::topic, ms);
  const auto back = parse_matrices_text(text);
  CHECK(back.kind == MatrixKind::topic);
  REQUIRE(back.order.size() == ms.size());
  for (const auto& [id, m] : ms) CHECK(back.matrices.at(id) == m);
  CHECK(back.header.at("format") == kMatrixFormatName);

  const std::string header = "{\"format\":\"dialstruct.matrices\",\"version\":1,\"kind\":\"topic\"}\n";
  try {
    parse_matrices_text(header + "{\"id\":\"x\",\"n\":3,\"upper\":[1,2]}\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_matrices_text("{\"format\":\"dialstruct.matrices\",\"version\":1,\"kind\":\"x\"}\n"),
                  ParseError);
}

TEST_CASE("params files round trip and validate") {
  TrainConfig cfg;
  cfg.n_max = 6;
  cfg.max_train_turns = 6;
  auto p = init_params(cfg);
  p.w_col[0] = 0.1 + 0.2;  // not exactly representable in short decimal
  const nlohmann::json echo = {{"train", {{"learning_rate", 3e-6}}}};
  const auto text = params_to_text(p, echo, 42);
  CHECK(parse_params_text(text) == p);
  CHECK(params_to_text(parse_params_text(text), echo, 42) == text);

  auto v = ModelParams::zeros(3, WeightMode::vector);
  v.w_row = {1.0, -2.5, 1e-300};
  CHECK(parse_params_text(params_to_text(v, {}, 1)) == v);

  auto j = nlohmann::json::parse(text);
  j["w_col"] = {1.0, 2.0};
  CHECK_THROWS_AS(parse_params_text(j.dump()), ParseError);
  j = nlohmann::json::parse(text);
  j["w_left"] = {1.0};
  CHECK_THROWS_AS(parse_params_text(j.dump()), ParseError);
  j = nlohmann::json::parse(text);
  j["format"] = "dialstruct.structures";
  CHECK_THROWS_AS(parse_params_text(j.dump()), ParseError);
  CHECK_THROWS_AS(parse_params_text("not json"), ParseError);
}

TEST_CASE("structures files round trip") {
  std::vector<PredictedStructure> ss;
  ss.push_back({"a", 4, {{1, 2}, {2, 3}, {1, 4}}, Segmentation(4, {2})});
  ss.push_back({"b", 2, {{1, 2}}, Segmentation(2, {})});
  const auto back = parse_structures_text(structures_to_text(ss));
  REQUIRE(back.size() == 2);
  CHECK(back[0].arcs == ss[0].arcs);
  CHECK(back[0].boundaries == ss[0].boundaries);
  CHECK(back[1].n == 2);

  const std::string header = "{\"format\":\"dialstruct.structures\",\"version\":1}\n";
  CHECK_THROWS_AS(parse_structures_text(header + R"({"id":"x","n":2,"arcs":[[1,3]],"boundaries":[]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_structures_text(header + R"({"id":"x","n":2,"arcs":[[1,2]],"boundaries":[2]})"),
                  ParseError);
}

TEST_CASE("write_text_file replaces the target atomically") {
  TempDir dir;
  const auto target = dir / "sub" / "out.txt";
  write_text_file(target, "first");
  write_text_file(target, "second");
  CHECK(read_text_file(target) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "sub" / "out.txt.tmp"));
  CHECK_THROWS_AS(read_text_file(dir / "missing"), Error);
}
