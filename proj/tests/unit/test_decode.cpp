#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "dialstruct/decode.hpp"
#include "dialstruct/error.hpp"
#include "oracles/oracles.hpp"

using namespace dialstruct;

namespace {

// Within-block `in`, cross-block `out`; `blocks` lists block lengths.
ScoreMatrix blocks(const std::vector<std::size_t>& lengths, double in, double out) {
  std::vector<std::size_t> topic;
  for (std::size_t b = 0; b < lengths.size(); ++b) topic.insert(topic.end(), lengths[b], b);
  const auto n = static_cast<Eigen::Index>(topic.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = topic[std::size_t(i)] == topic[std::size_t(j)] ? in : out;
  return ScoreMatrix(std::move(d));
}

ScoreMatrix affine(const ScoreMatrix& m, double scale, double shift) {
  Eigen::MatrixXd d = (scale * m.dense().array() + shift).matrix();
  return ScoreMatrix::masked(d);
}

}  // namespace

TEST_CASE("gap_scores are block means across each gap") {
  const std::vector<double> one{0.8};
  CHECK(gap_scores(ScoreMatrix::from_upper(2, one), {1}) == std::vector<double>{0.8});

  // n=4: (1,2)=0.9 (1,3)=0.1 (1,4)=0.2 (2,3)=0.3 (2,4)=0.4 (3,4)=0.9
  const std::vector<double> four{0.9, 0.1, 0.2, 0.3, 0.4, 0.9};
  const auto g = gap_scores(ScoreMatrix::from_upper(4, four), {2});
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(0.25));
  CHECK(g[0] == doctest::Approx((0.9 + 0.1) / 2));  // p in [1,1], q in [2,3]
  CHECK(g[2] == doctest::Approx((0.4 + 0.9) / 2));  // p in [2,3], q in [4,4]

  for (double x : gap_scores(ScoreMatrix::constant(7, 0.3), {3})) CHECK(x == doctest::Approx(0.3));
}

TEST_CASE("depth_scores climb outward while scores do not decrease") {
  const auto d = depth_scores({0.9, 0.2, 0.9});
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(1.4));
  CHECK(d[2] == doctest::Approx(0.0));

  // Increasing scores: nothing to climb on the left, so depth is the rise to the right end.
  const auto inc = depth_scores({0.1, 0.2, 0.3, 0.4});
  CHECK(inc[0] == doctest::Approx(0.3));
  CHECK(inc[2] == doctest::Approx(0.1));
  CHECK(inc[3] == 0.0);
  for (double x : depth_scores({0.5, 0.5, 0.5})) CHECK(x == 0.0);

  // The climb continues across equal scores.
  const auto p = depth_scores({0.9, 0.9, 0.3, 0.6, 0.8});
  CHECK(p[2] == doctest::Approx(0.6 + 0.5));
}

TEST_CASE("texttiling fixtures") {
  CHECK(texttiling(ScoreMatrix::constant(6, 0.4), {}).boundaries().empty());

  // Gap scores [0.9, 0.2, 0.9] under w=1: depths [0, 1.4, 0], threshold ~0.1367.
  const std::vector<double> four{0.9, 0.0, 0.0, 0.2, 0.0, 0.9};
  TilingConfig w1;
  w1.window = 1;
  CHECK(texttiling(ScoreMatrix::from_upper(4, four), w1).boundaries() == std::set<std::size_t>{2});

  CHECK(texttiling(blocks({3, 3}, 0.9, 0.1), {}).boundaries() == std::set<std::size_t>{3});
}

TEST_CASE("texttiling recovers planted blocks at several windows") {
  for (std::size_t w = 1; w <= 3; ++w) {
    TilingConfig cfg;
    cfg.window = w;
    CHECK(texttiling(blocks({4, 4, 4}, 0.9, 0.1), cfg).boundaries() == std::set<std::size_t>{4, 8});
    CHECK(texttiling(blocks({3, 5}, 0.7, 0.2), cfg).boundaries() == std::set<std::size_t>{3});
  }
}

TEST_CASE("the planted gap has the unique maximal depth in a two-block matrix") {
  for (std::size_t n = 4; n <= 12; ++n)
    for (std::size_t split = 2; split + 2 <= n; ++split)
      for (std::size_t w = 1; w <= 4; ++w) {
        TilingConfig cfg;
        cfg.window = w;
        const auto depth = depth_scores(gap_scores(blocks({split, n - split}, 0.8, 0.3), cfg));
        const auto top = std::max_element(depth.begin(), depth.end());
        REQUIRE(std::size_t(top - depth.begin()) == split - 1);
        REQUIRE(std::count(depth.begin(), depth.end(), *top) == 1);
      }
}

TEST_CASE("texttiling is invariant under positive affine maps of the common matrix") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_upper(rng, 5 + std::size_t(trial % 10));
    const auto base = texttiling(m, {});
    REQUIRE(base.boundaries().size() <= m.n() - 1);
    // Powers of two keep the arithmetic exact.
    CHECK(texttiling(affine(m, 4.0, 0.0), {}) == base);
    CHECK(texttiling(affine(m, 1.0, 0.5), {}) == base);
  }
}

TEST_CASE("fixed threshold and smoothing options") {
  const auto m = blocks({3, 3, 3}, 0.9, 0.1);
  TilingConfig cfg;
  cfg.policy = ThresholdPolicy::fixed;
  cfg.fixed_threshold = 0.5;
  CHECK(texttiling(m, cfg).boundaries() == std::set<std::size_t>{3, 6});
  cfg.fixed_threshold = 0.0;
  CHECK(texttiling(m, cfg).boundaries() == std::set<std::size_t>{3, 6});

  CHECK(smooth({1.0, 2.0, 3.0}, 3) == std::vector<double>{1.5, 2.0, 2.5});
  CHECK(smooth({1.0, 2.0}, 1) == std::vector<double>{1.0, 2.0});

  cfg.policy = ThresholdPolicy::fixed;
  cfg.fixed_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  TilingConfig zero;
  zero.window = 0;
  CHECK_THROWS_AS(gap_scores(m, zero), InvalidArgument);
}

TEST_CASE("eisner fixtures") {
  const std::vector<double> one{-3.0};
  CHECK(eisner(ScoreMatrix::from_upper(2, one)).arcs() == std::set<Arc>{{1, 2}});

  const std::vector<double> three{0.9, 0.8, 0.1};
  const auto t = eisner(ScoreMatrix::from_upper(3, three));
  CHECK(t.arcs() == std::set<Arc>{{1, 2}, {1, 3}});
  CHECK(tree_score(ScoreMatrix::from_upper(3, three), t) == doctest::Approx(1.7));
}

TEST_CASE("eisner matches brute force on every size up to six") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + std::size_t(trial % 5);
    const auto m = oracle::random_upper(rng, n, -1.0, 1.0);
    const auto tree = eisner(m);
    REQUIRE_FALSE(validate_tree(n, tree.arcs()).has_value());
    REQUIRE(tree_score(m, tree) == doctest::Approx(oracle::brute_force_best(m)).epsilon(1e-12));
  }
}

TEST_CASE("the oracle enumerates the Catalan number of trees") {
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42, 132};
  for (std::size_t n = 2; n <= 7; ++n) {
    std::size_t count = 0;
    oracle::enumerate_trees(n, [&](const std::vector<std::size_t>&) { ++count; });
    CHECK(count == catalan[n - 1]);
  }
}

TEST_CASE("eisner output is stable under positive affine maps") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_upper(rng, 3 + std::size_t(trial % 12));
    const auto base = eisner(m);
    // Adding a constant to every arc adds (n-1) times it to every tree.
    CHECK(eisner(affine(m, 2.0, 0.25)) == base);
  }
}

TEST_CASE("eisner ties resolve deterministically toward short arcs") {
  // All-equal scores: every tree ties; the decoder returns the chain.
  const auto t = eisner(ScoreMatrix::constant(5, 0.5));
  CHECK(t.arcs() == std::set<Arc>{{1, 2}, {2, 3}, {3, 4}, {4, 5}});
  CHECK(eisner(ScoreMatrix::constant(5, 0.5)) == t);
}

TEST_CASE("eisner recovers large planted trees") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + std::size_t(trial % 15);
    // Random projective tree: attach each node to a node on the right spine.
    std::vector<std::size_t> spine{1};
    std::set<Arc> arcs;
    for (std::size_t v = 2; v <= n; ++v) {
      std::uniform_int_distribution<std::size_t> pick(0, spine.size() - 1);
      const std::size_t keep = pick(rng);
      spine.resize(keep + 1);
      arcs.insert({spine.back(), v});
      spine.push_back(v);
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(Eigen::Index(n), Eigen::Index(n), 0.1);
    for (const Arc& a : arcs) d(Eigen::Index(a.head - 1), Eigen::Index(a.dependent - 1)) = 0.9;
    CHECK(eisner(ScoreMatrix::masked(d)).arcs() == arcs);
  }
}
