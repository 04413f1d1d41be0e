#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "dialstruct/error.hpp"
#include "dialstruct/score_matrix.hpp"
#include "dialstruct/types.hpp"

using namespace dialstruct;

namespace {

ScoreMatrix three(double a12, double a13, double a23) {
  const std::vector<double> v{a12, a13, a23};
  return ScoreMatrix::from_upper(3, v);
}

}  // namespace

TEST_CASE("upper_entries walks the strict upper triangle row by row") {
  const std::vector<double> one{0.5};
  CHECK(upper_entries(ScoreMatrix::from_upper(2, one)) == std::vector<double>{0.5});
  CHECK(upper_entries(three(0.2, 0.4, 0.6)) == std::vector<double>{0.2, 0.4, 0.6});
  CHECK(upper_entries(ScoreMatrix(3)) == std::vector<double>{0.0, 0.0, 0.0});

  const auto m = ScoreMatrix::constant(6, 1.0);
  CHECK(upper_entries(m).size() == 15);
  CHECK(m.upper_size() == 15);
}

TEST_CASE("mat_stats uses population statistics over upper entries only") {
  const auto s = mat_stats(three(0.1, 0.3, 0.5));
  CHECK(s.mean == doctest::Approx(0.3));
  CHECK(s.std == doctest::Approx(0.163299).epsilon(1e-5));

  const auto c = mat_stats(ScoreMatrix::constant(5, 0.7));
  CHECK(c.mean == doctest::Approx(0.7));
  CHECK(c.std == doctest::Approx(0.0));

  const std::vector<double> one{0.5};
  const auto single = mat_stats(ScoreMatrix::from_upper(2, one));
  CHECK(single.mean == 0.5);
  CHECK(single.std == 0.0);
}

TEST_CASE("mat_stats is invariant to permuting and repeating entries") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> base(6);
  for (auto& x : base) x = u(rng);
  const auto a = mat_stats(ScoreMatrix::from_upper(4, base));

  auto shuffled = base;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto b = mat_stats(ScoreMatrix::from_upper(4, shuffled));
  CHECK(a.mean == doctest::Approx(b.mean));
  CHECK(a.std == doctest::Approx(b.std));

  // Two copies of the same multiset.
  std::vector<double> twice{base[0], base[1], base[2], base[0], base[1], base[2]};
  const std::vector<double> once{base[0], base[1], base[2]};
  const auto c = mat_stats(ScoreMatrix::from_upper(4, twice));
  const auto d = mat_stats(ScoreMatrix::from_upper(3, once));
  CHECK(c.mean == doctest::Approx(d.mean));
  CHECK(c.std == doctest::Approx(d.std));
}

TEST_CASE("ScoreMatrix rejects data outside the strict upper triangle") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(1, 1) = 0.1;
  CHECK_THROWS_AS(ScoreMatrix{d}, InvalidArgument);
  d.setZero();
  d(2, 0) = 0.1;
  CHECK_THROWS_AS(ScoreMatrix{d}, InvalidArgument);
  d.setZero();
  d(0, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScoreMatrix{d}, InvalidArgument);
  CHECK_THROWS_AS(ScoreMatrix{Eigen::MatrixXd::Zero(2, 3)}, DimensionMismatch);

  const auto m = ScoreMatrix::masked(Eigen::MatrixXd::Ones(4, 4));
  CHECK(is_strictly_upper(m.dense()));
  CHECK(m(0, 3) == 1.0);
  CHECK(m(3, 0) == 0.0);
  CHECK(m(2, 2) == 0.0);

  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(ScoreMatrix::from_upper(3, wrong), DimensionMismatch);
}

TEST_CASE("with replaces one upper entry and leaves the rest") {
  const auto m = three(0.2, 0.4, 0.6).with(0, 2, 0.9);
  CHECK(upper_entries(m) == std::vector<double>{0.2, 0.9, 0.6});
  CHECK_THROWS(three(0.2, 0.4, 0.6).with(2, 1, 0.3));
}

TEST_CASE("Segmentation validates gap indices") {
  const Segmentation s(5, {2, 4});
  CHECK(s.segment_count() == 3);
  CHECK(s.segment_of(1) == 0);
  CHECK(s.segment_of(2) == 0);
  CHECK(s.segment_of(3) == 1);
  CHECK(s.segment_of(5) == 2);
  CHECK_THROWS_AS(Segmentation(5, {0}), IndexOutOfRange);
  CHECK_THROWS_AS(Segmentation(5, {5}), IndexOutOfRange);
  CHECK(Segmentation::single_topic(4).boundaries().empty());
}

TEST_CASE("validate_tree enforces root, single heads, rightward arcs and projectivity") {
  CHECK_FALSE(validate_tree(3, {{1, 2}, {1, 3}}).has_value());
  CHECK_FALSE(validate_tree(4, {{1, 2}, {2, 3}, {1, 4}}).has_value());
  CHECK(validate_tree(3, {{1, 2}}).has_value());                  // too few arcs
  CHECK(validate_tree(3, {{1, 2}, {2, 1}}).has_value());          // root is a dependent
  CHECK(validate_tree(3, {{1, 3}, {2, 3}}).has_value());          // two heads
  CHECK(validate_tree(4, {{1, 3}, {2, 4}, {1, 2}}).has_value());  // (1,3) crosses (2,4)
  CHECK(validate_tree(3, {{1, 2}, {1, 4}}).has_value());          // out of range
  CHECK_THROWS_AS(DependencyStructure(3, {{1, 2}}), InvalidArgument);

  const DependencyStructure t(4, {{1, 2}, {2, 3}, {1, 4}});
  CHECK(t.heads() == std::vector<std::size_t>{0, 0, 1, 2, 1});
}

TEST_CASE("arcs_cross detects interleaved spans only") {
  CHECK(arcs_cross({1, 3}, {2, 4}));
  CHECK(arcs_cross({2, 4}, {1, 3}));
  CHECK_FALSE(arcs_cross({1, 4}, {2, 3}));
  CHECK_FALSE(arcs_cross({1, 2}, {2, 3}));
  CHECK_FALSE(arcs_cross({1, 3}, {3, 4}));
}

TEST_CASE("validate_dialogue checks indices, text and gold ranges") {
  Dialogue d{"d", {{1, "A", "hi"}, {2, "B", "yo"}}, std::nullopt, std::nullopt};
  CHECK_NOTHROW(validate_dialogue(d));
  d.utterances[1].text = "   ";
  CHECK_THROWS(validate_dialogue(d));
  d.utterances[1].text = "yo";
  d.utterances[1].index = 3;
  CHECK_THROWS(validate_dialogue(d));
  d.utterances[1].index = 2;
  d.gold_arcs = std::vector<LabeledArc>{{{1, 3}, "QAP"}};
  CHECK_THROWS(validate_dialogue(d));
  // Gold arcs may point left; they are still in range.
  d.gold_arcs = std::vector<LabeledArc>{{{2, 1}, "QAP"}};
  CHECK_NOTHROW(validate_dialogue(d));
}

TEST_CASE("ModelParams factories size storage by mode") {
  const auto z = ModelParams::zeros(5);
  CHECK(z.w_col.size() == 1);
  CHECK(z.w_left.rows() == 5);
  CHECK(z.parameter_count() == 2 + 50);

  const auto v = ModelParams::zeros(5, WeightMode::vector);
  CHECK(v.w_col.size() == 5);
  CHECK(v.parameter_count() == 10 + 50);

  const auto id = ModelParams::identity(4);
  CHECK(id.w_left.isIdentity());
  CHECK(id.w_right.isIdentity());
  CHECK(id.w_col[0] == 0.0);
  CHECK(id.all_finite());
}
