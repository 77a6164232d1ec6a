#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tgci/error.hpp"
#include "tgci/perturbation.hpp"

namespace tgci {
namespace {

Dataset segment(const std::string& bases) {
  std::vector<Feature> features;
  for (int p = -38; p <= -30; ++p) features.push_back({"p" + std::to_string(p), {"a", "g", "c", "t"}});
  Schema schema(features, {"+", "-"}, std::string("+"));
  Example e{"seg", 0, {}};
  for (char c : bases) e.values.push_back(*schema.feature(e.values.size()).code_of(std::string(1, c)));
  return Dataset(schema, {e});
}

TEST(IntendedDisjunct, PicksTheBestPartialMatch) {
  const Theory m35 = fragment(parse_theory(testing::promoter_theory_text()), "minus_35");
  const TheoryNode& group = m35.concepts()[0].root;
  const Dataset fig14 = segment("gcttgcaat");
  EXPECT_EQ(intended_disjunct(group, fig14.example(0), fig14.schema()), 1u);
  // p-37..p-32 = c t t g a c satisfies the first rule exactly.
  const Dataset exact = segment("gcttgacgg");
  EXPECT_EQ(intended_disjunct(group, exact.example(0), exact.schema()), 0u);
  EXPECT_THROW(intended_disjunct(group.children()[0], exact.example(0), exact.schema()), UsageError);
}

TEST(IntendedDisjunct, EqualsArgmaxOverChildren) {
  const Dataset all = testing::enumerate_binary(6, [](const std::vector<int>&) { return true; });
  std::mt19937_64 gen(4);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto toy = testing::random_toy_theory(gen, 6, 3, false);
    if (toy.root.op != testing::ToyNode::Op::Or) continue;
    const Theory t = parse_theory(toy.dsl);
    for (const Example& e : all.examples()) {
      std::vector<int> bits(e.values.begin(), e.values.end());
      std::size_t best = 0;
      double top = -5;
      for (std::size_t k = 0; k < toy.root.kids.size(); ++k) {
        const double v = testing::toy_evaluate(toy.root.kids[k], bits, false).top;
        if (v > top) {
          top = v;
          best = k;
        }
      }
      EXPECT_EQ(intended_disjunct(t.concepts()[0].root, e, all.schema()), best);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Perturb, RateZeroIsIdentity) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(2, 20, 0.6));
  const Theory t = parse_theory(testing::promoter_theory_text());
  for (Direction dir : {Direction::FewerMatches, Direction::FewerMismatches}) {
    EXPECT_EQ(perturb(d, t, {dir, 0.0, 5, 0}, ConflictPolicy::LeaveUntouched), d);
  }
}

TEST(Perturb, FullRateFewerMismatchesSatisfiesTheTheory) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(2, 20, 0.3));
  const Theory contact = fragment(parse_theory(testing::promoter_theory_text()), "contact");
  const Dataset p = perturb(d, contact, {Direction::FewerMismatches, 1.0, 9, 0});
  const std::size_t pos = d.schema().positive_index();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double top = boolean_interpret(contact.concepts()[0].root, p.example(i), p.schema()).top;
    if (p.example(i).label == pos) EXPECT_EQ(top, 1.0);
    else EXPECT_EQ(p.example(i), d.example(i));
  }
}

TEST(Perturb, ConflictsAndNegationAreReported) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(2, 40, 0.6));
  const Theory full = parse_theory(testing::promoter_theory_text());
  // Some positive example prefers conformation rule 1 together with a
  // minus_10 rule that tests p-8 or p-7 differently.
  bool conflicted = false;
  for (const Example& e : d.examples()) {
    if (!expected_values(full.concepts()[0].root, e, d.schema()).conflicts.empty()) conflicted = true;
  }
  if (conflicted) {
    EXPECT_THROW(perturb(d, full, {Direction::FewerMatches, 0.5, 1, 0}), DataError);
  }
  EXPECT_NO_THROW(perturb(d, full, {Direction::FewerMatches, 0.5, 1, 0}, ConflictPolicy::LeaveUntouched));
  const Dataset bin = testing::enumerate_binary(3, [](const std::vector<int>& b) { return b[0] == 1; });
  EXPECT_THROW(perturb(bin, parse_theory("c :- x0=1, not(x1=1).\n"), {Direction::FewerMatches, 0.5, 1, 0}),
               UsageError);
  EXPECT_THROW(perturb(bin, parse_theory("c :- x0=1, x1=1.\n"), {Direction::FewerMatches, 1.5, 1, 0}),
               UsageError);
}

TEST(Perturb, ExpectedConflictIsFoundForConstructedExample) {
  const Theory t = parse_theory("c :- a=1, d.\nd :- a=0, b=1.\nd :- b=0, b2=1.\n");
  Schema s({{"a", {"0", "1"}}, {"b", {"0", "1"}}, {"b2", {"0", "1"}}}, {"n", "p"}, std::string("p"));
  const Example e{"x", 1, {1, 1, 0}};
  const Expectation ex = expected_values(t.concepts()[0].root, e, s);
  EXPECT_EQ(ex.conflicts, (std::vector<std::size_t>{0}));
  EXPECT_FALSE(ex.expected[0]);
  EXPECT_EQ(ex.expected[1], std::optional<ValueCode>(1));
}

// Two features with three values each, theory c :- a=x, b=x.
Dataset two_feature(std::size_t copies, ValueCode a, ValueCode b) {
  Schema s({{"a", {"x", "y", "z"}}, {"b", {"x", "y", "z"}}}, {"n", "p"}, std::string("p"));
  std::vector<Example> ex;
  for (std::size_t i = 0; i < copies; ++i) ex.push_back({"e" + std::to_string(i), 1, {a, b}});
  return Dataset(s, ex);
}

TEST(Perturb, EmpiricalMeanMatchesAnalyticExpectation) {
  const Theory t = parse_theory("c :- a=x, b=x.\n");
  const double rate = 0.3;
  const int seeds = 10000;
  struct Case {
    Direction dir;
    ValueCode a, b;
    double expected;
  };
  // fewer matches: a matching feature stays matching with 1 - rate + rate/3.
  // fewer mismatches: a mismatching feature becomes matching with rate.
  const std::vector<Case> cases{{Direction::FewerMatches, 0, 0, 2 * (1 - rate + rate / 3)},
                                {Direction::FewerMismatches, 1, 2, 2 * rate},
                                {Direction::FewerMismatches, 0, 2, 1 + rate}};
  for (const Case& c : cases) {
    const Dataset d = two_feature(1, c.a, c.b);
    double sum = 0, sq = 0;
    for (int s = 0; s < seeds; ++s) {
      const Dataset p = perturb(d, t, {c.dir, rate, static_cast<std::uint64_t>(s), 0});
      const auto& v = p.example(0).values;
      const double m = (v[0] == 0) + (v[1] == 0);
      sum += m;
      sq += m * m;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt((sq / seeds - mean * mean) / seeds);
    EXPECT_NEAR(mean, c.expected, 3 * se + 1e-12);
  }
}

TEST(Perturb, DeterministicPerSeedAndReplicate) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(6, 20, 0.5));
  const Theory t = parse_theory(testing::promoter_theory_text());
  const ProximitySpec a{Direction::FewerMatches, 0.6, 3, 1};
  const auto p = ConflictPolicy::LeaveUntouched;
  EXPECT_EQ(perturb(d, t, a, p), perturb(d, t, a, p));
  EXPECT_NE(perturb(d, t, a, p), perturb(d, t, {Direction::FewerMatches, 0.6, 3, 2}, p));
}

// Intended-disjunct match counts move only in the requested direction, and
// nothing outside the expected features or the positive class changes.
TEST(PerturbProperties, MonotoneAndLocal) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int cases = 0;
  while (cases < 10000) {
    const auto toy = testing::random_toy_theory(gen, 6, 3, false);
    const Theory t = parse_theory(toy.dsl);
    std::vector<int> labels(64);
    for (auto& l : labels) l = static_cast<int>(gen() % 2);
    const Dataset d = testing::enumerate_binary(6, labels);
    const Direction dir = gen() % 2 ? Direction::FewerMatches : Direction::FewerMismatches;
    const Dataset p = perturb(d, t, {dir, unit(gen), gen(), 0}, ConflictPolicy::LeaveUntouched);
    for (std::size_t i = 0; i < d.size(); ++i, ++cases) {
      const Example& before = d.example(i);
      const Example& after = p.example(i);
      if (before.label != 1) {
        EXPECT_EQ(before, after);
        continue;
      }
      const Expectation ex = expected_values(t.concepts()[0].root, before, d.schema());
      for (std::size_t f = 0; f < 6; ++f) {
        if (!ex.expected[f]) EXPECT_EQ(before.values[f], after.values[f]);
      }
      if (dir == Direction::FewerMatches) EXPECT_LE(ex.matching(after), ex.matching(before));
      else EXPECT_GE(ex.matching(after), ex.matching(before));
    }
  }
}

TEST(Sweep, EmptyLevelListGivesOriginalRowsOnly) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(2, 8, 0.7));
  const Theory t = fragment(parse_theory(testing::promoter_theory_text()), "contact");
  Pipeline plain;
  Pipeline tg;
  tg.method = Method::Tgci;
  tg.theories = {t};
  const SweepResult r = proximity_sweep(d, t, {plain, tg}, SweepSpec{{}, 3, 1, ConflictPolicy::Error, 1});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].proximity_x, 0.0);
  EXPECT_EQ(r.rows[1].method, "tgci");
  EXPECT_FALSE(r.caveat.empty());
}

TEST(Sweep, AlwaysTrueTheoryRunsAndTracksPlain) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(2, 12, 0.8));
  const Theory t = parse_theory("c :- true.\n");
  Pipeline plain;
  Pipeline tg;
  tg.method = Method::Tgci;
  tg.theories = {t};
  tg.interpreter.include_original_features = true;
  SweepSpec spec{parse_levels("fewer_matches:0.3,fewer_mismatches:0.9"), 2, 4, ConflictPolicy::Error, 2};
  const SweepResult r = proximity_sweep(d, t, {plain, tg}, spec);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_DOUBLE_EQ(r.at(-30, "plain").mean_accuracy, r.at(-30, "tgci").mean_accuracy);
  EXPECT_EQ(r.at(90, "tgci").replicates.size(), 2u);
  const std::string csv = sweep_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "proximity_x,method,mean,ci,replicates");
}

TEST(Levels, Parsing) {
  const auto l = parse_levels("fewer_matches:0.1, fewer_mismatches:0.9");
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0].direction, Direction::FewerMatches);
  EXPECT_DOUBLE_EQ(l[1].rate, 0.9);
  EXPECT_TRUE(parse_levels("").empty());
  EXPECT_THROW(parse_levels("sideways:0.1"), UsageError);
  EXPECT_THROW(parse_levels("fewer_matches:2"), UsageError);
  EXPECT_THROW(parse_levels("fewer_matches"), UsageError);
  EXPECT_DOUBLE_EQ((ProximitySpec{Direction::FewerMatches, 0.3}.proximity_x()), -30.0);
}

}  // namespace
}  // namespace tgci
