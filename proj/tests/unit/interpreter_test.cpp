#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tgci/error.hpp"
#include "tgci/interpreter.hpp"
#include "tgci/theory.hpp"

namespace tgci {
namespace {

// Dataset over p-38..p-30 holding one DNA segment.
Dataset segment(const std::string& bases) {
  std::vector<Feature> features;
  for (int p = -38; p <= -30; ++p) features.push_back({"p" + std::to_string(p), {"a", "g", "c", "t"}});
  Schema schema(features, {"+", "-"}, std::string("+"));
  Example e{"seg", 0, {}};
  for (char c : bases) e.values.push_back(*schema.feature(e.values.size()).code_of(std::string(1, c)));
  return Dataset(schema, {e});
}

Theory minus_35() { return fragment(parse_theory(testing::promoter_theory_text()), "minus_35"); }

TEST(Tgci1, PartialMatchOfTheMinus35Group) {
  const Dataset d = segment("gcttgcaat");
  const Interpretation r = tgci1(minus_35().concepts()[0].root, d.example(0), d.schema());
  ASSERT_EQ(r.features.size(), 5u);
  EXPECT_EQ(r.features[0].name, "minus_35");
  EXPECT_NEAR(r.features[0].value, 3.0 / 5.0, 1e-12);
  EXPECT_NEAR(r.features[1].value, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.features[2].value, 3.0 / 5.0, 1e-12);
  EXPECT_NEAR(r.features[3].value, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.features[4].value, 1.0 / 5.0, 1e-12);
  EXPECT_EQ(r.features[2].name, "minus_35#2");
  EXPECT_NEAR(r.top, 3.0 / 5.0, 1e-12);
}

TEST(BooleanInterpreter, ExactMatchOfTheMinus35Group) {
  const Dataset d = segment("gcttgactt");
  const Interpretation r = boolean_interpret(minus_35().concepts()[0].root, d.example(0), d.schema());
  ASSERT_EQ(r.features.size(), 5u);
  std::vector<double> v;
  for (const auto& f : r.features) v.push_back(f.value);
  EXPECT_EQ(v, (std::vector<double>{1, 1, 0, 0, 1}));
}

TEST(Tgci1, NotNegatesTheChildMatch) {
  const Theory t = parse_theory(
      "n2 :- n6.\nn2 :- not(n7).\n"
      "n6 :- a=1, b=1, c=1, d=1, e=1.\n"
      "n7 :- f=1, g=1, h=1.\n");
  std::vector<Feature> features;
  for (const char* n : {"a", "b", "c", "d", "e", "f", "g", "h"}) features.push_back({n, {"0", "1"}});
  Schema s(features, {"n", "p"});
  // A, B, D and G hold; C, E, F and H do not.
  const Example e{"x", 0, {1, 1, 0, 1, 0, 0, 1, 0}};
  const TheoryNode& root = t.concepts()[0].root;
  const Interpretation r = tgci1(root, e, s);
  ASSERT_EQ(r.features.size(), 3u);
  EXPECT_NEAR(r.features[1].value, 0.2, 1e-12);
  EXPECT_NEAR(r.features[2].value, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.top, 1.0 / 3.0, 1e-12);

  InterpreterOptions with_not;
  with_not.not_emits_feature = true;
  const Interpretation n = tgci1(root, e, s, with_not);
  ASSERT_EQ(n.features.size(), 4u);
  EXPECT_NEAR(n.features[2].value, 1.0 / 3.0, 1e-12);
}

TEST(Tgci1, TrueAndLeafRoots) {
  const Theory t = parse_theory("c :- true.\nd :- a=1.\n");
  Schema s({{"a", {"0", "1"}}}, {"n", "p"});
  const Example e{"x", 0, {0}};
  EXPECT_EQ(tgci1(t.concepts()[0].root, e, s).top, 1.0);
  EXPECT_TRUE(tgci1(t.concepts()[0].root, e, s).features.empty());
  EXPECT_EQ(tgci1(t.concepts()[1].root, e, s).top, -1.0);
}

TEST(Tgci1, UnknownFeatureIsAnError) {
  const Theory t = parse_theory("c :- zz=1, a=1.\n");
  Schema s({{"a", {"0", "1"}}}, {"n", "p"});
  EXPECT_THROW(tgci1(t.concepts()[0].root, Example{"x", 0, {0}}, s), DataError);
}

// Exhaustive check on a 6-feature domain against the private evaluator.
TEST(InterpreterProperties, AgreeWithOracleOnRandomTheories) {
  const Dataset all = testing::enumerate_binary(6, [](const std::vector<int>&) { return false; });
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto toy = testing::random_toy_theory(gen, 6, 4, true);
    const Theory t = parse_theory(toy.dsl);
    const TheoryNode& root = t.concepts()[0].root;
    for (const Example& e : all.examples()) {
      std::vector<int> bits(e.values.begin(), e.values.end());
      const auto want = testing::toy_evaluate(toy.root, bits, false);
      const auto want_bool = testing::toy_evaluate(toy.root, bits, true);
      const Interpretation got = tgci1(root, e, all.schema());
      const Interpretation got_bool = boolean_interpret(root, e, all.schema());
      ASSERT_EQ(got.features.size(), want.features.size()) << toy.dsl;
      ASSERT_EQ(got_bool.features.size(), got.features.size());
      EXPECT_NEAR(got.top, want.top, 1e-12) << toy.dsl;
      EXPECT_EQ(got_bool.top, want_bool.top) << toy.dsl;
      for (std::size_t i = 0; i < got.features.size(); ++i) {
        EXPECT_NEAR(got.features[i].value, want.features[i], 1e-12) << toy.dsl;
        EXPECT_GE(got.features[i].value, -1.0);
        EXPECT_LE(got.features[i].value, 1.0);
        EXPECT_EQ(got_bool.features[i].value, want_bool.features[i]) << toy.dsl;
      }
    }
  }
}

TEST(InterpreterProperties, BooleanOneIffPartialMatchOneWithoutNegation) {
  const Dataset all = testing::enumerate_binary(6, [](const std::vector<int>&) { return false; });
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 120; ++trial) {
    const Theory t = parse_theory(testing::random_toy_theory(gen, 6, 3, false).dsl);
    const TheoryNode& root = t.concepts()[0].root;
    for (const Example& e : all.examples()) {
      const auto p = tgci1(root, e, all.schema());
      const auto b = boolean_interpret(root, e, all.schema());
      for (std::size_t i = 0; i < p.features.size(); ++i) {
        EXPECT_EQ(b.features[i].value == 1.0, p.features[i].value == 1.0);
      }
    }
  }
}

TEST(Redescribe, PromoterTheoryYieldsSeventeenFeatures) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(4, 5, 0.5));
  const Theory t = parse_theory(testing::promoter_theory_text());
  const Redescription r = redescribe(d, std::vector<Theory>{t});
  EXPECT_EQ(r.schema.features.size(), 17u);
  EXPECT_EQ(r.schema.constructed_count(), 17u);
  EXPECT_EQ(r.examples.size(), d.size());
  EXPECT_EQ(r.schema.features[3].name, "minus_35#1");
  const Redescription m = redescribe(d, std::vector<Theory>{fragment(t, "minus_35")});
  EXPECT_EQ(m.schema.features.size(), 5u);
}

TEST(Redescribe, ConcatenatesTheoriesAndDisambiguatesNames) {
  const Dataset d = testing::enumerate_binary(3, [](const std::vector<int>& b) { return b[0] == 1; });
  const Theory a = parse_theory("g :- x0=1, x1=1.\n");
  const Theory b = parse_theory("g :- x1=0, x2=1.\n");
  const Redescription r = redescribe(d, std::vector<Theory>{a, b});
  ASSERT_EQ(r.schema.features.size(), 2u);
  EXPECT_NE(r.schema.features[0].name, r.schema.features[1].name);
  InterpreterOptions orig;
  orig.include_original_features = true;
  const Redescription o = redescribe(d, std::vector<Theory>{a}, orig);
  EXPECT_EQ(o.schema.features.size(), 4u);
  EXPECT_EQ(o.schema.features[1].kind, FeatureKind::Original);
  const std::string csv = write_redescription_csv(o);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "g,x0,x1,x2,class");
}

TEST(Redescribe, Errors) {
  const Dataset d = testing::enumerate_binary(2, [](const std::vector<int>& b) { return b[0] == 1; });
  EXPECT_THROW(redescribe(d, std::vector<Theory>{parse_theory("c :- x9=1, x0=1.\n")}), DataError);
  EXPECT_THROW(redescribe(d, std::vector<Theory>{parse_theory("c :- x0=1.\n")}), UsageError);
}

TEST(FeatureNames, FromPaths) {
  EXPECT_EQ(feature_name_for("promoter/contact/minus_35/#2"), "minus_35#2");
  EXPECT_EQ(feature_name_for("promoter/contact"), "contact");
  EXPECT_EQ(feature_name_for("a b"), "a_b");
}

}  // namespace
}  // namespace tgci
