#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tgci/error.hpp"
#include "tgci/theory.hpp"

namespace tgci {
namespace {

std::size_t error_line(std::string_view text) {
  try {
    parse_theory(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

TEST(ParseTheory, SingleClauseHeadIsAnAndWithoutOrWrapper) {
  const Theory t = parse_theory("c :- a=1, b=0.\n");
  ASSERT_EQ(t.concepts().size(), 1u);
  const TheoryNode& root = t.concepts()[0].root;
  EXPECT_EQ(root.kind(), NodeKind::And);
  ASSERT_EQ(root.children().size(), 2u);
  EXPECT_EQ(root.children()[0].condition(), (Condition{"a", "1"}));
  EXPECT_EQ(root.children()[1].condition(), (Condition{"b", "0"}));
}

TEST(ParseTheory, RepeatedHeadsBecomeOneOrInSourceOrder) {
  const Theory t = parse_theory("c :- a=1.\nc :- b=1, d=1.\n");
  const TheoryNode& root = t.concepts()[0].root;
  ASSERT_EQ(root.kind(), NodeKind::Or);
  ASSERT_EQ(root.children().size(), 2u);
  EXPECT_EQ(root.children()[0].kind(), NodeKind::Leaf);
  EXPECT_EQ(root.children()[1].kind(), NodeKind::And);
  EXPECT_EQ(root.children()[1].path(), "c/#2");
}

TEST(ParseTheory, HeadReferencesExpandInline) {
  const Theory t = parse_theory("top :- left, right.\nleft :- a=1, b=1.\nright :- c=1.\nright :- d=1.\n");
  ASSERT_EQ(t.concepts().size(), 1u);
  EXPECT_EQ(t.concepts()[0].name, "top");
  const auto& kids = t.concepts()[0].root.children();
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0].kind(), NodeKind::And);
  EXPECT_EQ(kids[0].path(), "top/left");
  EXPECT_EQ(kids[0].head(), "left");
  EXPECT_EQ(kids[1].kind(), NodeKind::Or);
  EXPECT_EQ(kids[1].path(), "top/right");
}

TEST(ParseTheory, NotTrueAndComments) {
  const Theory t = parse_theory("% leading comment\nc :- not(a=1), true. % trailing\n");
  const auto& kids = t.concepts()[0].root.children();
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0].kind(), NodeKind::Not);
  EXPECT_EQ(kids[0].children()[0].condition(), (Condition{"a", "1"}));
  EXPECT_EQ(kids[1].kind(), NodeKind::True);
  EXPECT_TRUE(contains_negation(t.concepts()[0].root));
}

TEST(ParseTheory, UnreferencedHeadsAreSeparateConcepts) {
  const Theory t = parse_theory("x :- a=1, b=1.\ny :- a=0, b=0.\n");
  ASSERT_EQ(t.concepts().size(), 2u);
  EXPECT_EQ(t.concepts()[0].name, "x");
  EXPECT_EQ(t.concepts()[1].name, "y");
  EXPECT_NE(t.find("y"), nullptr);
  EXPECT_EQ(t.find("z"), nullptr);
}

TEST(ParseTheory, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("c :- a=1, b.\n\n"), 1u);
  EXPECT_EQ(error_line("c :- a=1.\n\nd :- a=1 b=2.\n"), 3u);
  EXPECT_EQ(error_line("c :- d.\nd :- c.\n"), 2u);
  EXPECT_EQ(error_line("c :- a=1, a=1.\n"), 1u);
  EXPECT_EQ(error_line("c :- a=.\n"), 1u);
  EXPECT_EQ(error_line("% nothing\n"), 1u);
  EXPECT_EQ(error_line("c :- a=1\n"), 1u);
  EXPECT_EQ(error_line("true :- a=1.\n"), 1u);
}

TEST(ParseTheory, UndefinedHeadMessageNamesTheHead) {
  try {
    parse_theory("c :- a=1.\nc :- missing.\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
}

TEST(PromoterTheory, ShapeMatchesTheRuleListing) {
  const Theory t = parse_theory(testing::promoter_theory_text());
  ASSERT_EQ(t.concepts().size(), 1u);
  EXPECT_EQ(internal_node_count(t), 17u);
  const Theory m35 = fragment(t, "minus_35");
  EXPECT_EQ(internal_node_count(m35), 5u);
  const TheoryNode& or35 = m35.concepts()[0].root;
  ASSERT_EQ(or35.children().size(), 4u);
  EXPECT_EQ(or35.children()[1].children().size(), 5u);
  EXPECT_EQ(or35.children()[1].children()[4].condition(), (Condition{"p-31", "a"}));
  const Theory m10 = fragment(t, "minus_10");
  std::vector<std::size_t> sizes;
  for (const auto& r : m10.concepts()[0].root.children()) sizes.push_back(r.children().size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{6, 4, 6, 3}));
  EXPECT_EQ(fragment(t, "conformation").concepts()[0].root.children()[0].children().size(), 17u);
}

TEST(Fragment, ByPathAndByHeadAgree) {
  const Theory t = parse_theory(testing::promoter_theory_text());
  const Theory by_head = fragment(t, "minus_10");
  const Theory by_path = fragment(t, "promoter/contact/minus_10");
  EXPECT_TRUE(structurally_equal(by_head.concepts()[0].root, by_path.concepts()[0].root));
  EXPECT_EQ(by_head.concepts()[0].root.path(), "minus_10");
  EXPECT_THROW(fragment(t, "minus_99"), UsageError);
  const Theory rule = fragment(t, "promoter/contact/minus_35/#2");
  EXPECT_EQ(rule.concepts()[0].root.kind(), NodeKind::And);
  EXPECT_EQ(rule.concepts()[0].root.children().size(), 5u);
}

TEST(Validate, ReportsUnknownFeaturesAndValues) {
  const Theory t = parse_theory("c :- a=1, b=2, zz=1.\n");
  Schema s({{"a", {"0", "1"}}, {"b", {"0", "1"}}}, {"n", "p"});
  const auto findings = validate(t, s);
  ASSERT_EQ(findings.size(), 2u);
  EXPECT_EQ(findings[0].condition, (Condition{"b", "2"}));
  EXPECT_EQ(findings[1].condition, (Condition{"zz", "1"}));
}

TEST(RenderTheory, RoundTripsRandomTheories) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 300; ++i) {
    const auto toy = testing::random_toy_theory(gen, 6, 4, true);
    const Theory a = parse_theory(toy.dsl);
    const Theory b = parse_theory(render_theory(a));
    ASSERT_EQ(a.concepts().size(), b.concepts().size()) << toy.dsl;
    for (std::size_t c = 0; c < a.concepts().size(); ++c) {
      EXPECT_TRUE(structurally_equal(a.concepts()[c].root, b.concepts()[c].root))
          << toy.dsl << "\n---\n" << render_theory(a);
    }
  }
}

TEST(RenderTheory, PromoterRoundTripIsExact) {
  const Theory t = parse_theory(testing::promoter_theory_text());
  EXPECT_EQ(parse_theory(render_theory(t)), t);
}

TEST(RenderOutline, ListsEveryNode) {
  const Theory t = parse_theory("c :- a=1, not(b=1).\n");
  const std::string outline = render_outline(t);
  EXPECT_NE(outline.find("AND"), std::string::npos);
  EXPECT_NE(outline.find("NOT"), std::string::npos);
  EXPECT_NE(outline.find("b=1"), std::string::npos);
}

}  // namespace
}  // namespace tgci
