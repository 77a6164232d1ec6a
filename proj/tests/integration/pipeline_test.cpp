#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tgci/evaluation.hpp"
#include "tgci/perturbation.hpp"

namespace tgci {
namespace {

TEST(Pipeline, SyntheticPromoterEndToEnd) {
  const Dataset d = load_sequence_format(testing::synthetic_promoter_text(23, 53, 0.7));
  const Theory t = parse_theory(testing::promoter_theory_text());
  EXPECT_TRUE(validate(t, d.schema()).empty());

  Pipeline plain;
  Pipeline guided;
  guided.method = Method::Tgci;
  guided.theories = {t};
  const CurveSpec spec{parse_sizes("8:80:8"), 26, 10, 1, 4};
  const RunReport a = learning_curve(d, plain, spec);
  const RunReport b = learning_curve(d, guided, spec);
  ASSERT_EQ(a.points.size(), 10u);
  EXPECT_GE(b.points.back().mean_accuracy, a.points.back().mean_accuracy);
  const PairedTest test = paired_significance(b.accuracies_at(80), a.accuracies_at(80));
  EXPECT_GT(test.mean_diff, 0.0);

  const SweepSpec sweep{parse_levels("fewer_matches:0.9,fewer_mismatches:0.9"), 2, 5,
                        ConflictPolicy::LeaveUntouched, 4};
  const SweepResult s = proximity_sweep(d.subset(partition_order(d.size(), 3)), t, {plain, guided}, sweep);
  EXPECT_EQ(s.rows.size(), 6u);
  EXPECT_GT(s.at(90, "tgci").mean_accuracy, s.at(-90, "tgci").mean_accuracy);
}

}  // namespace
}  // namespace tgci
