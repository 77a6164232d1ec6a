#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgci/dataset.hpp"
#include "tgci/interpreter.hpp"
#include "tgci/learner.hpp"
#include "tgci/theory.hpp"

namespace tgci {

/// plain: original features; tgci: partial-match redescription;
/// boolean-interp: exact-match redescription.
enum class Method { Plain, Tgci, BooleanInterp };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

/// Everything needed to turn a dataset into a trained classifier.
struct Pipeline {
  Method method = Method::Plain;
  /// Used by tgci and boolean-interp; ignored by plain.
  std::vector<Theory> theories;
  /// The interpreter kind is overridden by the method.
  InterpreterOptions interpreter;
  LearnerParams learner;
  /// Replaces the decision tree when set.
  std::shared_ptr<const Learner> custom_learner;

  std::unique_ptr<Classifier> fit(const LearningTable& table) const;
};

/// The table a pipeline trains on: the raw dataset for plain, the
/// redescription otherwise. Row i corresponds to data.example(i).
LearningTable build_table(const Dataset& data, const Pipeline& pipeline);

struct Verdict {
  std::string id;
  bool actual_positive = false;
  bool predicted_positive = false;
};

struct TheoryScore {
  double accuracy = 0.0;
  /// Examples whose boolean root value is 1.
  std::size_t exact_matches = 0;
  std::size_t positives = 0;
  std::vector<Verdict> verdicts;
};

/// Classifies positive exactly when the first concept of the theory holds
/// under the boolean interpreter. Needs the schema's positive class.
TheoryScore theory_only_classify(const Theory& theory, const Dataset& data);

struct CurveSpec {
  std::vector<std::size_t> sizes;
  std::size_t test_size = 0;
  std::size_t partitions = 1;
  /// Partition i uses seed + i.
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void check(std::size_t dataset_size) const;
  bool operator==(const CurveSpec&) const = default;
};

/// Parses "8:80:8" (first:last:step) or "8,16,24".
std::vector<std::size_t> parse_sizes(std::string_view text);

struct CurvePoint {
  std::size_t train_size = 0;
  double mean_accuracy = 0.0;
  double ci_half_width = 0.0;
  std::size_t n_partitions = 0;

  bool operator==(const CurvePoint&) const = default;
};

/// Mean and 95% t-interval half width (zero for a single sample).
CurvePoint summarize(std::size_t train_size, std::span<const double> accuracies);

struct PartitionResult {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  double accuracy = 0.0;

  bool operator==(const PartitionResult&) const = default;
};

struct RunReport {
  std::string method;
  LearnerParams params;
  InterpreterOptions interpreter;
  CurveSpec spec;
  /// Sorted by seed, then train size.
  std::vector<PartitionResult> results;
  std::vector<CurvePoint> points;
  double seconds = 0.0;

  /// Timing is not compared.
  bool operator==(const RunReport& o) const {
    return method == o.method && params == o.params && interpreter == o.interpreter &&
           spec == o.spec && results == o.results && points == o.points;
  }

  /// Accuracies at one training size in seed order.
  std::vector<double> accuracies_at(std::size_t train_size) const;
};

/// For each seed the data is permuted once; the test set is the last
/// test_size examples and every training set a prefix of the rest.
RunReport learning_curve(const Dataset& data, const Pipeline& pipeline, const CurveSpec& spec);

/// Fraction of examples classified correctly when each is held out in turn.
double leave_one_out(const Dataset& data, const Pipeline& pipeline, unsigned jobs = 1);

struct PairedTest {
  double p_value = 1.0;
  double mean_diff = 0.0;
  double t = 0.0;
  /// All differences equal; p is 0, 0.5 or 1 by the sign of the mean.
  bool zero_variance = false;
  std::size_t n = 0;
};

/// One-sided paired t-test of mean(a - b) > 0.
PairedTest paired_significance(std::span<const double> a, std::span<const double> b);

std::string curve_csv(const RunReport& report);
/// One row per (seed, size).
std::string results_csv(const RunReport& report);
std::string report_json(const RunReport& report);
/// Whitespace columns: size mean ci_lo ci_hi.
std::string curve_dat(const RunReport& report);

}  // namespace tgci
