#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tgci/dataset.hpp"
#include "tgci/interpreter.hpp"

namespace tgci {

enum class ColumnKind { Continuous, Nominal };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  /// Allowed values of a Nominal column; cells hold the value index.
  std::vector<std::string> values;

  bool operator==(const Column&) const = default;
};

/// Row-major numeric view of a training set as seen by a learner.
struct LearningTable {
  std::vector<Column> columns;
  std::vector<std::string> classes;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return rows.size(); }

  /// All features nominal, one column per schema feature.
  static LearningTable from_dataset(const Dataset& data);
  /// Constructed features continuous, original features nominal.
  static LearningTable from_redescription(const Redescription& r);

  LearningTable subset(std::span<const std::size_t> indices) const;
};

struct LearnerParams {
  std::size_t min_leaf = 2;
  double pruning_confidence = 0.25;
  bool use_gain_ratio = true;
  bool prune = true;
  /// Recorded with every run. Split ties are broken deterministically (lowest
  /// feature index, then lowest threshold), so no draw is ever taken from it.
  std::uint64_t seed = 0;

  void check() const;
  bool operator==(const LearnerParams&) const = default;
};

struct SplitTest {
  enum class Kind { Threshold, Nominal };
  Kind kind = Kind::Threshold;
  std::size_t feature = 0;
  /// Threshold tests send value <= threshold to child 0, others to child 1.
  double threshold = 0.0;

  bool operator==(const SplitTest&) const = default;
};

struct TreeNode {
  bool leaf = true;
  std::size_t predicted = 0;
  std::vector<std::size_t> class_counts;
  SplitTest test;
  /// Indices into DecisionTree::nodes(); one per branch.
  std::vector<std::size_t> children;

  std::size_t total() const;
  bool operator==(const TreeNode&) const = default;
};

/// Something that maps a feature row to a class index.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::size_t predict(std::span<const double> row) const = 0;
};

/// Trains classifiers from learning tables. Any implementation can stand in
/// for the decision tree in evaluation runs.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::unique_ptr<Classifier> fit(const LearningTable& table) const = 0;
  virtual std::string name() const = 0;
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::vector<Column> columns,
               std::vector<std::string> classes, LearnerParams params);

  /// Deterministic descent. A nominal value with no branch goes to the child
  /// holding the most training examples. Throws UsageError when the row
  /// length differs from the training feature count.
  std::size_t predict(std::span<const double> row) const override;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const LearnerParams& params() const noexcept { return params_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  bool operator==(const DecisionTree& other) const {
    return nodes_ == other.nodes_ && columns_ == other.columns_ && classes_ == other.classes_ &&
           params_ == other.params_;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<Column> columns_;
  std::vector<std::string> classes_;
  LearnerParams params_;
};

/// Greedy top-down induction. Continuous columns are tested at midpoints of
/// consecutive distinct values, nominal columns with one branch per allowed
/// value. Candidate splits must leave at least min_leaf examples on two
/// branches. With use_gain_ratio the split maximizes gain ratio among
/// candidates whose gain is at least the average candidate gain; otherwise it
/// maximizes gain. Growth stops at purity, below 2*min_leaf examples, or when
/// no split has positive gain. Pessimistic-error subtree replacement follows
/// when params.prune is set. Throws UsageError for an empty table or zero
/// columns.
DecisionTree train_tree(const LearningTable& table, const LearnerParams& params = {});

/// Upper-confidence estimate of extra errors at a leaf with `cases` training
/// examples, `errors` of them misclassified, at confidence level `cf`.
double pessimistic_extra_errors(double cases, double errors, double cf);

class DecisionTreeLearner final : public Learner {
 public:
  explicit DecisionTreeLearner(LearnerParams params = {}) : params_(params) { params_.check(); }
  std::unique_ptr<Classifier> fit(const LearningTable& table) const override;
  std::string name() const override { return "decision-tree"; }
  const LearnerParams& params() const noexcept { return params_; }

 private:
  LearnerParams params_;
};

/// Indented text, one test or leaf per line, naming columns by their own names.
std::string render_tree(const DecisionTree& tree);

/// Same, checking that the tree was trained on exactly this feature layout.
/// Throws UsageError on a mismatch.
std::string render_tree(const DecisionTree& tree, const ConstructedSchema& schema);

/// JSON document with params, columns, classes and the node array.
std::string tree_to_json(const DecisionTree& tree);

/// Fraction of rows the classifier labels correctly.
double accuracy(const Classifier& model, const LearningTable& table);

}  // namespace tgci
