#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tgci {

/// Index of a nominal value within its feature's allowed-value list.
using ValueCode = std::uint16_t;

struct Feature {
  std::string name;
  std::vector<std::string> values;

  std::optional<ValueCode> code_of(std::string_view value) const;

  bool operator==(const Feature&) const = default;
};

/// Feature and class vocabulary shared by every example of a dataset.
///
/// Invariants: feature names are unique, every feature has at least two
/// allowed values (unique), there are at least two distinct classes, and the
/// positive class, when set, is one of them.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<Feature> features, std::vector<std::string> classes,
         std::optional<std::string> positive_class = std::nullopt);

  const std::vector<Feature>& features() const noexcept { return features_; }
  const Feature& feature(std::size_t i) const { return features_.at(i); }
  std::size_t feature_count() const noexcept { return features_.size(); }
  std::optional<std::size_t> feature_index(std::string_view name) const;

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::optional<std::size_t> class_index(std::string_view label) const;

  const std::optional<std::string>& positive_class() const noexcept { return positive_class_; }
  /// Index of the positive class; throws UsageError when none is set.
  std::size_t positive_index() const;

  bool operator==(const Schema& other) const {
    return features_ == other.features_ && classes_ == other.classes_ &&
           positive_class_ == other.positive_class_;
  }

 private:
  std::vector<Feature> features_;
  std::vector<std::string> classes_;
  std::optional<std::string> positive_class_;
  std::unordered_map<std::string, std::size_t> feature_lookup_;
};

/// One classified example. Values and label are codes into the owning
/// dataset's schema.
struct Example {
  std::string id;
  std::size_t label = 0;
  std::vector<ValueCode> values;

  bool operator==(const Example&) const = default;
};

/// A schema plus examples that all conform to it. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  /// Throws DataError if any example violates the schema.
  Dataset(Schema schema, std::vector<Example> examples);

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<Example>& examples() const noexcept { return examples_; }
  const Example& example(std::size_t i) const { return examples_.at(i); }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }

  std::string_view class_label(const Example& e) const { return schema_.classes()[e.label]; }
  std::string_view value(const Example& e, std::size_t feature) const {
    return schema_.feature(feature).values[e.values[feature]];
  }

  /// Examples at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Class frequency counts indexed like schema().classes().
  std::vector<std::size_t> class_counts() const;

  bool operator==(const Dataset& other) const {
    return schema_ == other.schema_ && examples_ == other.examples_;
  }

 private:
  Schema schema_;
  std::vector<Example> examples_;
};

/// Position labels for sequence data, e.g. p-50 .. p+7 with no zero position.
struct PositionsSpec {
  std::string prefix = "p";
  int first = -50;
  int last = 7;

  /// Parses "p-50..p+7" (prefix, signed first, "..", prefix, signed last).
  static PositionsSpec parse(std::string_view text);
  std::string to_string() const;
  std::vector<std::string> labels() const;
};

struct SequenceFormat {
  PositionsSpec positions;
  /// Allowed nucleotides, lowercase. Sequence characters are case-folded.
  std::string alphabet = "agct";
  /// Defaults to "+" when that label occurs in the data.
  std::optional<std::string> positive_class;
};

/// Loads `class, name, sequence` records (UCI promoter / splice layout).
Dataset load_sequence_format(std::string_view text, const SequenceFormat& format = {});

/// Loads header CSV: feature columns then a final class column.
/// Allowed values are the observed values in first-appearance order.
Dataset load_tabular(std::string_view text,
                     const std::optional<std::string>& positive_class = std::nullopt);

std::string write_sequence_format(const Dataset& data);
std::string write_tabular(const Dataset& data);

/// Seeded permutation of [0, n) used by partition().
std::vector<std::size_t> partition_order(std::size_t n, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
};

/// Training set = first train_size entries of partition_order(n, seed);
/// test set = last test_size entries. For a fixed seed, smaller training sets
/// are prefixes of larger ones and the test set does not depend on
/// train_size.
Split partition(const Dataset& data, std::size_t train_size, std::size_t test_size,
                std::uint64_t seed);

}  // namespace tgci
