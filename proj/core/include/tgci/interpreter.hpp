#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgci/dataset.hpp"
#include "tgci/theory.hpp"

namespace tgci {

enum class InterpreterKind { PartialMatch, Boolean };

std::string_view to_string(InterpreterKind kind);
InterpreterKind parse_interpreter_kind(std::string_view text);

struct InterpreterOptions {
  InterpreterKind kind = InterpreterKind::PartialMatch;
  /// NOT nodes pass their child's features through without adding their own
  /// unless this is set.
  bool not_emits_feature = false;
  /// Append the original nominal features after the constructed ones.
  bool include_original_features = false;
  /// Emit the feature of each concept root.
  bool top_feature_included = true;

  bool operator==(const InterpreterOptions&) const = default;
};

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Result of interpreting one example against one theory subtree.
struct Interpretation {
  /// Match of the example to the whole subtree.
  double top = 0.0;
  /// One value per feature-emitting node, parents before children.
  std::vector<NamedValue> features;
};

/// Partial-match interpreter. Leaf: +1 when the condition holds, -1
/// otherwise, no features. True: +1. And: mean of child tops. Or: max of
/// child tops. Not: negated child top. And/Or nodes emit their own top
/// followed by their children's features; Not nodes emit only their child's
/// features unless options.not_emits_feature. Throws DataError when a leaf
/// names a feature absent from the schema.
Interpretation tgci1(const TheoryNode& node, const Example& example, const Schema& schema,
                     const InterpreterOptions& options = {});

/// Exact-match interpreter with the same feature layout as tgci1(): values
/// are 1 when the node is satisfied and 0 otherwise.
Interpretation boolean_interpret(const TheoryNode& node, const Example& example,
                                 const Schema& schema, const InterpreterOptions& options = {});

enum class FeatureKind { PartialMatch, Boolean, Original };

std::string_view to_string(FeatureKind kind);

struct ConstructedFeature {
  std::string name;
  /// Node path (constructed features) or original feature name.
  std::string source;
  FeatureKind kind = FeatureKind::PartialMatch;
  /// Allowed values of an Original feature; empty otherwise.
  std::vector<std::string> values;

  bool operator==(const ConstructedFeature&) const = default;
};

struct ConstructedSchema {
  std::vector<ConstructedFeature> features;
  InterpreterOptions options;

  std::size_t constructed_count() const;
  bool operator==(const ConstructedSchema&) const = default;
};

struct RedescribedExample {
  std::string id;
  std::size_t label = 0;
  /// Aligned with ConstructedSchema::features. Original features hold their
  /// value code.
  std::vector<double> values;

  bool operator==(const RedescribedExample&) const = default;
};

struct Redescription {
  ConstructedSchema schema;
  std::vector<std::string> classes;
  std::vector<RedescribedExample> examples;

  bool operator==(const Redescription&) const = default;
};

/// Feature name for a node path: the last path segment, with a "#k" ordinal
/// glued to the segment before it ("promoter/contact/minus_35/#2" ->
/// "minus_35#2"). Characters outside [A-Za-z0-9_+#=.-] become '_'.
std::string feature_name_for(std::string_view path);

/// Feature layout the interpreters produce for one theory subtree.
std::vector<ConstructedFeature> constructed_features(const TheoryNode& root,
                                                     const InterpreterOptions& options);

/// Runs the selected interpreter on every concept of every theory (theory
/// order, then concept order) for each example and concatenates the feature
/// lists. Colliding names are disambiguated with more path context, then a
/// theory-index prefix. Throws DataError if a theory is inconsistent with the
/// dataset schema and UsageError if no constructed feature results (unless
/// original features are included).
Redescription redescribe(const Dataset& data, std::span<const Theory> theories,
                         const InterpreterOptions& options = {});

/// Header CSV: one column per feature, class label last.
std::string write_redescription_csv(const Redescription& r);

}  // namespace tgci
