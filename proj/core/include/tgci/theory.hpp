#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tgci/dataset.hpp"

namespace tgci {

/// A directly testable `feature=value` test.
struct Condition {
  std::string feature;
  std::string value;

  std::string to_string() const { return feature + "=" + value; }
  bool operator==(const Condition&) const = default;
};

enum class NodeKind { Leaf, And, Or, Not, True };

std::string_view to_string(NodeKind kind);

/// Node of an AND/OR/NOT domain-theory tree.
///
/// Leaf and True nodes have no children, Not has exactly one, And/Or have at
/// least one. `path` is a slash-separated label from the concept root that is
/// unique within one theory, e.g. "promoter/contact/minus_35/#2".
class TheoryNode {
 public:
  static TheoryNode leaf(Condition condition, std::string path);
  static TheoryNode truth(std::string path);
  static TheoryNode conjunction(std::vector<TheoryNode> children, std::string path);
  static TheoryNode disjunction(std::vector<TheoryNode> children, std::string path);
  static TheoryNode negation(TheoryNode child, std::string path);

  NodeKind kind() const noexcept { return kind_; }
  bool is_internal() const noexcept { return kind_ != NodeKind::Leaf && kind_ != NodeKind::True; }
  /// Only meaningful for Leaf nodes.
  const Condition& condition() const noexcept { return condition_; }
  const std::vector<TheoryNode>& children() const noexcept { return children_; }
  const std::string& path() const noexcept { return path_; }

  /// Clause head whose expansion produced this node, or empty.
  const std::string& head() const noexcept { return head_; }
  void set_head(std::string head) { head_ = std::move(head); }

  bool operator==(const TheoryNode&) const = default;

 private:
  TheoryNode(NodeKind kind, std::string path) : kind_(kind), path_(std::move(path)) {}

  NodeKind kind_ = NodeKind::True;
  Condition condition_;
  std::vector<TheoryNode> children_;
  std::string path_;
  std::string head_;
};

/// A named top-level concept of a theory.
struct Concept {
  std::string name;
  TheoryNode root;

  bool operator==(const Concept&) const = default;
};

class Theory {
 public:
  Theory() = default;
  Theory(std::vector<Concept> concepts, std::string source);

  const std::vector<Concept>& concepts() const noexcept { return concepts_; }
  const Concept* find(std::string_view name) const;
  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return concepts_.empty(); }

  /// Same concepts and trees; source text is ignored.
  bool operator==(const Theory& other) const { return concepts_ == other.concepts_; }

 private:
  std::vector<Concept> concepts_;
  std::string source_;
};

/// Parses Prolog-style propositional clauses:
///
///     head :- cond, cond, ... .
///     cond := feature=value | head | not(cond) | true
///
/// `%` starts a comment running to end of line. Clauses sharing a head are
/// joined by an OR node (in source order); a body with two or more conditions
/// is an AND node; a one-condition body is that condition's node. Head
/// references are expanded inline into subtrees. Top-level concepts are the
/// heads no clause references, in order of first definition.
///
/// Throws ParseError (with line number) for malformed clauses, empty input,
/// undefined or cyclic head references, and a condition repeated in one body.
Theory parse_theory(std::string_view text);

/// Renders the theory as DSL text that parse_theory() reads back into a
/// structurally identical tree.
std::string render_theory(const Theory& theory);

/// Indented outline with node kinds and paths, one node per line.
std::string render_outline(const Theory& theory);

/// Same shape, kinds and conditions; paths and head labels ignored.
bool structurally_equal(const TheoryNode& a, const TheoryNode& b);

/// Number of And/Or/Not nodes in the subtree.
std::size_t internal_node_count(const TheoryNode& node);
std::size_t internal_node_count(const Theory& theory);

bool contains_negation(const TheoryNode& node);

struct ValidationFinding {
  std::string path;
  Condition condition;
  std::string problem;
};

/// Lists every condition whose feature or value is missing from the schema.
std::vector<ValidationFinding> validate(const Theory& theory, const Schema& schema);

/// Single-concept theory rooted at the node named by `head`: an exact node
/// path, a concept name, or a clause head (first match in pre-order). Paths
/// are rebased onto the new concept name. Throws UsageError for unknown heads.
Theory fragment(const Theory& theory, std::string_view head);

/// Calls `visit(node)` for every node, parents before children.
template <class Visit>
void for_each_node(const TheoryNode& node, Visit&& visit) {
  visit(node);
  for (const TheoryNode& child : node.children()) for_each_node(child, visit);
}

}  // namespace tgci
