#include "tgci/theory.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "text.hpp"
#include "tgci/error.hpp"

namespace tgci {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Leaf: return "LEAF";
    case NodeKind::And: return "AND";
    case NodeKind::Or: return "OR";
    case NodeKind::Not: return "NOT";
    case NodeKind::True: return "TRUE";
  }
  return "?";
}

TheoryNode TheoryNode::leaf(Condition condition, std::string path) {
  if (condition.feature.empty() || condition.value.empty()) {
    throw UsageError("a condition needs a non-empty feature and value");
  }
  TheoryNode n(NodeKind::Leaf, std::move(path));
  n.condition_ = std::move(condition);
  return n;
}

TheoryNode TheoryNode::truth(std::string path) { return TheoryNode(NodeKind::True, std::move(path)); }

TheoryNode TheoryNode::conjunction(std::vector<TheoryNode> children, std::string path) {
  if (children.empty()) throw UsageError("an AND node needs at least one child");
  TheoryNode n(NodeKind::And, std::move(path));
  n.children_ = std::move(children);
  return n;
}

TheoryNode TheoryNode::disjunction(std::vector<TheoryNode> children, std::string path) {
  if (children.empty()) throw UsageError("an OR node needs at least one child");
  TheoryNode n(NodeKind::Or, std::move(path));
  n.children_ = std::move(children);
  return n;
}

TheoryNode TheoryNode::negation(TheoryNode child, std::string path) {
  TheoryNode n(NodeKind::Not, std::move(path));
  n.children_.push_back(std::move(child));
  return n;
}

Theory::Theory(std::vector<Concept> concepts, std::string source)
    : concepts_(std::move(concepts)), source_(std::move(source)) {
  std::set<std::string_view> names;
  for (const Concept& c : concepts_) {
    if (!names.insert(c.name).second) throw UsageError("duplicate concept '" + c.name + "'");
  }
}

const Concept* Theory::find(std::string_view name) const {
  for (const Concept& c : concepts_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Word, Neck, Comma, Period, Equals, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
};

bool is_word_char(char c) {
  switch (c) {
    case ',': case '.': case '=': case '(': case ')': case '%': case ':':
      return false;
    default:
      return !detail::is_space(c);
  }
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (detail::is_space(c)) {
      ++i;
    } else if (c == '%') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (c == ':') {
      if (i + 1 >= src.size() || src[i + 1] != '-') throw ParseError("expected ':-'", line);
      out.push_back({Tok::Neck, ":-", line});
      i += 2;
    } else if (c == ',') {
      out.push_back({Tok::Comma, ",", line});
      ++i;
    } else if (c == '.') {
      out.push_back({Tok::Period, ".", line});
      ++i;
    } else if (c == '=') {
      out.push_back({Tok::Equals, "=", line});
      ++i;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", line});
      ++i;
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", line});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < src.size() && is_word_char(src[i])) ++i;
      out.push_back({Tok::Word, std::string(src.substr(start, i - start)), line});
    }
  }
  // A clause left open at end of input is reported on its last line.
  out.push_back({Tok::End, "end of input", out.empty() ? line : out.back().line});
  return out;
}

// ---------------------------------------------------------------------------
// Clause syntax

struct RawCond {
  enum class Kind { Leaf, Ref, Not, True } kind;
  Condition condition;          // Leaf
  std::string ref;              // Ref
  std::vector<RawCond> inner;   // Not: exactly one
  std::size_t line = 0;

  std::string key() const {
    switch (kind) {
      case Kind::Leaf: return condition.to_string();
      case Kind::Ref: return ref;
      case Kind::True: return "true";
      case Kind::Not: return "not(" + inner.front().key() + ")";
    }
    return {};
  }
};

struct Clause {
  std::string head;
  std::vector<RawCond> body;
  std::size_t line = 0;
};

class ClauseParser {
 public:
  explicit ClauseParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<Clause> parse_all() {
    std::vector<Clause> clauses;
    while (peek().kind != Tok::End) clauses.push_back(parse_clause());
    return clauses;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw ParseError(std::string("expected ") + what + ", found '" + t.text + "'", t.line);
    }
    return take();
  }

  Clause parse_clause() {
    Clause c;
    const Token& head = peek();
    if (head.kind != Tok::Word) {
      throw ParseError("malformed clause: expected a head, found '" + head.text + "'", head.line);
    }
    c.head = take().text;
    c.line = head.line;
    if (c.head == "true" || c.head == "not") {
      throw ParseError("'" + c.head + "' is reserved and cannot be a clause head", head.line);
    }
    if (peek().kind != Tok::Neck) {
      throw ParseError("malformed clause for '" + c.head + "': expected ':-', found '" +
                           peek().text + "'",
                       peek().line);
    }
    take();
    std::set<std::string> keys;
    for (;;) {
      RawCond cond = parse_cond();
      if (!keys.insert(cond.key()).second) {
        throw ParseError("duplicate condition '" + cond.key() + "' in clause for '" + c.head + "'",
                         cond.line);
      }
      c.body.push_back(std::move(cond));
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      if (peek().kind == Tok::Period) {
        take();
        break;
      }
      throw ParseError("malformed clause for '" + c.head + "': expected ',' or '.', found '" +
                           peek().text + "'",
                       peek().line);
    }
    return c;
  }

  RawCond parse_cond() {
    const Token& t = peek();
    if (t.kind != Tok::Word) {
      throw ParseError("expected a condition, found '" + t.text + "'", t.line);
    }
    RawCond c;
    c.line = t.line;
    const std::string word = take().text;
    if (word == "not" && peek().kind == Tok::LParen) {
      take();
      c.kind = RawCond::Kind::Not;
      c.inner.push_back(parse_cond());
      expect(Tok::RParen, "')' closing not(");
      return c;
    }
    if (peek().kind == Tok::Equals) {
      take();
      const Token& value = peek();
      if (value.kind != Tok::Word) {
        throw ParseError("expected a value after '" + word + "=', found '" + value.text + "'",
                         value.line);
      }
      c.kind = RawCond::Kind::Leaf;
      c.condition = {word, take().text};
      return c;
    }
    if (word == "true") {
      c.kind = RawCond::Kind::True;
      return c;
    }
    if (word == "not") throw ParseError("expected '(' after not", peek().line);
    c.kind = RawCond::Kind::Ref;
    c.ref = word;
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Expansion of head references into a tree

class Expander {
 public:
  explicit Expander(const std::vector<Clause>& clauses) {
    for (const Clause& c : clauses) {
      auto [it, inserted] = defs_.try_emplace(c.head);
      if (inserted) order_.push_back(c.head);
      it->second.push_back(&c);
    }
  }

  std::vector<Concept> run() {
    std::set<std::string> referenced;
    for (const auto& head : order_) {
      for (const Clause* c : defs_[head]) {
        for (const RawCond& cond : c->body) collect_refs(cond, referenced);
      }
    }
    for (const auto& head : order_) check_cycles(head);

    std::vector<Concept> concepts;
    for (const auto& head : order_) {
      if (referenced.count(head)) continue;
      std::vector<std::string> stack;
      concepts.push_back({head, expand(head, head, stack)});
    }
    return concepts;
  }

 private:
  void collect_refs(const RawCond& cond, std::set<std::string>& out) {
    if (cond.kind == RawCond::Kind::Ref) {
      if (!defs_.count(cond.ref)) {
        throw ParseError("undefined head reference '" + cond.ref + "'", cond.line);
      }
      out.insert(cond.ref);
    }
    for (const RawCond& in : cond.inner) collect_refs(in, out);
  }

  // Depth-first search over the head reference graph.
  void check_cycles(const std::string& start) {
    enum Mark { Fresh, Active, Done };
    std::map<std::string, Mark> marks;
    std::vector<std::string> trail;
    std::function<void(const std::string&)> dfs = [&](const std::string& head) {
      marks[head] = Active;
      trail.push_back(head);
      for (const Clause* c : defs_[head]) {
        std::vector<const RawCond*> pending;
        for (const RawCond& cond : c->body) pending.push_back(&cond);
        while (!pending.empty()) {
          const RawCond* cond = pending.back();
          pending.pop_back();
          for (const RawCond& in : cond->inner) pending.push_back(&in);
          if (cond->kind != RawCond::Kind::Ref) continue;
          const Mark m = marks.count(cond->ref) ? marks[cond->ref] : Fresh;
          if (m == Active) {
            std::string cycle;
            auto from = std::find(trail.begin(), trail.end(), cond->ref);
            for (auto it = from; it != trail.end(); ++it) cycle += *it + " -> ";
            throw ParseError("cyclic reference: " + cycle + cond->ref, cond->line);
          }
          if (m == Fresh) dfs(cond->ref);
        }
      }
      trail.pop_back();
      marks[head] = Done;
    };
    if (!marks.count(start)) dfs(start);
  }

  TheoryNode expand(const std::string& head, const std::string& path,
                    std::vector<std::string>& stack) {
    stack.push_back(head);
    const auto& clauses = defs_.at(head);
    TheoryNode node = TheoryNode::truth(path);
    if (clauses.size() == 1) {
      node = body_node(*clauses.front(), path, stack);
    } else {
      std::vector<TheoryNode> alternatives;
      for (std::size_t k = 0; k < clauses.size(); ++k) {
        alternatives.push_back(body_node(*clauses[k], path + "/#" + std::to_string(k + 1), stack));
      }
      node = TheoryNode::disjunction(std::move(alternatives), path);
    }
    node.set_head(head);
    stack.pop_back();
    return node;
  }

  TheoryNode body_node(const Clause& clause, const std::string& path,
                       std::vector<std::string>& stack) {
    if (clause.body.size() == 1) return cond_node(clause.body.front(), path, false, stack);
    std::vector<TheoryNode> children;
    for (const RawCond& cond : clause.body) children.push_back(cond_node(cond, path, true, stack));
    return TheoryNode::conjunction(std::move(children), path);
  }

  // Head references always get their own path segment; other conditions get
  // one only when they sit beside siblings.
  TheoryNode cond_node(const RawCond& cond, const std::string& parent, bool own_segment,
                       std::vector<std::string>& stack) {
    const std::string path = own_segment ? parent + "/" + cond.key() : parent;
    switch (cond.kind) {
      case RawCond::Kind::Leaf: return TheoryNode::leaf(cond.condition, path);
      case RawCond::Kind::True: return TheoryNode::truth(path);
      case RawCond::Kind::Not:
        return TheoryNode::negation(cond_node(cond.inner.front(), path, true, stack), path);
      case RawCond::Kind::Ref: return expand(cond.ref, parent + "/" + cond.ref, stack);
    }
    throw Error("unreachable condition kind");
  }

  std::unordered_map<std::string, std::vector<const Clause*>> defs_;
  std::vector<std::string> order_;
};

}  // namespace

Theory parse_theory(std::string_view text) {
  ClauseParser parser(tokenize(text));
  const std::vector<Clause> clauses = parser.parse_all();
  if (clauses.empty()) throw ParseError("empty theory: no clauses found", 1);
  return Theory(Expander(clauses).run(), std::string(text));
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

class Renderer {
 public:
  explicit Renderer(const Theory& theory) {
    for (const Concept& c : theory.concepts()) used_.insert(c.name);
  }

  void emit_concept(const Concept& c) {
    emit_head(c.name, c.root);
    while (!pending_.empty()) {
      auto [name, node] = pending_.front();
      pending_.pop_front();
      emit_head(name, *node);
    }
    out_ += '\n';
  }

  std::string take() { return std::move(out_); }

 private:
  void emit_head(const std::string& name, const TheoryNode& node) {
    if (node.kind() == NodeKind::Or) {
      for (const TheoryNode& child : node.children()) {
        out_ += name + " :- " + body(child) + ".\n";
      }
    } else {
      out_ += name + " :- " + body(node) + ".\n";
    }
  }

  std::string body(const TheoryNode& node) {
    if (node.kind() != NodeKind::And) return cond(node);
    std::string s;
    for (const TheoryNode& child : node.children()) {
      if (!s.empty()) s += ", ";
      s += cond(child);
    }
    return s;
  }

  std::string cond(const TheoryNode& node) {
    switch (node.kind()) {
      case NodeKind::Leaf: return node.condition().to_string();
      case NodeKind::True: return "true";
      case NodeKind::Not: return "not(" + cond(node.children().front()) + ")";
      case NodeKind::And:
      case NodeKind::Or: {
        const std::string name = fresh(node.head().empty() ? "group" : node.head());
        pending_.emplace_back(name, &node);
        return name;
      }
    }
    return {};
  }

  std::string fresh(const std::string& base) {
    std::string name = base;
    for (int i = 2; used_.count(name); ++i) name = base + "_" + std::to_string(i);
    used_.insert(name);
    return name;
  }

  std::set<std::string> used_;
  std::deque<std::pair<std::string, const TheoryNode*>> pending_;
  std::string out_;
};

void outline(const TheoryNode& node, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += to_string(node.kind());
  if (node.kind() == NodeKind::Leaf) {
    out += ' ';
    out += node.condition().to_string();
  }
  out += "  ";
  out += node.path();
  out += '\n';
  for (const TheoryNode& child : node.children()) outline(child, depth + 1, out);
}

}  // namespace

std::string render_theory(const Theory& theory) {
  Renderer r(theory);
  for (const Concept& c : theory.concepts()) r.emit_concept(c);
  return r.take();
}

std::string render_outline(const Theory& theory) {
  std::string out;
  for (const Concept& c : theory.concepts()) {
    out += "concept " + c.name + "\n";
    outline(c.root, 1, out);
  }
  return out;
}

bool structurally_equal(const TheoryNode& a, const TheoryNode& b) {
  if (a.kind() != b.kind() || a.children().size() != b.children().size()) return false;
  if (a.kind() == NodeKind::Leaf && !(a.condition() == b.condition())) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!structurally_equal(a.children()[i], b.children()[i])) return false;
  }
  return true;
}

std::size_t internal_node_count(const TheoryNode& node) {
  std::size_t n = 0;
  for_each_node(node, [&](const TheoryNode& x) { n += x.is_internal() ? 1 : 0; });
  return n;
}

std::size_t internal_node_count(const Theory& theory) {
  std::size_t n = 0;
  for (const Concept& c : theory.concepts()) n += internal_node_count(c.root);
  return n;
}

bool contains_negation(const TheoryNode& node) {
  bool found = false;
  for_each_node(node, [&](const TheoryNode& x) { found = found || x.kind() == NodeKind::Not; });
  return found;
}

std::vector<ValidationFinding> validate(const Theory& theory, const Schema& schema) {
  std::vector<ValidationFinding> findings;
  for (const Concept& c : theory.concepts()) {
    for_each_node(c.root, [&](const TheoryNode& node) {
      if (node.kind() != NodeKind::Leaf) return;
      const Condition& cond = node.condition();
      const auto f = schema.feature_index(cond.feature);
      if (!f) {
        findings.push_back({node.path(), cond, "unknown feature '" + cond.feature + "'"});
      } else if (!schema.feature(*f).code_of(cond.value)) {
        findings.push_back({node.path(), cond,
                            "value '" + cond.value + "' is not allowed for feature '" +
                                cond.feature + "'"});
      }
    });
  }
  return findings;
}

// ---------------------------------------------------------------------------
// Fragments

namespace {

const TheoryNode* find_node(const TheoryNode& node,
                            const std::function<bool(const TheoryNode&)>& match) {
  if (match(node)) return &node;
  for (const TheoryNode& child : node.children()) {
    if (const TheoryNode* hit = find_node(child, match)) return hit;
  }
  return nullptr;
}

std::string rebase(const std::string& path, const std::string& from, const std::string& to) {
  return to + path.substr(from.size());
}

TheoryNode rebased(const TheoryNode& node, const std::string& from, const std::string& to) {
  const std::string path = rebase(node.path(), from, to);
  TheoryNode out = TheoryNode::truth(path);
  switch (node.kind()) {
    case NodeKind::Leaf: out = TheoryNode::leaf(node.condition(), path); break;
    case NodeKind::True: break;
    case NodeKind::Not:
      out = TheoryNode::negation(rebased(node.children().front(), from, to), path);
      break;
    case NodeKind::And:
    case NodeKind::Or: {
      std::vector<TheoryNode> children;
      for (const TheoryNode& c : node.children()) children.push_back(rebased(c, from, to));
      out = node.kind() == NodeKind::And ? TheoryNode::conjunction(std::move(children), path)
                                         : TheoryNode::disjunction(std::move(children), path);
      break;
    }
  }
  out.set_head(node.head());
  return out;
}

// "a/b/#2" -> "b#2", "a/b" -> "b".
std::string name_from_path(const std::string& path) {
  const auto parts = detail::split(path, '/');
  std::string last(parts.back());
  if (last.size() > 1 && last.front() == '#' && parts.size() > 1) {
    return std::string(parts[parts.size() - 2]) + last;
  }
  return last;
}

}  // namespace

Theory fragment(const Theory& theory, std::string_view head) {
  const TheoryNode* hit = nullptr;
  std::string name;
  for (const Concept& c : theory.concepts()) {
    hit = find_node(c.root, [&](const TheoryNode& n) { return n.path() == head; });
    if (hit) break;
  }
  if (!hit) {
    if (const Concept* c = theory.find(head)) hit = &c->root;
  }
  if (!hit) {
    for (const Concept& c : theory.concepts()) {
      hit = find_node(c.root, [&](const TheoryNode& n) { return n.head() == head; });
      if (hit) break;
    }
  }
  if (!hit) throw UsageError("no node or clause head named '" + std::string(head) + "'");

  if (const Concept* c = theory.find(head); c && &c->root == hit) {
    name = c->name;
  } else if (!hit->head().empty() && hit->head() == head) {
    name = hit->head();
  } else {
    name = name_from_path(hit->path());
  }
  std::vector<Concept> concepts{{name, rebased(*hit, hit->path(), name)}};
  Theory out(std::move(concepts), {});
  return Theory(out.concepts(), render_theory(out));
}

}  // namespace tgci
