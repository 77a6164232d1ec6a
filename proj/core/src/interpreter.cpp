#include "tgci/interpreter.hpp"

#include <algorithm>
#include <map>

#include "text.hpp"
#include "tgci/error.hpp"

namespace tgci {

std::string_view to_string(InterpreterKind kind) {
  return kind == InterpreterKind::PartialMatch ? "partial-match" : "boolean";
}

InterpreterKind parse_interpreter_kind(std::string_view text) {
  if (text == "partial-match" || text == "partial") return InterpreterKind::PartialMatch;
  if (text == "boolean") return InterpreterKind::Boolean;
  throw UsageError("unknown interpreter '" + std::string(text) +
                   "' (expected partial-match or boolean)");
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::PartialMatch: return "partial-match";
    case FeatureKind::Boolean: return "boolean";
    case FeatureKind::Original: return "original";
  }
  return "?";
}

std::size_t ConstructedSchema::constructed_count() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(), [](const auto& f) {
    return f.kind != FeatureKind::Original;
  }));
}

std::string feature_name_for(std::string_view path) {
  const auto parts = detail::split(path, '/');
  std::string name(parts.back());
  if (name.size() > 1 && name.front() == '#' && parts.size() > 1) {
    name = std::string(parts[parts.size() - 2]) + name;
  }
  for (char& c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '+' || c == '#' || c == '=' || c == '.' || c == '-';
    if (!ok) c = '_';
  }
  return name;
}

namespace {

bool emits(const TheoryNode& node, const InterpreterOptions& options) {
  switch (node.kind()) {
    case NodeKind::And:
    case NodeKind::Or: return true;
    case NodeKind::Not: return options.not_emits_feature;
    default: return false;
  }
}

bool condition_holds(const Condition& cond, const Example& example, const Schema& schema) {
  const auto f = schema.feature_index(cond.feature);
  if (!f) throw DataError("condition '" + cond.to_string() + "' names an unknown feature");
  const auto code = schema.feature(*f).code_of(cond.value);
  return code && example.values.at(*f) == *code;
}

// Computes the node's top value and appends emitted values in pre-order.
// `root` suppresses the node's own feature when top features are disabled.
template <bool Boolean>
double evaluate(const TheoryNode& node, const Example& example, const Schema& schema,
                const InterpreterOptions& options, bool root, std::vector<double>& out) {
  switch (node.kind()) {
    case NodeKind::Leaf:
      if constexpr (Boolean) return condition_holds(node.condition(), example, schema) ? 1.0 : 0.0;
      else return condition_holds(node.condition(), example, schema) ? 1.0 : -1.0;
    case NodeKind::True:
      return 1.0;
    default:
      break;
  }
  const bool own = emits(node, options) && (!root || options.top_feature_included);
  const std::size_t slot = out.size();
  if (own) out.push_back(0.0);

  const auto& children = node.children();
  double top = 0.0;
  if (node.kind() == NodeKind::Not) {
    const double child = evaluate<Boolean>(children.front(), example, schema, options, false, out);
    if constexpr (Boolean) top = 1.0 - child;
    else top = -child;
  } else if (node.kind() == NodeKind::Or) {
    top = Boolean ? 0.0 : -1.0;
    for (const TheoryNode& c : children) {
      top = std::max(top, evaluate<Boolean>(c, example, schema, options, false, out));
    }
  } else {
    double sum = 0.0;
    bool all = true;
    for (const TheoryNode& c : children) {
      const double v = evaluate<Boolean>(c, example, schema, options, false, out);
      sum += v;
      all = all && v == 1.0;
    }
    if constexpr (Boolean) top = all ? 1.0 : 0.0;
    else top = sum / static_cast<double>(children.size());
  }
  if (own) out[slot] = top;
  return top;
}

void layout(const TheoryNode& node, const InterpreterOptions& options, bool root,
            std::vector<ConstructedFeature>& out) {
  if (emits(node, options) && (!root || options.top_feature_included)) {
    const FeatureKind kind = options.kind == InterpreterKind::Boolean ? FeatureKind::Boolean
                                                                      : FeatureKind::PartialMatch;
    out.push_back({feature_name_for(node.path()), node.path(), kind, {}});
  }
  for (const TheoryNode& c : node.children()) layout(c, options, false, out);
}

template <bool Boolean>
Interpretation interpret(const TheoryNode& node, const Example& example, const Schema& schema,
                         const InterpreterOptions& options) {
  std::vector<double> values;
  Interpretation result;
  result.top = evaluate<Boolean>(node, example, schema, options, true, values);
  auto opts = options;
  opts.kind = Boolean ? InterpreterKind::Boolean : InterpreterKind::PartialMatch;
  const auto names = constructed_features(node, opts);
  result.features.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) result.features.push_back({names[i].name, values[i]});
  return result;
}

// Widens names of colliding features with more trailing path segments; any
// remaining collisions get a theory-index prefix.
void disambiguate(std::vector<ConstructedFeature>& features, const std::vector<std::size_t>& owner) {
  auto segments_name = [](const std::string& path, std::size_t depth) {
    auto parts = detail::split(path, '/');
    // Glue "#k" ordinals to their predecessor so they count as one unit.
    std::vector<std::string> units;
    for (auto p : parts) {
      if (p.size() > 1 && p.front() == '#' && !units.empty()) units.back() += std::string(p);
      else units.emplace_back(p);
    }
    const std::size_t take = std::min(depth, units.size());
    std::string name;
    for (std::size_t i = units.size() - take; i < units.size(); ++i) {
      if (!name.empty()) name += '/';
      name += feature_name_for(units[i]);
    }
    return name;
  };
  std::vector<std::size_t> depth(features.size(), 1);
  for (int round = 0; round < 64; ++round) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < features.size(); ++i) groups[features[i].name].push_back(i);
    bool changed = false;
    for (auto& [name, members] : groups) {
      if (members.size() < 2) continue;
      for (std::size_t i : members) {
        const std::string wider = segments_name(features[i].source, depth[i] + 1);
        if (wider != features[i].name) {
          ++depth[i];
          features[i].name = wider;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  std::map<std::string, std::size_t> count;
  for (const auto& f : features) ++count[f.name];
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (count[features[i].name] > 1) {
      features[i].name = "t" + std::to_string(owner[i] + 1) + ":" + features[i].name;
    }
  }
}

}  // namespace

std::vector<ConstructedFeature> constructed_features(const TheoryNode& root,
                                                     const InterpreterOptions& options) {
  std::vector<ConstructedFeature> out;
  layout(root, options, true, out);
  return out;
}

Interpretation tgci1(const TheoryNode& node, const Example& example, const Schema& schema,
                     const InterpreterOptions& options) {
  return interpret<false>(node, example, schema, options);
}

Interpretation boolean_interpret(const TheoryNode& node, const Example& example,
                                 const Schema& schema, const InterpreterOptions& options) {
  return interpret<true>(node, example, schema, options);
}

Redescription redescribe(const Dataset& data, std::span<const Theory> theories,
                         const InterpreterOptions& options) {
  const Schema& schema = data.schema();
  for (std::size_t t = 0; t < theories.size(); ++t) {
    const auto findings = validate(theories[t], schema);
    if (!findings.empty()) {
      throw DataError("theory " + std::to_string(t + 1) + " is inconsistent with the data: " +
                      findings.front().path + ": " + findings.front().problem +
                      (findings.size() > 1
                           ? " (and " + std::to_string(findings.size() - 1) + " more)"
                           : std::string()));
    }
  }

  Redescription r;
  r.schema.options = options;
  r.classes = schema.classes();
  std::vector<std::size_t> owner;
  for (std::size_t t = 0; t < theories.size(); ++t) {
    for (const Concept& c : theories[t].concepts()) {
      for (auto& f : constructed_features(c.root, options)) {
        r.schema.features.push_back(std::move(f));
        owner.push_back(t);
      }
    }
  }
  const std::size_t constructed = r.schema.features.size();
  disambiguate(r.schema.features, owner);

  if (constructed == 0 && !options.include_original_features) {
    throw UsageError(
        "the theories yield no constructed features (single-leaf or TRUE concepts); "
        "enable include_original_features to learn from the original features");
  }
  if (options.include_original_features) {
    for (const Feature& f : schema.features()) {
      r.schema.features.push_back({f.name, f.name, FeatureKind::Original, f.values});
    }
    std::map<std::string, std::size_t> count;
    for (const auto& f : r.schema.features) ++count[f.name];
    for (std::size_t i = constructed; i < r.schema.features.size(); ++i) {
      if (count[r.schema.features[i].name] > 1) r.schema.features[i].name = "orig:" + r.schema.features[i].name;
    }
  }

  r.examples.reserve(data.size());
  const bool boolean = options.kind == InterpreterKind::Boolean;
  for (const Example& e : data.examples()) {
    RedescribedExample re{e.id, e.label, {}};
    re.values.reserve(r.schema.features.size());
    for (const Theory& theory : theories) {
      for (const Concept& c : theory.concepts()) {
        if (boolean) evaluate<true>(c.root, e, schema, options, true, re.values);
        else evaluate<false>(c.root, e, schema, options, true, re.values);
      }
    }
    if (options.include_original_features) {
      for (ValueCode v : e.values) re.values.push_back(static_cast<double>(v));
    }
    r.examples.push_back(std::move(re));
  }
  return r;
}

std::string write_redescription_csv(const Redescription& r) {
  std::string out;
  for (const auto& f : r.schema.features) {
    out += f.name;
    out += ',';
  }
  out += "class\n";
  for (const auto& e : r.examples) {
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      const auto& f = r.schema.features[i];
      if (f.kind == FeatureKind::Original) out += f.values[static_cast<std::size_t>(e.values[i])];
      else out += detail::format_double(e.values[i]);
      out += ',';
    }
    out += r.classes[e.label];
    out += '\n';
  }
  return out;
}

}  // namespace tgci
