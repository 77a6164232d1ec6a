#include "tgci/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "tgci/error.hpp"

namespace tgci {

LearningTable LearningTable::from_dataset(const Dataset& data) {
  LearningTable t;
  for (const Feature& f : data.schema().features()) {
    t.columns.push_back({f.name, ColumnKind::Nominal, f.values});
  }
  t.classes = data.schema().classes();
  t.rows.reserve(data.size());
  for (const Example& e : data.examples()) {
    t.rows.emplace_back(e.values.begin(), e.values.end());
    t.labels.push_back(e.label);
  }
  return t;
}

LearningTable LearningTable::from_redescription(const Redescription& r) {
  LearningTable t;
  for (const auto& f : r.schema.features) {
    if (f.kind == FeatureKind::Original) t.columns.push_back({f.name, ColumnKind::Nominal, f.values});
    else t.columns.push_back({f.name, ColumnKind::Continuous, {}});
  }
  t.classes = r.classes;
  t.rows.reserve(r.examples.size());
  for (const auto& e : r.examples) {
    t.rows.push_back(e.values);
    t.labels.push_back(e.label);
  }
  return t;
}

LearningTable LearningTable::subset(std::span<const std::size_t> indices) const {
  LearningTable t;
  t.columns = columns;
  t.classes = classes;
  t.rows.reserve(indices.size());
  for (std::size_t i : indices) {
    t.rows.push_back(rows.at(i));
    t.labels.push_back(labels.at(i));
  }
  return t;
}

void LearnerParams::check() const {
  if (min_leaf < 1) throw UsageError("min_leaf must be at least 1");
  if (!(pruning_confidence > 0.0 && pruning_confidence <= 1.0)) {
    throw UsageError("pruning confidence must lie in (0, 1]");
  }
}

std::size_t TreeNode::total() const {
  return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::vector<Column> columns,
                           std::vector<std::string> classes, LearnerParams params)
    : nodes_(std::move(nodes)),
      columns_(std::move(columns)),
      classes_(std::move(classes)),
      params_(params) {
  if (nodes_.empty()) throw UsageError("a decision tree needs at least one node");
}

namespace {

std::size_t majority_child(const std::vector<TreeNode>& nodes, const TreeNode& node) {
  std::size_t best = node.children.front();
  for (std::size_t c : node.children) {
    if (nodes[c].total() > nodes[best].total()) best = c;
  }
  return best;
}

}  // namespace

std::size_t DecisionTree::predict(std::span<const double> row) const {
  if (row.size() != columns_.size()) {
    throw UsageError("row has " + std::to_string(row.size()) + " features, tree expects " +
                     std::to_string(columns_.size()));
  }
  const TreeNode* node = &nodes_.front();
  while (!node->leaf) {
    const double v = row[node->test.feature];
    std::size_t next;
    if (node->test.kind == SplitTest::Kind::Threshold) {
      next = node->children[v <= node->test.threshold ? 0 : 1];
    } else if (v >= 0 && v < static_cast<double>(node->children.size()) && v == std::floor(v)) {
      next = node->children[static_cast<std::size_t>(v)];
    } else {
      next = majority_child(nodes_, *node);
    }
    node = &nodes_[next];
  }
  return node->predicted;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.leaf; }));
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> d = [&](std::size_t i) -> std::size_t {
    std::size_t best = 0;
    for (std::size_t c : nodes_[i].children) best = std::max(best, 1 + d(c));
    return best;
  };
  return d(0);
}

double pessimistic_extra_errors(double cases, double errors, double cf) {
  if (cases <= 0.0) return 0.0;
  if (errors < 1e-6) return cases * (1.0 - std::exp(std::log(cf) / cases));
  if (errors < 0.9999) {
    const double v0 = cases * (1.0 - std::exp(std::log(cf) / cases));
    return v0 + errors * (pessimistic_extra_errors(cases, 1.0, cf) - v0);
  }
  if (errors + 0.5 >= cases) return 0.67 * (cases - errors);
  double z = 0.0;
  if (cf < 0.5) z = boost::math::quantile(boost::math::normal(), 1.0 - cf);
  const double coeff = z * z;
  const double e = errors + 0.5;
  const double pr =
      (e + coeff / 2.0 + std::sqrt(coeff * (e * (1.0 - e / cases) + coeff / 4.0))) /
      (cases + coeff);
  return cases * pr - errors;
}

namespace {

constexpr double kTie = 1e-10;

double entropy(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

struct Candidate {
  std::size_t feature = 0;
  SplitTest::Kind kind = SplitTest::Kind::Threshold;
  double threshold = 0.0;
  double gain = 0.0;
  double ratio = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const LearningTable& table, const LearnerParams& params)
      : t_(table), params_(params), n_classes_(table.classes.size()) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(t_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  std::vector<std::size_t> counts_of(std::span<const std::size_t> idx) const {
    std::vector<std::size_t> counts(n_classes_, 0);
    for (std::size_t i : idx) ++counts[t_.labels[i]];
    return counts;
  }

  static std::size_t majority(const std::vector<std::size_t>& counts) {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) -
                                    counts.begin());
  }

  std::size_t grow(const std::vector<std::size_t>& idx, std::size_t fallback_class) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    TreeNode node;
    node.class_counts = counts_of(idx);
    node.predicted = idx.empty() ? fallback_class : majority(node.class_counts);

    const bool pure = std::count_if(node.class_counts.begin(), node.class_counts.end(),
                                    [](std::size_t c) { return c > 0; }) <= 1;
    std::optional<Candidate> split;
    if (!pure && idx.size() >= 2 * params_.min_leaf) split = best_split(idx);
    if (!split) {
      nodes_[id] = std::move(node);
      return id;
    }

    node.leaf = false;
    node.test = {split->kind, split->feature, split->threshold};
    std::vector<std::vector<std::size_t>> parts;
    if (split->kind == SplitTest::Kind::Threshold) {
      parts.resize(2);
      for (std::size_t i : idx) parts[t_.rows[i][split->feature] <= split->threshold ? 0 : 1].push_back(i);
    } else {
      parts.resize(t_.columns[split->feature].values.size());
      for (std::size_t i : idx) parts[static_cast<std::size_t>(t_.rows[i][split->feature])].push_back(i);
    }
    const std::size_t predicted = node.predicted;
    nodes_[id] = std::move(node);
    std::vector<std::size_t> children;
    for (const auto& part : parts) children.push_back(grow(part, predicted));
    nodes_[id].children = std::move(children);
    return id;
  }

  std::optional<Candidate> best_split(const std::vector<std::size_t>& idx) const {
    const double n = static_cast<double>(idx.size());
    std::vector<double> total(n_classes_, 0.0);
    for (std::size_t i : idx) total[t_.labels[i]] += 1.0;
    const double base = entropy(total, n);

    std::vector<Candidate> candidates;
    for (std::size_t f = 0; f < t_.columns.size(); ++f) {
      std::optional<Candidate> c = t_.columns[f].kind == ColumnKind::Nominal
                                       ? nominal_candidate(f, idx, base)
                                       : threshold_candidate(f, idx, total, base);
      if (c && c->gain > kTie) candidates.push_back(*c);
    }
    if (candidates.empty()) return std::nullopt;

    if (!params_.use_gain_ratio) {
      const Candidate* best = &candidates.front();
      for (const auto& c : candidates) {
        if (c.gain > best->gain + kTie) best = &c;
      }
      return *best;
    }
    double mean_gain = 0.0;
    for (const auto& c : candidates) mean_gain += c.gain;
    mean_gain /= static_cast<double>(candidates.size());
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
      if (c.gain < mean_gain - kTie) continue;
      if (!best || c.ratio > best->ratio + kTie) best = &c;
    }
    return *best;
  }

  std::optional<Candidate> nominal_candidate(std::size_t f, const std::vector<std::size_t>& idx,
                                             double base) const {
    const std::size_t k = t_.columns[f].values.size();
    std::vector<std::vector<double>> counts(k, std::vector<double>(n_classes_, 0.0));
    std::vector<double> sizes(k, 0.0);
    for (std::size_t i : idx) {
      const auto v = static_cast<std::size_t>(t_.rows[i][f]);
      counts[v][t_.labels[i]] += 1.0;
      sizes[v] += 1.0;
    }
    const auto big = std::count_if(sizes.begin(), sizes.end(), [&](double s) {
      return s >= static_cast<double>(params_.min_leaf);
    });
    if (big < 2) return std::nullopt;
    const double n = static_cast<double>(idx.size());
    double remainder = 0.0;
    double split_info = 0.0;
    for (std::size_t v = 0; v < k; ++v) {
      if (sizes[v] == 0.0) continue;
      const double p = sizes[v] / n;
      remainder += p * entropy(counts[v], sizes[v]);
      split_info -= p * std::log2(p);
    }
    Candidate c;
    c.feature = f;
    c.kind = SplitTest::Kind::Nominal;
    c.gain = base - remainder;
    c.ratio = split_info > 0.0 ? c.gain / split_info : 0.0;
    return c;
  }

  std::optional<Candidate> threshold_candidate(std::size_t f, const std::vector<std::size_t>& idx,
                                               const std::vector<double>& total,
                                               double base) const {
    std::vector<std::size_t> order = idx;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return t_.rows[a][f] < t_.rows[b][f];
    });
    const double n = static_cast<double>(order.size());
    std::vector<double> left(n_classes_, 0.0);
    std::vector<double> right = total;
    std::optional<Candidate> best;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t label = t_.labels[order[i]];
      left[label] += 1.0;
      right[label] -= 1.0;
      const double lo = t_.rows[order[i]][f];
      const double hi = t_.rows[order[i + 1]][f];
      if (!(lo < hi)) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      if (nl < static_cast<double>(params_.min_leaf) || nr < static_cast<double>(params_.min_leaf)) {
        continue;
      }
      const double gain = base - (nl / n) * entropy(left, nl) - (nr / n) * entropy(right, nr);
      if (best && gain <= best->gain + kTie) continue;
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold > lo && threshold < hi)) threshold = lo;
      const double split_info = -(nl / n) * std::log2(nl / n) - (nr / n) * std::log2(nr / n);
      best = Candidate{f, SplitTest::Kind::Threshold, threshold, gain, gain / split_info};
    }
    return best;
  }

  const LearningTable& t_;
  const LearnerParams& params_;
  std::size_t n_classes_;
  std::vector<TreeNode> nodes_;
};

// Bottom-up subtree replacement; returns the estimated error count of the
// (possibly collapsed) subtree.
double prune(std::vector<TreeNode>& nodes, std::size_t id, double cf) {
  TreeNode& node = nodes[id];
  const double cases = static_cast<double>(node.total());
  const double errors = cases - static_cast<double>(node.class_counts[node.predicted]);
  const double as_leaf = errors + pessimistic_extra_errors(cases, errors, cf);
  if (node.leaf) return as_leaf;
  double subtree = 0.0;
  const std::vector<std::size_t> children = node.children;
  for (std::size_t c : children) subtree += prune(nodes, c, cf);
  if (as_leaf <= subtree + 0.1) {
    TreeNode& again = nodes[id];
    again.leaf = true;
    again.children.clear();
    again.test = {};
    return as_leaf;
  }
  return subtree;
}

// Copies the nodes reachable from the root into a fresh pre-ordered array.
std::vector<TreeNode> compact(const std::vector<TreeNode>& nodes) {
  std::vector<TreeNode> out;
  std::function<std::size_t(std::size_t)> copy = [&](std::size_t id) -> std::size_t {
    const std::size_t at = out.size();
    out.push_back(nodes[id]);
    std::vector<std::size_t> children;
    for (std::size_t c : nodes[id].children) children.push_back(copy(c));
    out[at].children = std::move(children);
    return at;
  };
  copy(0);
  return out;
}

}  // namespace

DecisionTree train_tree(const LearningTable& table, const LearnerParams& params) {
  params.check();
  if (table.rows.empty()) throw UsageError("cannot train on an empty dataset");
  if (table.columns.empty()) throw UsageError("cannot train without features");
  if (table.classes.empty()) throw UsageError("cannot train without class labels");
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw UsageError("ragged learning table");
  }
  std::vector<TreeNode> nodes = TreeBuilder(table, params).build();
  if (params.prune) {
    prune(nodes, 0, params.pruning_confidence);
    nodes = compact(nodes);
  }
  return DecisionTree(std::move(nodes), table.columns, table.classes, params);
}

std::unique_ptr<Classifier> DecisionTreeLearner::fit(const LearningTable& table) const {
  return std::make_unique<DecisionTree>(train_tree(table, params_));
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void render(const DecisionTree& tree, const std::vector<std::string>& names, std::size_t id,
            int depth, std::string& out) {
  const TreeNode& node = tree.nodes()[id];
  auto leaf_text = [&](const TreeNode& leaf) {
    const std::size_t n = leaf.total();
    const std::size_t errors = n - leaf.class_counts[leaf.predicted];
    std::string s = " : " + tree.classes()[leaf.predicted] + " (" + std::to_string(n);
    if (errors > 0) s += "/" + std::to_string(errors);
    return s + ")";
  };
  if (node.leaf) {
    if (depth == 0) out += "(leaf)" + leaf_text(node) + "\n";
    return;
  }
  const std::string& name = names[node.test.feature];
  for (std::size_t b = 0; b < node.children.size(); ++b) {
    for (int d = 0; d < depth; ++d) out += "|   ";
    if (node.test.kind == SplitTest::Kind::Threshold) {
      out += name + (b == 0 ? " <= " : " > ") + number(node.test.threshold);
    } else {
      out += name + " = " + tree.columns()[node.test.feature].values[b];
    }
    const TreeNode& child = tree.nodes()[node.children[b]];
    if (child.leaf) {
      out += leaf_text(child) + "\n";
    } else {
      out += "\n";
      render(tree, names, node.children[b], depth + 1, out);
    }
  }
}

}  // namespace

std::string render_tree(const DecisionTree& tree) {
  std::vector<std::string> names;
  for (const auto& c : tree.columns()) names.push_back(c.name);
  std::string out;
  render(tree, names, 0, 0, out);
  return out;
}

std::string render_tree(const DecisionTree& tree, const ConstructedSchema& schema) {
  if (schema.features.size() != tree.columns().size()) {
    throw UsageError("schema has " + std::to_string(schema.features.size()) +
                     " features but the tree was trained on " +
                     std::to_string(tree.columns().size()));
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < schema.features.size(); ++i) {
    if (schema.features[i].name != tree.columns()[i].name) {
      throw UsageError("schema feature " + std::to_string(i) + " is '" + schema.features[i].name +
                       "' but the tree column is '" + tree.columns()[i].name + "'");
    }
    names.push_back(schema.features[i].name);
  }
  std::string out;
  render(tree, names, 0, 0, out);
  return out;
}

std::string tree_to_json(const DecisionTree& tree) {
  using nlohmann::json;
  json doc;
  const auto& p = tree.params();
  doc["params"] = {{"min_leaf", p.min_leaf},
                   {"pruning_confidence", p.pruning_confidence},
                   {"use_gain_ratio", p.use_gain_ratio},
                   {"prune", p.prune},
                   {"seed", p.seed}};
  doc["classes"] = tree.classes();
  json columns = json::array();
  for (const auto& c : tree.columns()) {
    json col = {{"name", c.name},
                {"kind", c.kind == ColumnKind::Nominal ? "nominal" : "continuous"}};
    if (c.kind == ColumnKind::Nominal) col["values"] = c.values;
    columns.push_back(std::move(col));
  }
  doc["columns"] = std::move(columns);
  json nodes = json::array();
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const TreeNode& n = tree.nodes()[i];
    json node = {{"id", i},
                 {"leaf", n.leaf},
                 {"predicted", tree.classes()[n.predicted]},
                 {"class_counts", n.class_counts}};
    if (!n.leaf) {
      json test = {{"feature", n.test.feature}, {"feature_name", tree.columns()[n.test.feature].name}};
      if (n.test.kind == SplitTest::Kind::Threshold) {
        test["kind"] = "threshold";
        test["threshold"] = n.test.threshold;
      } else {
        test["kind"] = "nominal";
      }
      node["test"] = std::move(test);
      node["children"] = n.children;
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2);
}

double accuracy(const Classifier& model, const LearningTable& table) {
  if (table.rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (model.predict(table.rows[i]) == table.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(table.rows.size());
}

}  // namespace tgci
