#include "tgci/perturbation.hpp"

#include <cmath>

#include "parallel.hpp"
#include "text.hpp"
#include "tgci/error.hpp"
#include "tgci/interpreter.hpp"
#include "tgci/rng.hpp"

namespace tgci {

std::string_view to_string(Direction direction) {
  return direction == Direction::FewerMatches ? "fewer_matches" : "fewer_mismatches";
}

Direction parse_direction(std::string_view text) {
  if (text == "fewer_matches" || text == "fewer-matches") return Direction::FewerMatches;
  if (text == "fewer_mismatches" || text == "fewer-mismatches") return Direction::FewerMismatches;
  throw UsageError("unknown direction '" + std::string(text) +
                   "' (expected fewer_matches or fewer_mismatches)");
}

void ProximitySpec::check() const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("perturbation rate must lie in [0, 1]");
}

double ProximitySpec::proximity_x() const {
  return direction == Direction::FewerMismatches ? 100.0 * rate : -100.0 * rate;
}

std::string_view to_string(ConflictPolicy policy) {
  return policy == ConflictPolicy::Error ? "error" : "leave";
}

ConflictPolicy parse_conflict_policy(std::string_view text) {
  if (text == "error") return ConflictPolicy::Error;
  if (text == "leave") return ConflictPolicy::LeaveUntouched;
  throw UsageError("unknown conflict policy '" + std::string(text) + "' (expected error or leave)");
}

std::size_t intended_disjunct(const TheoryNode& or_node, const Example& example,
                              const Schema& schema) {
  if (or_node.kind() != NodeKind::Or) throw UsageError("intended_disjunct needs an Or node");
  std::size_t best = 0;
  double best_top = -2.0;
  const auto& children = or_node.children();
  for (std::size_t i = 0; i < children.size(); ++i) {
    const double top = tgci1(children[i], example, schema).top;
    if (top > best_top) {
      best_top = top;
      best = i;
    }
  }
  return best;
}

std::size_t Expectation::matching(const Example& example) const {
  std::size_t n = 0;
  for (std::size_t f = 0; f < expected.size(); ++f) {
    if (expected[f] && example.values[f] == *expected[f]) ++n;
  }
  return n;
}

namespace {

void collect(const TheoryNode& node, const Example& example, const Schema& schema,
             std::vector<std::optional<ValueCode>>& demanded, std::vector<char>& conflicted) {
  switch (node.kind()) {
    case NodeKind::True:
      return;
    case NodeKind::Not:
      throw UsageError("perturbation does not support theories containing not(...)");
    case NodeKind::Leaf: {
      const Condition& c = node.condition();
      const auto f = schema.feature_index(c.feature);
      const auto v = f ? schema.feature(*f).code_of(c.value) : std::nullopt;
      if (!f || !v) throw DataError("condition '" + c.to_string() + "' is not in the schema");
      if (demanded[*f] && *demanded[*f] != *v) conflicted[*f] = 1;
      demanded[*f] = *v;
      return;
    }
    case NodeKind::And:
      for (const TheoryNode& c : node.children()) collect(c, example, schema, demanded, conflicted);
      return;
    case NodeKind::Or:
      collect(node.children()[intended_disjunct(node, example, schema)], example, schema,
              demanded, conflicted);
      return;
  }
}

}  // namespace

Expectation expected_values(const TheoryNode& root, const Example& example, const Schema& schema) {
  if (contains_negation(root)) {
    throw UsageError("perturbation does not support theories containing not(...)");
  }
  std::vector<std::optional<ValueCode>> demanded(schema.feature_count());
  std::vector<char> conflicted(schema.feature_count(), 0);
  collect(root, example, schema, demanded, conflicted);
  Expectation e;
  for (std::size_t f = 0; f < demanded.size(); ++f) {
    if (conflicted[f]) {
      demanded[f].reset();
      e.conflicts.push_back(f);
    }
  }
  e.expected = std::move(demanded);
  return e;
}

Dataset perturb(const Dataset& data, const Theory& theory, const ProximitySpec& spec,
                ConflictPolicy policy) {
  spec.check();
  if (theory.empty()) throw UsageError("theory has no concepts");
  const Schema& schema = data.schema();
  const std::size_t positive = schema.positive_index();
  const TheoryNode& root = theory.concepts().front().root;
  if (contains_negation(root)) {
    throw UsageError("perturbation does not support theories containing not(...)");
  }
  const auto findings = validate(theory, schema);
  if (!findings.empty()) {
    throw DataError("theory is inconsistent with the data: " + findings.front().path + ": " +
                    findings.front().problem);
  }

  Rng rng(derive_seed(spec.seed, spec.replicate_index));
  std::vector<Example> examples = data.examples();
  for (Example& e : examples) {
    if (e.label != positive) continue;
    const Expectation ex = expected_values(root, e, schema);
    if (!ex.conflicts.empty() && policy == ConflictPolicy::Error) {
      throw DataError("example '" + e.id + "': the intended disjuncts demand different values for '" +
                      schema.feature(ex.conflicts.front()).name +
                      "' (use the leave conflict policy to skip such features)");
    }
    for (std::size_t f = 0; f < ex.expected.size(); ++f) {
      if (!ex.expected[f]) continue;
      const ValueCode want = *ex.expected[f];
      if (spec.direction == Direction::FewerMatches) {
        if (e.values[f] == want && rng.bernoulli(spec.rate)) {
          e.values[f] = static_cast<ValueCode>(rng.below(schema.feature(f).values.size()));
        }
      } else if (e.values[f] != want && rng.bernoulli(spec.rate)) {
        e.values[f] = want;
      }
    }
  }
  return Dataset(schema, std::move(examples));
}

const SweepRow& SweepResult::at(double proximity_x, std::string_view method) const {
  for (const auto& row : rows) {
    if (std::abs(row.proximity_x - proximity_x) < 1e-9 && row.method == method) return row;
  }
  throw UsageError("no sweep row for x=" + detail::format_double(proximity_x) + ", method " +
                   std::string(method));
}

SweepResult proximity_sweep(const Dataset& data, const Theory& theory,
                            const std::vector<Pipeline>& methods, const SweepSpec& spec) {
  if (methods.empty()) throw UsageError("no methods to evaluate");
  if (spec.replicates == 0) throw UsageError("at least one replicate is required");
  for (const auto& level : spec.levels) ProximitySpec{level.direction, level.rate}.check();

  SweepResult result;
  result.caveat =
      "The fewer-matches (x < 0) and fewer-mismatches (x > 0) scales are produced by different "
      "perturbations and may not be directly comparable.";

  for (const auto& m : methods) {
    const double acc = leave_one_out(data, m, spec.jobs);
    result.rows.push_back({0.0, std::string(to_string(m.method)), acc, 0.0, {acc}});
  }

  const std::size_t levels = spec.levels.size();
  std::vector<std::vector<std::vector<double>>> acc(
      levels, std::vector<std::vector<double>>(methods.size(), std::vector<double>(spec.replicates)));
  detail::parallel_for(levels * spec.replicates, spec.jobs, [&](std::size_t task) {
    const std::size_t k = task / spec.replicates;
    const std::size_t r = task % spec.replicates;
    const ProximitySpec ps{spec.levels[k].direction, spec.levels[k].rate, derive_seed(spec.seed, k), r};
    const Dataset perturbed = perturb(data, theory, ps, spec.policy);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      acc[k][m][r] = leave_one_out(perturbed, methods[m], 1);
    }
  });

  for (std::size_t k = 0; k < levels; ++k) {
    const double x = ProximitySpec{spec.levels[k].direction, spec.levels[k].rate}.proximity_x();
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const CurvePoint p = summarize(0, acc[k][m]);
      result.rows.push_back(
          {x, std::string(to_string(methods[m].method)), p.mean_accuracy, p.ci_half_width, acc[k][m]});
    }
  }
  return result;
}

std::vector<SweepLevel> parse_levels(std::string_view text) {
  std::vector<SweepLevel> levels;
  if (detail::trim(text).empty()) return levels;
  for (auto item : detail::split(text, ',')) {
    item = detail::trim(item);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw UsageError("level '" + std::string(item) + "' must look like fewer_matches:0.3");
    }
    SweepLevel level;
    level.direction = parse_direction(item.substr(0, colon));
    const auto rate = detail::parse_double(item.substr(colon + 1));
    if (!rate) throw UsageError("bad rate in level '" + std::string(item) + "'");
    level.rate = *rate;
    ProximitySpec{level.direction, level.rate}.check();
    levels.push_back(level);
  }
  return levels;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "proximity_x,method,mean,ci,replicates\n";
  for (const auto& row : result.rows) {
    out += detail::format_double(row.proximity_x) + ',' + row.method + ',' +
           detail::format_double(row.mean_accuracy) + ',' + detail::format_double(row.ci_half_width) +
           ',' + std::to_string(row.replicates.size()) + '\n';
  }
  return out;
}

}  // namespace tgci
