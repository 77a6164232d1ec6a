#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgci/dataset.hpp"
#include "tgci/evaluation.hpp"
#include "tgci/theory.hpp"

namespace tgci {

enum class Direction { FewerMatches, FewerMismatches };

std::string_view to_string(Direction direction);
Direction parse_direction(std::string_view text);

struct ProximitySpec {
  Direction direction = Direction::FewerMismatches;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicate_index = 0;

  void check() const;
  /// +100*rate for fewer mismatches, -100*rate for fewer matches.
  double proximity_x() const;
};

/// What to do when the chosen disjuncts demand two different values for one
/// feature.
enum class ConflictPolicy { Error, LeaveUntouched };

std::string_view to_string(ConflictPolicy policy);
ConflictPolicy parse_conflict_policy(std::string_view text);

/// Child of an Or node with the highest partial-match value for the example;
/// the lowest index wins ties.
std::size_t intended_disjunct(const TheoryNode& or_node, const Example& example,
                              const Schema& schema);

struct Expectation {
  /// Indexed by schema feature; set for features the chosen disjuncts test.
  std::vector<std::optional<ValueCode>> expected;
  /// Features demanded with two different values (left unset in `expected`).
  std::vector<std::size_t> conflicts;

  /// Features whose current value equals the expected value.
  std::size_t matching(const Example& example) const;
};

/// Walks the concept top-down, following every And child and the intended
/// disjunct of every Or node, and collects the conditions reached. Throws
/// UsageError if the tree contains Not.
Expectation expected_values(const TheoryNode& root, const Example& example, const Schema& schema);

/// Positive examples only. fewer matches: each feature equal to its expected
/// value is, with probability rate, redrawn uniformly from all its values.
/// fewer mismatches: each feature differing from its expected value is, with
/// probability rate, set to it. Features are visited in schema order with one
/// RNG stream seeded from derive_seed(seed, replicate_index). Uses the first
/// concept of the theory. Throws DataError on a conflict under
/// ConflictPolicy::Error.
Dataset perturb(const Dataset& data, const Theory& theory, const ProximitySpec& spec,
                ConflictPolicy policy = ConflictPolicy::Error);

struct SweepLevel {
  Direction direction = Direction::FewerMismatches;
  double rate = 0.0;
};

struct SweepRow {
  double proximity_x = 0.0;
  std::string method;
  double mean_accuracy = 0.0;
  double ci_half_width = 0.0;
  /// Leave-one-out accuracy of each replicate.
  std::vector<double> replicates;
};

struct SweepResult {
  /// Original-data rows first, then levels in order, methods in order.
  std::vector<SweepRow> rows;
  std::string caveat;

  /// Row for (x, method); throws UsageError when absent.
  const SweepRow& at(double proximity_x, std::string_view method) const;
};

struct SweepSpec {
  std::vector<SweepLevel> levels;
  std::size_t replicates = 10;
  std::uint64_t seed = 0;
  ConflictPolicy policy = ConflictPolicy::Error;
  unsigned jobs = 1;
};

/// Level k, replicate r is perturbed with seed derive_seed(spec.seed, k) and
/// replicate_index r, then scored by leave-one-out for every pipeline.
SweepResult proximity_sweep(const Dataset& data, const Theory& theory,
                            const std::vector<Pipeline>& methods, const SweepSpec& spec);

/// Parses "fewer_matches:0.3" or "fewer_mismatches:0.9"; several separated by ','.
std::vector<SweepLevel> parse_levels(std::string_view text);

/// proximity_x, method, mean, ci, replicates
std::string sweep_csv(const SweepResult& result);

}  // namespace tgci
