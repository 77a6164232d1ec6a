#include "tgci/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <unordered_set>

#include "text.hpp"
#include "tgci/error.hpp"
#include "tgci/rng.hpp"

namespace tgci {

using detail::split;
using detail::split_lines;
using detail::trim;

std::optional<ValueCode> Feature::code_of(std::string_view value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return static_cast<ValueCode>(i);
  }
  return std::nullopt;
}

Schema::Schema(std::vector<Feature> features, std::vector<std::string> classes,
               std::optional<std::string> positive_class)
    : features_(std::move(features)),
      classes_(std::move(classes)),
      positive_class_(std::move(positive_class)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const Feature& f = features_[i];
    if (f.name.empty()) throw DataError("feature " + std::to_string(i) + " has an empty name");
    if (!feature_lookup_.emplace(f.name, i).second) {
      throw DataError("duplicate feature name '" + f.name + "'");
    }
    if (f.values.size() < 2) {
      throw DataError("feature '" + f.name + "' needs at least two allowed values");
    }
    if (f.values.size() > 65535) {
      throw DataError("feature '" + f.name + "' has too many values");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& v : f.values) {
      if (v.empty()) throw DataError("feature '" + f.name + "' has an empty value");
      if (!seen.insert(v).second) {
        throw DataError("feature '" + f.name + "' lists value '" + v + "' twice");
      }
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& c : classes_) {
    if (c.empty()) throw DataError("empty class label");
    if (!seen.insert(c).second) throw DataError("duplicate class label '" + c + "'");
  }
  if (classes_.size() < 2) throw DataError("a schema needs at least two classes");
  if (positive_class_ && !class_index(*positive_class_)) {
    throw DataError("positive class '" + *positive_class_ + "' is not a class label");
  }
}

std::optional<std::size_t> Schema::feature_index(std::string_view name) const {
  const auto it = feature_lookup_.find(std::string(name));
  if (it == feature_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Schema::class_index(std::string_view label) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t Schema::positive_index() const {
  if (!positive_class_) throw UsageError("the dataset has no positive class set");
  return *class_index(*positive_class_);
}

Dataset::Dataset(Schema schema, std::vector<Example> examples)
    : schema_(std::move(schema)), examples_(std::move(examples)) {
  for (const Example& e : examples_) {
    if (e.values.size() != schema_.feature_count()) {
      throw DataError("example '" + e.id + "' has " + std::to_string(e.values.size()) +
                      " values, schema has " + std::to_string(schema_.feature_count()) +
                      " features");
    }
    if (e.label >= schema_.classes().size()) {
      throw DataError("example '" + e.id + "' has an unknown class");
    }
    for (std::size_t f = 0; f < e.values.size(); ++f) {
      if (e.values[f] >= schema_.feature(f).values.size()) {
        throw DataError("example '" + e.id + "' has a value outside feature '" +
                        schema_.feature(f).name + "'");
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Example> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(examples_.at(i));
  Dataset out;
  out.schema_ = schema_;
  out.examples_ = std::move(picked);
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(schema_.classes().size(), 0);
  for (const Example& e : examples_) ++counts[e.label];
  return counts;
}

namespace {

bool parse_signed(std::string_view s, int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// "p-50" -> ("p", -50). The prefix is the leading run that cannot start a number.
bool split_position(std::string_view s, std::string& prefix, int& pos) {
  std::size_t i = 0;
  while (i < s.size() && s[i] != '-' && s[i] != '+' && !(s[i] >= '0' && s[i] <= '9')) ++i;
  prefix = std::string(s.substr(0, i));
  return parse_signed(s.substr(i), pos);
}

std::string position_label(const std::string& prefix, int pos) {
  return prefix + (pos < 0 ? "-" : "+") + std::to_string(pos < 0 ? -pos : pos);
}

}  // namespace

PositionsSpec PositionsSpec::parse(std::string_view text) {
  text = trim(text);
  const std::size_t dots = text.find("..");
  if (dots == std::string_view::npos) {
    throw UsageError("positions must look like p-50..p+7, got '" + std::string(text) + "'");
  }
  PositionsSpec spec;
  std::string second_prefix;
  if (!split_position(text.substr(0, dots), spec.prefix, spec.first) ||
      !split_position(text.substr(dots + 2), second_prefix, spec.last) ||
      second_prefix != spec.prefix || spec.first > spec.last) {
    throw UsageError("positions must look like p-50..p+7, got '" + std::string(text) + "'");
  }
  return spec;
}

std::string PositionsSpec::to_string() const {
  return position_label(prefix, first) + ".." + position_label(prefix, last);
}

std::vector<std::string> PositionsSpec::labels() const {
  std::vector<std::string> out;
  for (int p = first; p <= last; ++p) {
    if (p == 0) continue;
    out.push_back(position_label(prefix, p));
  }
  return out;
}

Dataset load_sequence_format(std::string_view text, const SequenceFormat& format) {
  const std::vector<std::string> labels = format.positions.labels();
  if (labels.empty()) throw UsageError("positions spec selects no positions");
  if (format.alphabet.size() < 2) throw UsageError("alphabet needs at least two symbols");

  std::vector<std::string> values;
  for (char c : format.alphabet) values.emplace_back(1, c);
  std::vector<Feature> features;
  features.reserve(labels.size());
  for (const auto& l : labels) features.push_back({l, values});

  std::array<int, 256> code{};
  code.fill(-1);
  for (std::size_t i = 0; i < format.alphabet.size(); ++i) {
    const auto c = static_cast<unsigned char>(format.alphabet[i]);
    code[c] = static_cast<int>(i);
    if (c >= 'a' && c <= 'z') code[c - 'a' + 'A'] = static_cast<int>(i);
  }

  std::vector<std::string> classes;
  std::vector<Example> examples;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = trim(lines[ln]);
    if (line.empty()) continue;
    const std::size_t line_no = ln + 1;
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw DataError("expected 'class, name, sequence', found " + std::to_string(fields.size()) +
                          " fields",
                      line_no);
    }
    const std::string label(trim(fields[0]));
    const std::string name(trim(fields[1]));
    const std::string_view seq = trim(fields[2]);
    if (label.empty()) throw DataError("empty class label", line_no);
    if (seq.size() != labels.size()) {
      throw DataError("sequence has length " + std::to_string(seq.size()) + ", expected " +
                          std::to_string(labels.size()),
                      line_no);
    }
    Example e;
    e.id = name.empty() ? "line" + std::to_string(line_no) : name;
    auto it = std::find(classes.begin(), classes.end(), label);
    e.label = static_cast<std::size_t>(it - classes.begin());
    if (it == classes.end()) classes.push_back(label);
    e.values.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const int c = code[static_cast<unsigned char>(seq[i])];
      if (c < 0) {
        throw DataError("illegal nucleotide '" + std::string(1, seq[i]) + "' at " + labels[i],
                        line_no);
      }
      e.values.push_back(static_cast<ValueCode>(c));
    }
    examples.push_back(std::move(e));
  }
  if (examples.empty()) throw DataError("no records in sequence data");

  std::optional<std::string> positive = format.positive_class;
  if (!positive && std::find(classes.begin(), classes.end(), "+") != classes.end()) {
    positive = "+";
  }
  return Dataset(Schema(std::move(features), std::move(classes), std::move(positive)),
                 std::move(examples));
}

Dataset load_tabular(std::string_view text, const std::optional<std::string>& positive_class) {
  const auto lines = split_lines(text);
  std::size_t ln = 0;
  while (ln < lines.size() && trim(lines[ln]).empty()) ++ln;
  if (ln == lines.size()) throw DataError("empty tabular file");

  const auto header = split(trim(lines[ln]), ',');
  if (header.size() < 2) {
    throw DataError("header needs at least one feature column and a class column", ln + 1);
  }
  const std::size_t n_features = header.size() - 1;
  std::vector<Feature> features(n_features);
  for (std::size_t f = 0; f < n_features; ++f) features[f].name = std::string(trim(header[f]));

  std::vector<std::string> classes;
  std::vector<Example> examples;
  for (++ln; ln < lines.size(); ++ln) {
    const std::string_view line = trim(lines[ln]);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw DataError("ragged row: " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header.size()),
                      ln + 1);
    }
    Example e;
    e.id = "row" + std::to_string(examples.size() + 1);
    for (std::size_t f = 0; f < n_features; ++f) {
      const std::string_view cell = trim(cells[f]);
      if (cell.empty()) {
        throw DataError("missing value for '" + features[f].name + "'", ln + 1);
      }
      auto& vals = features[f].values;
      auto it = std::find(vals.begin(), vals.end(), cell);
      e.values.push_back(static_cast<ValueCode>(it - vals.begin()));
      if (it == vals.end()) vals.emplace_back(cell);
    }
    const std::string_view label = trim(cells.back());
    if (label.empty()) throw DataError("missing class label", ln + 1);
    auto it = std::find(classes.begin(), classes.end(), label);
    e.label = static_cast<std::size_t>(it - classes.begin());
    if (it == classes.end()) classes.emplace_back(label);
    examples.push_back(std::move(e));
  }
  if (examples.empty()) throw DataError("tabular file has a header but no rows");
  return Dataset(Schema(std::move(features), std::move(classes), positive_class),
                 std::move(examples));
}

std::string write_sequence_format(const Dataset& data) {
  std::string out;
  for (const Example& e : data.examples()) {
    out += data.class_label(e);
    out += ',';
    out += e.id;
    out += ',';
    for (std::size_t f = 0; f < e.values.size(); ++f) out += data.value(e, f);
    out += '\n';
  }
  return out;
}

std::string write_tabular(const Dataset& data) {
  std::string out;
  for (const Feature& f : data.schema().features()) {
    out += f.name;
    out += ',';
  }
  out += "class\n";
  for (const Example& e : data.examples()) {
    for (std::size_t f = 0; f < e.values.size(); ++f) {
      out += data.value(e, f);
      out += ',';
    }
    out += data.class_label(e);
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> partition_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  return order;
}

Split partition(const Dataset& data, std::size_t train_size, std::size_t test_size,
                std::uint64_t seed) {
  if (train_size + test_size > data.size()) {
    throw UsageError("train size " + std::to_string(train_size) + " plus test size " +
                     std::to_string(test_size) + " exceeds the " + std::to_string(data.size()) +
                     " available examples");
  }
  const auto order = partition_order(data.size(), seed);
  const std::span<const std::size_t> all(order);
  return {data.subset(all.first(train_size)), data.subset(all.last(test_size))};
}

}  // namespace tgci
