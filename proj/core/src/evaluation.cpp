#include "tgci/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "text.hpp"
#include "tgci/error.hpp"

namespace tgci {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Plain: return "plain";
    case Method::Tgci: return "tgci";
    case Method::BooleanInterp: return "boolean-interp";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "plain") return Method::Plain;
  if (text == "tgci") return Method::Tgci;
  if (text == "boolean-interp" || text == "boolean") return Method::BooleanInterp;
  throw UsageError("unknown method '" + std::string(text) +
                   "' (expected plain, tgci or boolean-interp)");
}

std::unique_ptr<Classifier> Pipeline::fit(const LearningTable& table) const {
  if (custom_learner) return custom_learner->fit(table);
  return std::make_unique<DecisionTree>(train_tree(table, learner));
}

LearningTable build_table(const Dataset& data, const Pipeline& pipeline) {
  if (pipeline.method == Method::Plain) return LearningTable::from_dataset(data);
  if (pipeline.theories.empty()) {
    throw UsageError("method " + std::string(to_string(pipeline.method)) + " needs a theory");
  }
  InterpreterOptions options = pipeline.interpreter;
  options.kind = pipeline.method == Method::Tgci ? InterpreterKind::PartialMatch
                                                 : InterpreterKind::Boolean;
  return LearningTable::from_redescription(redescribe(data, pipeline.theories, options));
}

TheoryScore theory_only_classify(const Theory& theory, const Dataset& data) {
  const std::size_t positive = data.schema().positive_index();
  if (theory.empty()) throw UsageError("theory has no concepts");
  const auto findings = validate(theory, data.schema());
  if (!findings.empty()) {
    throw DataError("theory is inconsistent with the data: " + findings.front().path + ": " +
                    findings.front().problem);
  }
  const TheoryNode& root = theory.concepts().front().root;
  TheoryScore score;
  std::size_t correct = 0;
  for (const Example& e : data.examples()) {
    const bool predicted = boolean_interpret(root, e, data.schema()).top == 1.0;
    const bool actual = e.label == positive;
    score.exact_matches += predicted ? 1 : 0;
    score.positives += actual ? 1 : 0;
    correct += predicted == actual ? 1 : 0;
    score.verdicts.push_back({e.id, actual, predicted});
  }
  score.accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
  return score;
}

void CurveSpec::check(std::size_t dataset_size) const {
  if (sizes.empty()) throw UsageError("no training sizes given");
  for (std::size_t s : sizes) {
    if (s == 0) throw UsageError("training size 0 is not allowed");
  }
  if (test_size == 0) throw UsageError("test size must be positive");
  if (partitions == 0) throw UsageError("at least one partition is required");
  const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
  if (largest + test_size > dataset_size) {
    throw UsageError("largest training size " + std::to_string(largest) + " plus test size " +
                     std::to_string(test_size) + " exceeds the " + std::to_string(dataset_size) +
                     " available examples");
  }
}

namespace {

std::size_t parse_count(std::string_view text, std::string_view whole) {
  text = detail::trim(text);
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("bad size list '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::size_t> parse_sizes(std::string_view text) {
  std::vector<std::size_t> sizes;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw UsageError("size range must be first:last:step, got '" + std::string(text) + "'");
    const std::size_t first = parse_count(parts[0], text);
    const std::size_t last = parse_count(parts[1], text);
    const std::size_t step = parse_count(parts[2], text);
    if (step == 0 || first > last) throw UsageError("empty size range '" + std::string(text) + "'");
    for (std::size_t s = first; s <= last; s += step) sizes.push_back(s);
    return sizes;
  }
  for (auto part : detail::split(text, ',')) sizes.push_back(parse_count(part, text));
  return sizes;
}

CurvePoint summarize(std::size_t train_size, std::span<const double> accuracies) {
  CurvePoint p;
  p.train_size = train_size;
  p.n_partitions = accuracies.size();
  if (accuracies.empty()) return p;
  const double n = static_cast<double>(accuracies.size());
  p.mean_accuracy = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
  if (accuracies.size() > 1) {
    double ss = 0.0;
    for (double a : accuracies) ss += (a - p.mean_accuracy) * (a - p.mean_accuracy);
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    p.ci_half_width = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
  }
  return p;
}

std::vector<double> RunReport::accuracies_at(std::size_t train_size) const {
  std::vector<double> out;
  for (const auto& r : results) {
    if (r.train_size == train_size) out.push_back(r.accuracy);
  }
  return out;
}

RunReport learning_curve(const Dataset& data, const Pipeline& pipeline, const CurveSpec& spec) {
  spec.check(data.size());
  const auto start = std::chrono::steady_clock::now();
  // Redescription is per example, so one pass serves every partition.
  const LearningTable table = build_table(data, pipeline);
  std::vector<std::size_t> sizes = spec.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<std::vector<double>> acc(spec.partitions, std::vector<double>(sizes.size()));
  detail::parallel_for(spec.partitions, spec.jobs, [&](std::size_t p) {
    const auto order = partition_order(data.size(), spec.seed + p);
    const std::span<const std::size_t> all(order);
    const LearningTable test = table.subset(all.last(spec.test_size));
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const LearningTable train = table.subset(all.first(sizes[k]));
      acc[p][k] = accuracy(*pipeline.fit(train), test);
    }
  });

  RunReport report;
  report.method = std::string(to_string(pipeline.method));
  report.params = pipeline.learner;
  report.interpreter = pipeline.interpreter;
  report.spec = spec;
  for (std::size_t p = 0; p < spec.partitions; ++p) {
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      report.results.push_back({spec.seed + p, sizes[k], acc[p][k]});
    }
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    std::vector<double> column;
    for (std::size_t p = 0; p < spec.partitions; ++p) column.push_back(acc[p][k]);
    report.points.push_back(summarize(sizes[k], column));
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double leave_one_out(const Dataset& data, const Pipeline& pipeline, unsigned jobs) {
  if (data.size() < 2) throw UsageError("leave-one-out needs at least two examples");
  const LearningTable table = build_table(data, pipeline);
  const std::size_t n = data.size();
  std::vector<char> correct(n, 0);
  detail::parallel_for(n, jobs, [&](std::size_t held) {
    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != held) rest.push_back(i);
    }
    const auto model = pipeline.fit(table.subset(rest));
    correct[held] = model->predict(table.rows[held]) == table.labels[held] ? 1 : 0;
  });
  return static_cast<double>(std::count(correct.begin(), correct.end(), 1)) /
         static_cast<double>(n);
}

PairedTest paired_significance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw UsageError("paired samples differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw UsageError("paired test needs at least two pairs");
  PairedTest r;
  r.n = a.size();
  const double n = static_cast<double>(r.n);
  std::vector<double> d(r.n);
  for (std::size_t i = 0; i < r.n; ++i) d[i] = a[i] - b[i];
  r.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean_diff) * (x - r.mean_diff);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd <= 1e-12 * std::max(1.0, std::abs(r.mean_diff))) {
    r.zero_variance = true;
    if (std::abs(r.mean_diff) <= 1e-12) {
      r.mean_diff = 0.0;
      r.p_value = 0.5;
      r.t = 0.0;
    } else {
      r.p_value = r.mean_diff > 0 ? 0.0 : 1.0;
      r.t = r.mean_diff > 0 ? INFINITY : -INFINITY;
    }
    return r;
  }
  r.t = r.mean_diff / (sd / std::sqrt(n));
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::students_t(n - 1.0), r.t));
  return r;
}

std::string curve_csv(const RunReport& report) {
  std::string out = "train_size,mean_accuracy,ci_half_width,ci_lo,ci_hi,n_partitions\n";
  for (const auto& p : report.points) {
    out += std::to_string(p.train_size) + ',' + detail::format_double(p.mean_accuracy) + ',' +
           detail::format_double(p.ci_half_width) + ',' +
           detail::format_double(p.mean_accuracy - p.ci_half_width) + ',' +
           detail::format_double(p.mean_accuracy + p.ci_half_width) + ',' +
           std::to_string(p.n_partitions) + '\n';
  }
  return out;
}

std::string results_csv(const RunReport& report) {
  std::string out = "method,seed,train_size,accuracy\n";
  for (const auto& r : report.results) {
    out += report.method + ',' + std::to_string(r.seed) + ',' + std::to_string(r.train_size) +
           ',' + detail::format_double(r.accuracy) + '\n';
  }
  return out;
}

std::string report_json(const RunReport& report) {
  using nlohmann::json;
  json doc;
  doc["method"] = report.method;
  doc["params"] = {{"min_leaf", report.params.min_leaf},
                   {"pruning_confidence", report.params.pruning_confidence},
                   {"use_gain_ratio", report.params.use_gain_ratio},
                   {"prune", report.params.prune},
                   {"seed", report.params.seed}};
  doc["interpreter"] = {{"not_emits_feature", report.interpreter.not_emits_feature},
                        {"include_original_features", report.interpreter.include_original_features},
                        {"top_feature_included", report.interpreter.top_feature_included}};
  doc["spec"] = {{"sizes", report.spec.sizes},
                 {"test_size", report.spec.test_size},
                 {"partitions", report.spec.partitions},
                 {"seed", report.spec.seed}};
  json results = json::array();
  for (const auto& r : report.results) {
    results.push_back({{"seed", r.seed}, {"train_size", r.train_size}, {"accuracy", r.accuracy}});
  }
  doc["results"] = std::move(results);
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"train_size", p.train_size},
                      {"mean_accuracy", p.mean_accuracy},
                      {"ci_half_width", p.ci_half_width},
                      {"n_partitions", p.n_partitions}});
  }
  doc["points"] = std::move(points);
  doc["seconds"] = report.seconds;
  return doc.dump(2);
}

std::string curve_dat(const RunReport& report) {
  std::string out = "# " + report.method + "\n# size mean ci_lo ci_hi\n";
  for (const auto& p : report.points) {
    out += std::to_string(p.train_size) + ' ' + detail::format_fixed(p.mean_accuracy, 6) + ' ' +
           detail::format_fixed(p.mean_accuracy - p.ci_half_width, 6) + ' ' +
           detail::format_fixed(p.mean_accuracy + p.ci_half_width, 6) + '\n';
  }
  return out;
}

}  // namespace tgci
