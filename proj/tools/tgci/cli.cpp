#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "files.hpp"
#include "tgci/dataset.hpp"
#include "tgci/error.hpp"
#include "tgci/evaluation.hpp"
#include "tgci/interpreter.hpp"
#include "tgci/learner.hpp"
#include "tgci/perturbation.hpp"
#include "tgci/theory.hpp"

namespace tgci::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultLevels =
    "fewer_matches:0.1,fewer_matches:0.3,fewer_matches:0.6,fewer_matches:0.9,"
    "fewer_mismatches:0.3,fewer_mismatches:0.6,fewer_mismatches:0.9";

struct Options {
  std::vector<std::string> theories;
  std::string data;
  std::string format = "auto";
  std::string positions = "p-50..p+7";
  std::string positive;
  std::string out;
  std::string fragment;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  std::vector<std::string> methods{"tgci"};
  std::string interpreter = "partial-match";
  bool include_original = false;
  bool not_feature = false;
  bool no_top = false;

  std::size_t min_leaf = 2;
  double confidence = 0.25;
  bool no_gain_ratio = false;
  bool no_prune = false;

  std::string sizes = "8:80:8";
  std::size_t test_size = 26;
  std::size_t partitions = 50;
  std::size_t train_size = 80;

  std::string direction = "fewer_mismatches";
  double rate = 0.0;
  std::size_t replicate = 0;
  std::string on_conflict = "error";
  std::string levels = kDefaultLevels;
  std::size_t replicates = 10;

  std::string head;
  bool render = false;
};

// Resolved settings of the run, written beside its outputs.
struct Run {
  std::string command;
  std::vector<std::pair<std::string, std::string>> settings;
};

void add_theory(CLI::App* sub, Options& o, bool required) {
  auto* opt = sub->add_option("--theory", o.theories, "Theory file(s); comma separated or repeated")
                  ->delimiter(',');
  if (required) opt->required();
}

void add_fragment(CLI::App* sub, Options& o) {
  sub->add_option("--fragment", o.fragment,
                  "Use only the subtree named by this head or node path of each theory");
}

void add_data(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Dataset file")->required();
  sub->add_option("--format", o.format, "Dataset format: auto, sequence or tabular")
      ->check(CLI::IsMember({"auto", "sequence", "tabular"}));
  sub->add_option("--positions", o.positions, "Position labels of sequence data");
  sub->add_option("--positive", o.positive,
                  "Positive class label (sequence data defaults to '+')");
}

void add_out(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Directory for artifacts and the resolved config");
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Base seed for every random draw");
}

void add_jobs(CLI::App* sub, Options& o) {
  sub->add_option("--jobs", o.jobs, "Worker threads")->envname("TGCI_JOBS")->check(CLI::PositiveNumber);
}

void add_interpreter(CLI::App* sub, Options& o) {
  sub->add_flag("--include-original", o.include_original,
                "Append the original features to the constructed ones");
  sub->add_flag("--not-feature", o.not_feature, "Give not(...) nodes their own feature");
  sub->add_flag("--no-top", o.no_top, "Omit the feature of each concept root");
}

void add_methods(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.methods, "plain, tgci or boolean-interp; comma separated")
      ->delimiter(',');
}

void add_learner(CLI::App* sub, Options& o) {
  sub->add_option("--min-leaf", o.min_leaf, "Minimum examples on two branches of a split")
      ->check(CLI::PositiveNumber);
  sub->add_option("--cf", o.confidence, "Pruning confidence in (0, 1]");
  sub->add_flag("--no-gain-ratio", o.no_gain_ratio, "Split on information gain");
  sub->add_flag("--no-prune", o.no_prune, "Skip pessimistic-error pruning");
}

Dataset load_data(const Options& o) {
  const std::string text = read_file(o.data);
  std::string format = o.format;
  if (format == "auto") format = fs::path(o.data).extension() == ".csv" ? "tabular" : "sequence";
  try {
    if (format == "tabular") {
      return load_tabular(text, o.positive.empty() ? std::nullopt : std::optional(o.positive));
    }
    SequenceFormat f;
    f.positions = PositionsSpec::parse(o.positions);
    if (!o.positive.empty()) f.positive_class = o.positive;
    return load_sequence_format(text, f);
  } catch (const Error& e) {
    throw DataError(o.data + ": " + e.what());
  }
}

std::vector<Theory> load_theories(const Options& o) {
  std::vector<Theory> out;
  for (const auto& path : o.theories) {
    Theory t;
    try {
      t = parse_theory(read_file(path));
    } catch (const ParseError& e) {
      throw DataError(path + ": " + e.what());
    }
    if (!o.fragment.empty()) t = fragment(t, o.fragment);
    out.push_back(std::move(t));
  }
  return out;
}

Pipeline make_pipeline(const Options& o, Method method, std::vector<Theory> theories) {
  Pipeline p;
  p.method = method;
  if (method != Method::Plain) p.theories = std::move(theories);
  p.interpreter.include_original_features = o.include_original;
  p.interpreter.not_emits_feature = o.not_feature;
  p.interpreter.top_feature_included = !o.no_top;
  p.learner.min_leaf = o.min_leaf;
  p.learner.pruning_confidence = o.confidence;
  p.learner.use_gain_ratio = !o.no_gain_ratio;
  p.learner.prune = !o.no_prune;
  p.learner.seed = o.seed;
  p.learner.check();
  return p;
}

std::vector<Method> methods_of(const Options& o) {
  std::vector<Method> m;
  for (const auto& s : o.methods) m.push_back(parse_method(s));
  if (m.empty()) throw UsageError("no method given");
  return m;
}

class Artifacts {
 public:
  Artifacts(const Options& o, const Run& run) : dir_(o.out), run_(run) {}

  bool enabled() const { return !dir_.empty(); }

  void write(const std::string& name, std::string_view text) {
    if (!enabled()) return;
    write_atomic(fs::path(dir_) / name, text);
    written_.push_back(name);
  }

  void finish(std::ostream& out) {
    if (!enabled()) return;
    std::string cfg = "# tgci " + run_.command + "\n";
    for (const auto& [k, v] : run_.settings) cfg += k + " = " + v + "\n";
    write_atomic(fs::path(dir_) / "config.txt", cfg);
    out << "wrote " << written_.size() + 1 << " file(s) to " << dir_ << "\n";
  }

 private:
  std::string dir_;
  const Run& run_;
  std::vector<std::string> written_;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

int run_parse(const Options& o, Artifacts& files, std::ostream& out) {
  const auto theories = load_theories(o);
  std::string rendered;
  for (std::size_t i = 0; i < theories.size(); ++i) {
    const Theory& t = theories[i];
    std::size_t features = 0;
    for (const auto& c : t.concepts()) features += constructed_features(c.root, {}).size();
    out << (o.render ? render_theory(t) : render_outline(t));
    out << "concepts: " << t.concepts().size() << ", internal nodes: " << internal_node_count(t)
        << ", constructed features: " << features << "\n";
    rendered += render_theory(t);
  }
  files.write("theory.txt", rendered);
  return kOk;
}

int run_validate(const Options& o, Artifacts& files, std::ostream& out) {
  const auto theories = load_theories(o);
  const Dataset data = load_data(o);
  std::string csv = "theory,path,condition,problem\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < theories.size(); ++i) {
    for (const auto& f : validate(theories[i], data.schema())) {
      out << o.theories[i] << ": " << f.path << ": " << f.problem << "\n";
      csv += o.theories[i] + ',' + f.path + ',' + f.condition.to_string() + ',' + f.problem + '\n';
      ++total;
    }
  }
  files.write("findings.csv", csv);
  if (total == 0) out << "ok: every condition names a known feature and value\n";
  return total == 0 ? kOk : kFailure;
}

int run_redescribe(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  InterpreterOptions opts;
  opts.kind = parse_interpreter_kind(o.interpreter);
  opts.include_original_features = o.include_original;
  opts.not_emits_feature = o.not_feature;
  opts.top_feature_included = !o.no_top;
  const Redescription r = redescribe(data, load_theories(o), opts);
  const std::string csv = write_redescription_csv(r);
  if (files.enabled()) {
    files.write("redescribed.csv", csv);
    out << r.examples.size() << " examples, " << r.schema.features.size() << " features ("
        << r.schema.constructed_count() << " constructed)\n";
  } else {
    out << csv;
  }
  return kOk;
}

int run_train(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const auto methods = methods_of(o);
  if (methods.size() != 1) throw UsageError("train takes exactly one --method");
  Pipeline p = make_pipeline(o, methods.front(), load_theories(o));
  LearningTable table;
  std::string text;
  std::optional<ConstructedSchema> schema;
  if (p.method == Method::Plain) {
    table = LearningTable::from_dataset(data);
  } else {
    if (p.theories.empty()) throw UsageError("--method " + o.methods.front() + " needs --theory");
    InterpreterOptions opts = p.interpreter;
    opts.kind = p.method == Method::Tgci ? InterpreterKind::PartialMatch : InterpreterKind::Boolean;
    const Redescription r = redescribe(data, p.theories, opts);
    schema = r.schema;
    table = LearningTable::from_redescription(r);
  }
  const DecisionTree tree = train_tree(table, p.learner);
  text = schema ? render_tree(tree, *schema) : render_tree(tree);
  out << text;
  out << "nodes: " << tree.size() << ", leaves: " << tree.leaf_count()
      << ", training accuracy: " << fixed(accuracy(tree, table)) << "\n";
  files.write("tree.txt", text);
  files.write("tree.json", tree_to_json(tree));
  return kOk;
}

CurveSpec curve_spec(const Options& o, std::vector<std::size_t> sizes, std::size_t partitions) {
  CurveSpec spec;
  spec.sizes = std::move(sizes);
  spec.test_size = o.test_size;
  spec.partitions = partitions;
  spec.seed = o.seed;
  spec.jobs = o.jobs;
  return spec;
}

int run_eval(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const auto theories = load_theories(o);
  std::string csv = "method,seed,train_size,test_size,accuracy\n";
  for (Method m : methods_of(o)) {
    const RunReport r =
        learning_curve(data, make_pipeline(o, m, theories), curve_spec(o, {o.train_size}, 1));
    const double acc = r.results.front().accuracy;
    out << to_string(m) << ": accuracy " << fixed(acc) << " (train " << o.train_size << ", test "
        << o.test_size << ", seed " << o.seed << ")\n";
    csv += std::string(to_string(m)) + ',' + std::to_string(o.seed) + ',' +
           std::to_string(o.train_size) + ',' + std::to_string(o.test_size) + ',' + fixed(acc, 6) + '\n';
  }
  files.write("eval.csv", csv);
  return kOk;
}

int run_curve(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const auto theories = load_theories(o);
  const auto methods = methods_of(o);
  const CurveSpec spec = curve_spec(o, parse_sizes(o.sizes), o.partitions);
  std::vector<RunReport> reports;
  for (Method m : methods) {
    reports.push_back(learning_curve(data, make_pipeline(o, m, theories), spec));
    const RunReport& r = reports.back();
    out << r.method << "\n  size   mean    ci95\n";
    for (const auto& p : r.points) {
      out << "  " << p.train_size << "  " << fixed(p.mean_accuracy) << "  " << fixed(p.ci_half_width) << "\n";
    }
    files.write("curve_" + r.method + ".csv", curve_csv(r));
    files.write("curve_" + r.method + ".dat", curve_dat(r));
    files.write("results_" + r.method + ".csv", results_csv(r));
    files.write("report_" + r.method + ".json", report_json(r));
  }
  if (reports.size() > 1) {
    std::string csv = "train_size,method_a,method_b,mean_diff,t,p_value,zero_variance\n";
    for (std::size_t k = 1; k < reports.size(); ++k) {
      for (const auto& p : reports[0].points) {
        const auto a = reports[0].accuracies_at(p.train_size);
        const auto b = reports[k].accuracies_at(p.train_size);
        if (a.size() < 2) continue;
        const PairedTest t = paired_significance(a, b);
        csv += std::to_string(p.train_size) + ',' + reports[0].method + ',' + reports[k].method +
               ',' + fixed(t.mean_diff, 6) + ',' + fixed(t.t, 6) + ',' + fixed(t.p_value, 8) + ',' +
               (t.zero_variance ? "1" : "0") + '\n';
      }
    }
    files.write("significance.csv", csv);
    if (!files.enabled()) out << csv;
  }
  return kOk;
}

int run_loo(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const auto theories = load_theories(o);
  std::string csv = "method,accuracy\n";
  for (Method m : methods_of(o)) {
    const double acc = leave_one_out(data, make_pipeline(o, m, theories), o.jobs);
    out << to_string(m) << ": leave-one-out accuracy " << fixed(acc) << "\n";
    csv += std::string(to_string(m)) + ',' + fixed(acc, 6) + '\n';
  }
  files.write("loo.csv", csv);
  return kOk;
}

Theory perturbation_theory(const Options& o) {
  auto theories = load_theories(o);
  if (theories.size() != 1) throw UsageError("perturbation takes exactly one --theory");
  return std::move(theories.front());
}

int run_perturb(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  ProximitySpec spec{parse_direction(o.direction), o.rate, o.seed, o.replicate};
  const Dataset perturbed =
      perturb(data, perturbation_theory(o), spec, parse_conflict_policy(o.on_conflict));
  const bool tabular = o.format == "tabular" || (o.format == "auto" && fs::path(o.data).extension() == ".csv");
  const std::string text = tabular ? write_tabular(perturbed) : write_sequence_format(perturbed);
  if (files.enabled()) {
    files.write(tabular ? "perturbed.csv" : "perturbed.data", text);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < data.size(); ++i) changed += data.example(i) == perturbed.example(i) ? 0 : 1;
    out << changed << " of " << data.size() << " examples changed (proximity "
        << fixed(spec.proximity_x(), 1) << ")\n";
  } else {
    out << text;
  }
  return kOk;
}

int run_sweep(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const Theory theory = perturbation_theory(o);
  std::vector<Pipeline> pipelines;
  for (Method m : methods_of(o)) pipelines.push_back(make_pipeline(o, m, {theory}));
  SweepSpec spec;
  spec.levels = parse_levels(o.levels);
  spec.replicates = o.replicates;
  spec.seed = o.seed;
  spec.policy = parse_conflict_policy(o.on_conflict);
  spec.jobs = o.jobs;
  const SweepResult r = proximity_sweep(data, theory, pipelines, spec);
  out << "proximity  method  mean    ci95\n";
  for (const auto& row : r.rows) {
    out << fixed(row.proximity_x, 0) << "  " << row.method << "  " << fixed(row.mean_accuracy) << "  "
        << fixed(row.ci_half_width) << "\n";
  }
  out << "note: " << r.caveat << "\n";
  files.write("sweep.csv", sweep_csv(r));
  files.write("sweep_note.txt", r.caveat + "\n");
  return kOk;
}

int run_fragment(const Options& o, Artifacts& files, std::ostream& out) {
  Options whole = o;
  whole.fragment.clear();
  std::string text;
  for (const Theory& t : load_theories(whole)) text += render_theory(fragment(t, o.head));
  out << text;
  files.write("fragment.theory", text);
  return kOk;
}

int run_theory_score(const Options& o, Artifacts& files, std::ostream& out) {
  const Dataset data = load_data(o);
  const auto theories = load_theories(o);
  if (theories.size() != 1) throw UsageError("theory-score takes exactly one --theory");
  const TheoryScore s = theory_only_classify(theories.front(), data);
  out << "accuracy " << fixed(s.accuracy, 2) << "\n";
  out << "exact matches " << s.exact_matches << " of " << data.size() << " (" << s.positives
      << " positive)\n";
  std::string csv = "id,actual,predicted\n";
  for (const auto& v : s.verdicts) {
    csv += v.id + ',' + (v.actual_positive ? "positive" : "negative") + ',' +
           (v.predicted_positive ? "positive" : "negative") + '\n';
  }
  files.write("verdicts.csv", csv);
  return kOk;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.starts_with(flag + "=");
  });
}

// Appends config-file settings the command line does not already give.
void apply_config(CLI::App& app, std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return;
  const auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
  if (it == args.end()) throw UsageError("--config needs a subcommand");
  const std::string command = *it;
  CLI::App* sub = app.get_subcommand_no_throw(command);
  if (!sub) return;
  std::vector<ConfigEntry> entries;
  try {
    entries = parse_config(read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  for (const auto& e : entries) {
    if (e.key == "config") throw UsageError(path + ": line " + std::to_string(e.line) + ": config files cannot nest");
    if (!sub->get_option_no_throw("--" + e.key)) {
      throw UsageError(path + ": line " + std::to_string(e.line) + ": '" + e.key +
                       "' is not a setting of '" + command + "'");
    }
    if (!given_on_command_line(args, e.key)) args.push_back("--" + e.key + "=" + e.value);
  }
}

Run resolved(const CLI::App* sub) {
  Run run;
  run.command = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_type_size() == 0 ? "false" : opt->get_default_str();
      if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
        value = value.substr(1, value.size() - 2);
      }
    }
    if (value.empty()) continue;
    run.settings.emplace_back(name, value);
  }
  return run;
}

}  // namespace

int dispatch(const std::vector<std::string>& input, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Theory-guided constructive induction toolkit", "tgci"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value file; command-line flags win");

  using Handler = int (*)(const Options&, Artifacts&, std::ostream&);
  std::map<std::string, Handler> handlers;
  auto command = [&](const std::string& name, const std::string& about, Handler h) {
    handlers[name] = h;
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "Flat key = value file; command-line flags win");
    return sub;
  };

  CLI::App* sub = command("parse", "Parse theories and print their structure", run_parse);
  add_theory(sub, o, true);
  add_fragment(sub, o);
  sub->add_flag("--render", o.render, "Print rule text instead of the node outline");
  add_out(sub, o);

  sub = command("validate", "Check theory conditions against a dataset schema", run_validate);
  add_theory(sub, o, true);
  add_data(sub, o);
  add_out(sub, o);

  sub = command("redescribe", "Write the constructed-feature table", run_redescribe);
  add_theory(sub, o, true);
  add_fragment(sub, o);
  add_data(sub, o);
  sub->add_option("--interpreter", o.interpreter, "partial-match or boolean")
      ->check(CLI::IsMember({"partial-match", "partial", "boolean"}));
  add_interpreter(sub, o);
  add_out(sub, o);

  sub = command("train", "Train a decision tree and print it", run_train);
  add_theory(sub, o, false);
  add_fragment(sub, o);
  add_data(sub, o);
  add_methods(sub, o);
  add_interpreter(sub, o);
  add_learner(sub, o);
  add_seed(sub, o);
  add_out(sub, o);

  sub = command("eval", "Train on one seeded partition and report test accuracy", run_eval);
  add_theory(sub, o, false);
  add_fragment(sub, o);
  add_data(sub, o);
  add_methods(sub, o);
  add_interpreter(sub, o);
  add_learner(sub, o);
  sub->add_option("--train", o.train_size, "Training set size")->check(CLI::PositiveNumber);
  sub->add_option("--test", o.test_size, "Test set size")->check(CLI::PositiveNumber);
  add_seed(sub, o);
  add_out(sub, o);

  sub = command("curve", "Learning curve over seeded partitions", run_curve);
  add_theory(sub, o, false);
  add_fragment(sub, o);
  add_data(sub, o);
  add_methods(sub, o);
  add_interpreter(sub, o);
  add_learner(sub, o);
  sub->add_option("--sizes", o.sizes, "Training sizes as first:last:step or a comma list");
  sub->add_option("--test", o.test_size, "Test set size")->check(CLI::PositiveNumber);
  sub->add_option("--partitions", o.partitions, "Partitions; partition i uses seed + i")
      ->check(CLI::PositiveNumber);
  add_seed(sub, o);
  add_jobs(sub, o);
  add_out(sub, o);

  sub = command("loo", "Leave-one-out accuracy", run_loo);
  add_theory(sub, o, false);
  add_fragment(sub, o);
  add_data(sub, o);
  add_methods(sub, o);
  add_interpreter(sub, o);
  add_learner(sub, o);
  add_seed(sub, o);
  add_jobs(sub, o);
  add_out(sub, o);

  sub = command("perturb", "Move positive examples toward or away from the theory", run_perturb);
  add_theory(sub, o, true);
  add_fragment(sub, o);
  add_data(sub, o);
  sub->add_option("--direction", o.direction, "fewer_matches or fewer_mismatches")
      ->check(CLI::IsMember({"fewer_matches", "fewer_mismatches", "fewer-matches", "fewer-mismatches"}));
  sub->add_option("--rate", o.rate, "Per-feature probability in [0, 1]")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--replicate", o.replicate, "Replicate index mixed into the seed");
  sub->add_option("--on-conflict", o.on_conflict,
                  "error, or leave to skip features the chosen disjuncts disagree on")
      ->check(CLI::IsMember({"error", "leave"}));
  add_seed(sub, o);
  add_out(sub, o);

  sub = command("sweep", "Theory-proximity sweep scored by leave-one-out", run_sweep);
  add_theory(sub, o, true);
  add_fragment(sub, o);
  add_data(sub, o);
  add_methods(sub, o);
  add_interpreter(sub, o);
  add_learner(sub, o);
  sub->add_option("--levels", o.levels, "direction:rate list, comma separated");
  sub->add_option("--replicates", o.replicates, "Perturbed datasets per level")
      ->check(CLI::PositiveNumber);
  sub->add_option("--on-conflict", o.on_conflict,
                  "error, or leave to skip features the chosen disjuncts disagree on")
      ->check(CLI::IsMember({"error", "leave"}));
  add_seed(sub, o);
  add_jobs(sub, o);
  add_out(sub, o);

  sub = command("fragment", "Print the subtree under one head as a theory", run_fragment);
  add_theory(sub, o, true);
  sub->add_option("--head", o.head, "Clause head, concept name or node path")->required();
  add_out(sub, o);

  sub = command("theory-score", "Classify with the theory alone (exact match)", run_theory_score);
  add_theory(sub, o, true);
  add_data(sub, o);
  add_out(sub, o);

  std::vector<std::string> args = input;
  try {
    apply_config(app, args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "tgci: " << e.what() << "\n";
    return kUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const Run run = resolved(chosen);
  Artifacts files(o, run);
  try {
    const int code = handlers.at(chosen->get_name())(o, files, out);
    files.finish(out);
    return code;
  } catch (const UsageError& e) {
    err << "tgci " << run.command << ": " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "tgci " << run.command << ": " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "tgci " << run.command << ": " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace tgci::cli
