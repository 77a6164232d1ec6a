#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "tgci/evaluation.hpp"
#include "tgci/perturbation.hpp"

namespace {

using namespace tgci;

// Random 57-base records, half labelled positive.
Dataset random_sequences(std::size_t n) {
  std::mt19937_64 gen(n);
  std::ostringstream text;
  for (std::size_t i = 0; i < n; ++i) {
    text << (i % 2 ? '-' : '+') << ", R" << i << ", ";
    for (int p = 0; p < 57; ++p) text << "acgt"[gen() % 4];
    text << '\n';
  }
  return load_sequence_format(text.str());
}

const Theory& promoter_theory() {
  static const Theory t = [] {
    std::ifstream in(TGCI_DATA_DIR "/promoters.theory");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_theory(ss.str());
  }();
  return t;
}

void BM_ParseTheory(benchmark::State& state) {
  std::ifstream in(TGCI_DATA_DIR "/promoters.theory");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  for (auto _ : state) benchmark::DoNotOptimize(parse_theory(text));
}
BENCHMARK(BM_ParseTheory);

void BM_Redescribe(benchmark::State& state) {
  const Dataset d = random_sequences(static_cast<std::size_t>(state.range(0)));
  const std::vector<Theory> theories{promoter_theory()};
  for (auto _ : state) benchmark::DoNotOptimize(redescribe(d, theories));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Redescribe)->Arg(106)->Arg(1000);

void BM_TrainPlain(benchmark::State& state) {
  const LearningTable t = LearningTable::from_dataset(random_sequences(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(t));
}
BENCHMARK(BM_TrainPlain)->Arg(80)->Arg(1000);

void BM_TrainConstructed(benchmark::State& state) {
  const Dataset d = random_sequences(static_cast<std::size_t>(state.range(0)));
  const LearningTable t = LearningTable::from_redescription(redescribe(d, std::vector<Theory>{promoter_theory()}));
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(t));
}
BENCHMARK(BM_TrainConstructed)->Arg(80)->Arg(1000);

void BM_CurvePoint(benchmark::State& state) {
  const Dataset d = random_sequences(106);
  Pipeline p;
  p.method = Method::Tgci;
  p.theories = {promoter_theory()};
  const CurveSpec spec{{80}, 26, 10, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(learning_curve(d, p, spec));
}
BENCHMARK(BM_CurvePoint)->Unit(benchmark::kMillisecond);

void BM_Perturb(benchmark::State& state) {
  const Dataset d = random_sequences(106);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perturb(d, promoter_theory(), {Direction::FewerMismatches, 0.5, ++seed, 0},
                                     ConflictPolicy::LeaveUntouched));
  }
}
BENCHMARK(BM_Perturb);

}  // namespace

BENCHMARK_MAIN();
