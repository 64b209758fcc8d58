#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <random>

#include "targetlens/chi_square.hpp"
#include "targetlens/evaluator.hpp"
#include "targetlens/fairness.hpp"
#include "targetlens/ngrams.hpp"
#include "targetlens/report.hpp"

namespace tl = targetlens;

namespace {

const std::filesystem::path kFixture = std::filesystem::path(TARGETLENS_DATA_DIR) / "fixture";

const std::vector<std::string>& fixture_texts() {
  static const std::vector<std::string> texts = [] {
    std::vector<std::string> out;
    for (const auto& ad : tl::load_corpus(kFixture / "corpus.jsonl", tl::CorpusFormat::kJsonl)) {
      out.push_back(tl::ad_text(ad));
    }
    return out;
  }();
  return texts;
}

void BM_Tokenize(benchmark::State& state) {
  const auto& texts = fixture_texts();
  std::size_t tokens = 0;
  for (auto _ : state) {
    for (const auto& t : texts) tokens += tl::tokenize(t).size();
  }
  benchmark::DoNotOptimize(tokens);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * texts.size()));
}
BENCHMARK(BM_Tokenize);

void BM_TopKNgrams(benchmark::State& state) {
  const auto& texts = fixture_texts();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tl::top_k_ngrams(texts, order, 5));
}
BENCHMARK(BM_TopKNgrams)->Arg(2)->Arg(3);

void BM_ChiSquareSurvival(benchmark::State& state) {
  double s = 0.0;
  for (auto _ : state) {
    for (int dof = 1; dof <= 10; ++dof) {
      for (double x = 0.5; x < 50.0; x += 0.5) s += tl::chi_square_sf(x, dof);
    }
  }
  benchmark::DoNotOptimize(s);
}
BENCHMARK(BM_ChiSquareSurvival);

void BM_ChiSquareTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> cell(1, 100);
  std::vector<std::vector<std::int64_t>> table(n, std::vector<std::int64_t>(n));
  for (auto& row : table) {
    for (auto& v : row) v = cell(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(tl::chi_square_independence(table));
}
BENCHMARK(BM_ChiSquareTable)->Arg(2)->Arg(8)->Arg(32);

void BM_ClassificationAndFairness(benchmark::State& state) {
  const tl::ConfusionMatrix cm({"young", "early_working", "late_working", "senior"},
                               {{22, 2, 1, 0}, {4, 74, 4, 0}, {0, 2, 6, 0}, {3, 0, 1, 2}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(tl::classification_report(cm));
    benchmark::DoNotOptimize(tl::fairness_report(cm, tl::Task::kAge));
  }
}
BENCHMARK(BM_ClassificationAndFairness);

void BM_ReplayAudit(benchmark::State& state) {
  tl::AuditConfig config;
  config.input = kFixture / "corpus.jsonl";
  config.replay_store = kFixture / "replay.jsonl";
  config.reference_values = kFixture / "reference_values.json";
  config.concurrency = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tl::render_report(tl::run_audit(config), tl::ReportFormat::kJson));
  }
}
BENCHMARK(BM_ReplayAudit)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
