#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "disto/bench.hpp"
#include "disto/corpus.hpp"
#include "disto/kmeans.hpp"
#include "disto/rng.hpp"
#include "disto/scorer.hpp"
#include "disto/train.hpp"
#include "disto/vocab.hpp"

namespace {

std::string word(std::uint64_t n) { return "w" + std::to_string(n % 97); }

std::string sentence(disto::Rng& rng, int length) {
  std::string out;
  for (int i = 0; i < length; ++i) {
    if (i) out += ' ';
    out += word(rng.index(97));
  }
  return out;
}

Eigen::MatrixXf gaussian_features(int rows, int cols) {
  disto::Rng rng(11);
  Eigen::MatrixXf m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = static_cast<float>(rng.gaussian());
  return m;
}

std::vector<disto::GeneratedSet> bleu_sets(int count) {
  disto::Rng rng(12);
  std::vector<disto::GeneratedSet> sets;
  for (int i = 0; i < count; ++i) {
    disto::GeneratedSet set;
    set.id = "b" + std::to_string(i);
    set.question = sentence(rng, 6);
    set.answer = word(rng.index(97));
    set.article = sentence(rng, 24);
    for (int d = 0; d < 3; ++d) set.generated.push_back(sentence(rng, 8));
    set.gold = {sentence(rng, 8), sentence(rng, 8), sentence(rng, 8)};
    sets.push_back(std::move(set));
  }
  return sets;
}

disto::ContextBundle sample_bundle() {
  disto::Rng rng(13);
  disto::ContextBundle bundle;
  bundle.question = sentence(rng, 8);
  bundle.answer = sentence(rng, 2);
  bundle.distractor = sentence(rng, 2);
  bundle.article = sentence(rng, 40);
  return bundle;
}

disto::ScorerCheckpoint sept_checkpoint() {
  disto::Rng rng(14);
  std::vector<std::string> texts;
  for (int i = 0; i < 64; ++i) texts.push_back(sentence(rng, 16));
  disto::ScorerConfig config;
  config.architecture = disto::Architecture::sept;
  config.max_seq_len = 64;
  config.d_model = 48;
  config.heads = 2;
  config.layers = 2;
  config.d_ff = 96;
  config.vocab_cap = 512;
  return disto::ScorerCheckpoint::create(config, disto::Vocabulary::build(texts, 512), 15);
}

disto::ScorerCheckpoint bow_checkpoint() {
  disto::Rng rng(16);
  std::vector<disto::FlatInstance> rows;
  for (int i = 0; i < 64; ++i) {
    disto::FlatInstance row;
    row.id = "r" + std::to_string(i);
    row.question = sentence(rng, 6);
    row.answer = sentence(rng, 2);
    row.distractor = sentence(rng, 2);
    row.article = sentence(rng, 24);
    row.target = (i % 2) ? 1.0 : 0.0;
    rows.push_back(std::move(row));
  }
  disto::ScorerConfig config;
  config.architecture = disto::Architecture::bow;
  disto::TrainConfig tc;
  return disto::train(tc, config, rows, rows);
}

void BM_FitClusters(benchmark::State& state) {
  const auto features = gaussian_features(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) {
    const auto index = disto::fit_clusters(features, 16, 7);
    benchmark::DoNotOptimize(index.assignment.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitClusters)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_CorpusBleu(benchmark::State& state) {
  const auto sets = bleu_sets(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const double score = disto::bleu_n(sets, 4);
    benchmark::DoNotOptimize(score);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_ScoreSept(benchmark::State& state) {
  const auto checkpoint = sept_checkpoint();
  const auto bundle = sample_bundle();
  for (auto _ : state) {
    const double score = checkpoint.score(bundle);
    benchmark::DoNotOptimize(score);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScoreSept)->Unit(benchmark::kMicrosecond);

void BM_ScoreBow(benchmark::State& state) {
  const auto checkpoint = bow_checkpoint();
  const auto bundle = sample_bundle();
  for (auto _ : state) {
    const double score = checkpoint.score(bundle);
    benchmark::DoNotOptimize(score);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ScoreBow)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
