#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "troenpy/corpus.hpp"
#include "troenpy/info.hpp"
#include "troenpy/knn.hpp"
#include "troenpy/logreg.hpp"
#include "troenpy/weighting.hpp"

namespace tp = troenpy;

namespace {

tp::LabeledCorpus bench_corpus(std::size_t docs, std::size_t vocab,
                               std::size_t tokens_per_doc,
                               std::size_t classes) {
  std::mt19937_64 rng(1234);
  std::vector<tp::Document> corpus_docs;
  char buf[32];
  for (std::size_t i = 0; i < docs; ++i) {
    std::vector<std::string> tokens;
    tokens.reserve(tokens_per_doc);
    for (std::size_t t = 0; t < tokens_per_doc; ++t) {
      std::snprintf(buf, sizeof(buf), "term%05llu",
                    static_cast<unsigned long long>(rng() % vocab));
      tokens.emplace_back(buf);
    }
    std::snprintf(buf, sizeof(buf), "doc%zu", i);
    corpus_docs.push_back(tp::make_document(
        buf, static_cast<std::uint32_t>(i % classes), std::move(tokens)));
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) {
    names.push_back("class" + std::to_string(c));
  }
  return {std::move(corpus_docs), std::move(names)};
}

}  // namespace

static void BM_troenpy(benchmark::State& state) {
  const std::size_t k = state.range(0);
  std::vector<double> weights(k);
  std::mt19937_64 rng(7);
  for (auto& w : weights) {
    w = 1.0 + static_cast<double>(rng() % 1000);
  }
  const auto d = tp::Distribution::normalized(weights);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tp::troenpy(d));
  }
}
BENCHMARK(BM_troenpy)->Arg(8)->Arg(64)->Arg(1024);

static void BM_build_table(benchmark::State& state) {
  const auto corpus = bench_corpus(state.range(0), 2000, 60, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tp::build_table(corpus));
  }
}
BENCHMARK(BM_build_table)->Arg(200)->Arg(1000);

static void BM_fit_weights(benchmark::State& state) {
  const auto corpus = bench_corpus(state.range(0), 2000, 60, 4);
  const auto table = tp::build_table(corpus);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tp::WeightingModel::fit(table));
  }
}
BENCHMARK(BM_fit_weights)->Arg(200)->Arg(1000);

static void BM_vectorize(benchmark::State& state) {
  const auto corpus = bench_corpus(500, 2000, 60, 4);
  const auto model = tp::WeightingModel::fit(tp::build_table(corpus));
  const std::vector<tp::FeatureBlock> blocks{tp::FeatureBlock::TfPi,
                                             tp::FeatureBlock::Btf};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.vectorize_all(corpus, blocks));
  }
}
BENCHMARK(BM_vectorize);

static void BM_pairwise_distance(benchmark::State& state) {
  const auto corpus = bench_corpus(state.range(0), 2000, 60, 4);
  const auto model = tp::WeightingModel::fit(tp::build_table(corpus));
  const std::vector<tp::FeatureBlock> blocks{tp::FeatureBlock::TfPi};
  const auto matrix = model.vectorize_all(corpus, blocks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tp::pairwise_distance(matrix, matrix));
  }
}
BENCHMARK(BM_pairwise_distance)->Arg(100)->Arg(400);

static void BM_logreg_objective(benchmark::State& state) {
  const auto corpus = bench_corpus(400, 2000, 60, 4);
  const auto model = tp::WeightingModel::fit(tp::build_table(corpus));
  const std::vector<tp::FeatureBlock> blocks{tp::FeatureBlock::TfPi};
  const auto matrix = model.vectorize_all(corpus, blocks);
  const auto labels = corpus.labels();
  std::vector<double> weights(4 * (matrix.dim + 1), 0.01);
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tp::logreg_objective(weights, matrix, labels, 4, 1e-4, &grad));
  }
}
BENCHMARK(BM_logreg_objective);

BENCHMARK_MAIN();
