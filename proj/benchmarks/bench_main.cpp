#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <vector>

#include "sparsevi/init.hpp"
#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"
#include "sparsevi/resp.hpp"
#include "sparsevi/selection.hpp"
#include "sparsevi/synthetic.hpp"

using namespace sparsevi;

namespace {

void BM_TopL(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const int L = static_cast<int>(state.range(1));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> w(static_cast<std::size_t>(K));
  for (auto& x : w) x = normal(rng);
  for (auto _ : state) {
    auto r = top_l_resp_from_weights(w, L);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_TopL)->Args({200, 1})->Args({200, 4})->Args({200, 16})->Args({200, 200})->Args({100000, 16});

struct GmmFixture {
  GmmFixture() : syn(make_patch_data(5000, 8, 20, 7)) {
    const Matrix m = syn.data.x.transpose() * syn.data.x / static_cast<double>(syn.data.n_obs());
    prior = default_wishart_prior(m);
    g = init_gaussian_mixture(syn.data, 100, 10.0, prior, 7);
  }
  SyntheticGmm syn;
  WishartPrior prior;
  GaussianMixture g;
};

const GmmFixture& gmm() {
  static const GmmFixture f;
  return f;
}

void BM_GmmLocal(benchmark::State& state) {
  const auto& f = gmm();
  const int L = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = local_step<GaussianFamily>(f.syn.data, 0, f.syn.data.n_obs(), f.g, L);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GmmLocal)->Arg(1)->Arg(4)->Arg(16)->Arg(kDense)->Unit(benchmark::kMillisecond);

void BM_GmmSummary(benchmark::State& state) {
  const auto& f = gmm();
  const int L = static_cast<int>(state.range(0));
  const auto r = local_step<GaussianFamily>(f.syn.data, 0, f.syn.data.n_obs(), f.g, L);
  for (auto _ : state) {
    auto s = summary_step<GaussianFamily>(f.syn.data, 0, f.syn.data.n_obs(), r, f.prior);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_GmmSummary)->Arg(1)->Arg(4)->Arg(16)->Arg(kDense)->Unit(benchmark::kMillisecond);

void BM_LdaLocal(benchmark::State& state) {
  static const auto syn = make_lda_corpus(CorpusSpec{}, 11);
  static const auto g = init_lda(syn.corpus, 10, 0.5, 0.1, 11);
  LocalStepConfig cfg;
  cfg.L = static_cast<int>(state.range(0));
  cfg.restarts_enabled = state.range(1) != 0;
  for (auto _ : state) {
    auto s = lda_local_summary(syn.corpus, 0, syn.corpus.docs.size(), g, cfg);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_LdaLocal)->Args({1, 0})->Args({4, 0})->Args({4, 1})->Args({kDense, 0})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
