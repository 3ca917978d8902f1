#pragma once

// Minibatch training drivers.
//
// SVI: summarize a sampled batch, rescale its statistics to the dataset
// size, form the target global parameters and move the natural parameters
// a step rho_t = (delta + t)^-kappa towards them.
//
// MVI: the data is split once into B fixed batches; each batch's
// statistics are cached, the whole-dataset aggregate is updated by
// subtracting the stale entry and adding the fresh one, and the global
// step runs on the aggregate.
//
// Models plug in through small adapters (MixtureModel, LdaModel) exposing
// summarize / global / blend / elbo.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsevi/config.hpp"
#include "sparsevi/counters.hpp"
#include "sparsevi/data.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"

namespace sparsevi {

struct LearningRateSchedule {
  double delta = 1.0;
  double kappa = 0.55;

  /// (delta + t)^-kappa, capped at 1.
  double rho(std::uint64_t t) const;
  /// Throws ArgumentError unless delta >= 0 and kappa in (0.5, 1].
  void validate() const;
};

template <class Stats>
struct MemoCache {
  std::vector<Stats> batches;
  std::vector<char> visited;
  Stats aggregate;

  MemoCache(int B, const Stats& zero)
      : batches(static_cast<std::size_t>(B), zero), visited(static_cast<std::size_t>(B), 0),
        aggregate(zero) {}
  int B() const { return static_cast<int>(batches.size()); }

  /// Recomputes the aggregate as the ordered sum of cached batches, which
  /// removes drift from repeated subtract/add updates.
  void reaggregate() {
    Stats total = batches.front();
    for (std::size_t b = 1; b < batches.size(); ++b) total += batches[b];
    aggregate = std::move(total);
  }
};

template <class F>
class MixtureModel {
 public:
  using Data = typename F::Data;
  using State = MixGlobalState<F>;
  using Stats = MixSuffStats<F>;

  MixtureModel(const Data& data, double alpha, typename F::Prior prior, int L,
               ParallelOptions parallel = {})
      : data_(data), alpha_(alpha), prior_(std::move(prior)), L_(L), parallel_(parallel) {}

  std::size_t n_units() const { return data_.n_obs(); }
  Stats zero(const State& g) const { return Stats::zero(prior_, g.K(), F::data_dim(data_)); }

  Stats summarize(std::size_t begin, std::size_t end, const State& g) const {
    return local_summary<F>(data_, begin, end, g, L_, parallel_);
  }
  Stats summarize(std::span<const std::size_t> idx, const State& g) const {
    const Data batch = subset(data_, idx);
    return local_summary<F>(batch, 0, batch.n_obs(), g, L_, parallel_);
  }
  State global(const Stats& stats) const { return global_step<F>(stats, alpha_, prior_); }
  State blend(const State& current, const State& target, double rho) const {
    State out;
    out.alpha = alpha_;
    out.prior = prior_;
    out.theta = CategoricalFamily::blend(current.theta, target.theta, rho);
    out.posts.reserve(current.posts.size());
    for (std::size_t k = 0; k < current.posts.size(); ++k) {
      out.posts.push_back(F::blend(current.posts[k], target.posts[k], rho));
    }
    return out;
  }
  double elbo(const Stats& stats, const State& g) const { return sparsevi::elbo<F>(stats, g); }

 private:
  const Data& data_;
  double alpha_;
  typename F::Prior prior_;
  int L_;
  ParallelOptions parallel_;
};

class LdaModel {
 public:
  using State = LdaGlobalState;
  using Stats = LdaSuffStats;

  /// With warm_start, each document's counts persist between visits and
  /// seed its next local step.
  LdaModel(const Corpus& corpus, double alpha, double lambda_bar, LocalStepConfig local,
           ParallelOptions parallel = {}, bool warm_start = false);

  std::size_t n_units() const { return corpus_.n_docs(); }
  Stats zero(const State& g) const { return Stats::zero(g.K(), g.V()); }
  Stats summarize(std::size_t begin, std::size_t end, const State& g);
  Stats summarize(std::span<const std::size_t> idx, const State& g);
  State global(const Stats& stats) const { return lda_global_step(stats, alpha_, lambda_bar_); }
  State blend(const State& current, const State& target, double rho) const;
  double elbo(const Stats& stats, const State& g) const { return lda_elbo(stats, g); }

 private:
  const Corpus& corpus_;
  double alpha_;
  double lambda_bar_;
  LocalStepConfig local_;
  ParallelOptions parallel_;
  bool warm_start_;
  std::vector<std::vector<double>> warm_;
};

/// One SVI update from the observations `idx`. ELBO of the rescaled batch
/// statistics under the new state goes to `batch_elbo` when given.
template <class Model>
typename Model::State svi_step(Model& model, std::uint64_t t, std::span<const std::size_t> idx,
                               const typename Model::State& g, const LearningRateSchedule& sched,
                               double* batch_elbo = nullptr) {
  if (idx.empty()) throw ArgumentError("svi_step: empty batch");
  const auto stats = model.summarize(idx, g);
  const auto scaled =
      stats.scaled(static_cast<double>(model.n_units()) / static_cast<double>(idx.size()));
  const auto target = model.global(scaled);
  auto next = model.blend(g, target, sched.rho(t));
  if (batch_elbo != nullptr) *batch_elbo = model.elbo(scaled, next);
  return next;
}

/// One MVI update for batch b covering `range`.
template <class Model>
typename Model::State mvi_step(Model& model, int b, IndexRange range,
                               const typename Model::State& g,
                               MemoCache<typename Model::Stats>& cache) {
  if (b < 0 || b >= cache.B()) {
    throw ArgumentError("mvi_step: batch id " + std::to_string(b) + " outside [0, " +
                        std::to_string(cache.B()) + ")");
  }
  auto fresh = model.summarize(range.begin, range.end, g);
  auto& slot = cache.batches[static_cast<std::size_t>(b)];
  cache.aggregate -= slot;
  cache.aggregate += fresh;
  slot = std::move(fresh);
  cache.visited[static_cast<std::size_t>(b)] = 1;
  return model.global(cache.aggregate);
}

struct TraceRow {
  int lap = 0;
  std::uint64_t t = 0;          // global steps taken so far
  std::optional<double> rho;    // SVI only
  double elapsed_sec = 0.0;     // cumulative training time, heldout scoring excluded
  double elbo = 0.0;            // MVI: whole dataset; SVI: last rescaled batch
  std::optional<double> heldout;
  std::uint64_t n_exp_calls = 0;  // during this lap
  std::uint64_t n_restart_accepts = 0;
  std::uint64_t n_restart_proposals = 0;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const TraceRow& row);

struct RunOptions {
  Algorithm alg = Algorithm::mvi;
  int batches = 1;  // ignored for Algorithm::full
  int laps = 10;
  LearningRateSchedule sched;
  std::uint64_t seed = 0;
  bool timing = true;
};

template <class State>
struct RunResult {
  std::vector<TraceRow> trace;
  State state;
};

template <class Model>
using HeldoutHook = std::function<std::optional<double>(const typename Model::State&)>;

/// Runs `laps` passes of SVI or MVI from `init`, emitting one trace row per
/// lap (also passed to `on_lap` when given).
template <class Model>
RunResult<typename Model::State> run(Model& model, typename Model::State init,
                                     const RunOptions& opts, const HeldoutHook<Model>& heldout = {},
                                     const std::function<void(const TraceRow&)>& on_lap = {}) {
  using Clock = std::chrono::steady_clock;
  if (opts.laps < 0) throw ArgumentError("run: laps must be >= 0");
  opts.sched.validate();
  const int B = opts.alg == Algorithm::full ? 1 : opts.batches;
  const std::size_t n = model.n_units();
  RunResult<typename Model::State> result{{}, std::move(init)};
  auto& g = result.state;
  const auto ranges = fixed_partition(n, B);
  std::optional<MemoCache<typename Model::Stats>> cache;
  std::optional<BatchSampler> sampler;
  if (opts.alg == Algorithm::svi) {
    sampler.emplace(n, B, opts.seed);
  } else {
    cache.emplace(B, model.zero(g));
  }
  double elapsed = 0.0;
  std::uint64_t t = 0;
  for (int lap = 1; lap <= opts.laps; ++lap) {
    const auto start = Clock::now();
    const OpCounters before = thread_counters();
    TraceRow row;
    row.lap = lap;
    for (int b = 0; b < B; ++b, ++t) {
      if (sampler) {
        const auto idx = sampler->next();
        row.rho = opts.sched.rho(t);
        g = svi_step(model, t, idx, g, opts.sched, &row.elbo);
      } else {
        g = mvi_step(model, b, ranges[static_cast<std::size_t>(b)], g, *cache);
      }
    }
    if (cache) {
      cache->reaggregate();
      g = model.global(cache->aggregate);
      row.elbo = model.elbo(cache->aggregate, g);
    }
    const OpCounters used = thread_counters() - before;
    elapsed += std::chrono::duration<double>(Clock::now() - start).count();
    row.t = t;
    row.elapsed_sec = opts.timing ? elapsed : 0.0;
    row.n_exp_calls = used.exp_calls;
    row.n_restart_accepts = used.restart_accepts;
    row.n_restart_proposals = used.restart_proposals;
    if (heldout) row.heldout = heldout(g);
    if (on_lap) on_lap(row);
    result.trace.push_back(row);
  }
  return result;
}

}  // namespace sparsevi
