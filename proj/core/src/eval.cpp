#include "sparsevi/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "sparsevi/counters.hpp"
#include "sparsevi/data.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/init.hpp"
#include "sparsevi/resp.hpp"
#include "sparsevi/special_fn.hpp"
#include "sparsevi/synthetic.hpp"

namespace sparsevi {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double log_sum_exp(std::span<const double> w) {
  const double m = *std::max_element(w.begin(), w.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : w) s += std::exp(v - m);
  return m + std::log(s);
}

struct ScoreSum {
  double log_lik = 0.0;
  double tokens = 0.0;
  std::size_t docs = 0;
  std::size_t skipped = 0;

  ScoreSum& operator+=(const ScoreSum& o) {
    log_lik += o.log_lik;
    tokens += o.tokens;
    docs += o.docs;
    skipped += o.skipped;
    return *this;
  }
};

// Shared completion loop over a V x K table of ln phi.
HeldoutReport completion(const Corpus& test, const RowMatrix& log_phi, double alpha,
                         const CompletionOptions& opts) {
  const auto start = Clock::now();
  const int K = static_cast<int>(log_phi.cols());
  LocalStepConfig cfg;
  cfg.L = kDense;
  cfg.max_iters = opts.max_iters;
  cfg.conv_threshold = opts.conv_threshold;
  cfg.validate(K);
  const ScoreSum total = parallel_reduce(
      test.n_docs(), opts.parallel, ScoreSum{},
      [&](std::size_t b, std::size_t e) {
        ScoreSum acc;
        std::vector<double> w(static_cast<std::size_t>(K));
        for (std::size_t d = b; d < e; ++d) {
          // Seeded per document so results do not depend on chunking.
          std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(d)};
          std::mt19937_64 rng(seq);
          const auto split = completion_split(test.docs[d], opts.frac_a, rng);
          if (!split) {
            ++acc.skipped;
            continue;
          }
          const DocState s = dense_step_for_doc(split->a, log_phi, alpha, cfg);
          double theta_total = 0.0;
          for (double t : s.theta) theta_total += t;
          std::vector<double> log_pi(static_cast<std::size_t>(K));
          for (int k = 0; k < K; ++k) {
            log_pi[static_cast<std::size_t>(k)] = std::log(s.theta[static_cast<std::size_t>(k)] / theta_total);
          }
          for (std::size_t u = 0; u < split->b.n_unique(); ++u) {
            const double* row = log_phi.row(split->b.word_ids[u]).data();
            for (int k = 0; k < K; ++k) w[static_cast<std::size_t>(k)] = log_pi[static_cast<std::size_t>(k)] + row[k];
            const double lp = log_sum_exp(w);
            if (!std::isfinite(lp)) {
              throw DegenerateError("doc_completion_score: held-out word has zero probability");
            }
            acc.log_lik += split->b.counts[u] * lp;
            acc.tokens += split->b.counts[u];
          }
          ++acc.docs;
        }
        return acc;
      },
      [](ScoreSum& a, const ScoreSum& b) { a += b; });
  HeldoutReport report;
  report.score = total.tokens > 0.0 ? total.log_lik / total.tokens : 0.0;
  report.n_units = total.docs;
  report.n_skipped = total.skipped;
  report.n_tokens = total.tokens;
  report.elapsed_sec = seconds_since(start);
  return report;
}

}  // namespace

HeldoutReport mixture_heldout(const DenseDataset& xs, const GaussianMixture& g,
                              const ParallelOptions& opts) {
  const auto start = Clock::now();
  const int D = xs.dim();
  const int K = g.K();
  // Cholesky factor of each E[Sigma]^{-1} = (nu - D - 1) Lambda.
  std::vector<Matrix> factors;
  std::vector<double> constants;
  const auto pi = g.theta.mean();
  for (int k = 0; k < K; ++k) {
    const auto& post = g.posts[static_cast<std::size_t>(k)];
    if (post.dim() != D) throw ArgumentError("mixture_heldout: model and data dimensions differ");
    const double shrink = post.nu() - D - 1.0;
    if (!(shrink > 0.0)) {
      throw ArgumentError("mixture_heldout: cluster " + std::to_string(k) + " has nu = " +
                          std::to_string(post.nu()) + " <= D + 1, so E[Sigma] is undefined");
    }
    const Matrix prec = shrink * post.scale();
    const auto llt = cholesky(prec);
    factors.push_back(llt.matrixL());
    constants.push_back(std::log(pi[static_cast<std::size_t>(k)]) - 0.5 * D * kLogTwoPi +
                        0.5 * log_det_from_cholesky(llt));
  }
  const double total = parallel_reduce(
      xs.n_obs(), opts, 0.0,
      [&](std::size_t b, std::size_t e) {
        const auto n = static_cast<Eigen::Index>(e - b);
        const auto block = xs.x.middleRows(static_cast<Eigen::Index>(b), n);
        RowMatrix w(n, K);
        RowMatrix projected(n, D);
        for (int k = 0; k < K; ++k) {
          projected.noalias() = block * factors[static_cast<std::size_t>(k)];
          w.col(k).array() = constants[static_cast<std::size_t>(k)] -
                             0.5 * projected.rowwise().squaredNorm().array();
        }
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += log_sum_exp(std::span<const double>(w.row(i).data(), static_cast<std::size_t>(K)));
        }
        return acc;
      },
      [](double& a, const double& b) { a += b; });
  HeldoutReport report;
  report.n_units = xs.n_obs();
  report.score = xs.n_obs() > 0 ? total / static_cast<double>(xs.n_obs()) : 0.0;
  report.elapsed_sec = seconds_since(start);
  return report;
}

HeldoutReport mixture_heldout(const TokenDataset& xs, const CategoricalMixture& g) {
  const auto start = Clock::now();
  const auto pi = g.theta.mean();
  std::vector<std::vector<double>> phi;
  for (const auto& post : g.posts) phi.push_back(post.mean());
  double total = 0.0;
  std::vector<double> w(pi.size());
  for (int v : xs.tokens) {
    if (v < 0 || v >= xs.vocab_size) throw ArgumentError("mixture_heldout: token out of range");
    for (std::size_t k = 0; k < pi.size(); ++k) w[k] = std::log(pi[k]) + std::log(phi[k][static_cast<std::size_t>(v)]);
    total += log_sum_exp(w);
  }
  HeldoutReport report;
  report.n_units = xs.n_obs();
  report.score = xs.n_obs() > 0 ? total / static_cast<double>(xs.n_obs()) : 0.0;
  report.elapsed_sec = seconds_since(start);
  return report;
}

HeldoutReport doc_completion_score(const Corpus& test, const LdaGlobalState& g,
                                   const CompletionOptions& opts) {
  RowMatrix log_phi(g.V(), g.K());
  for (int k = 0; k < g.K(); ++k) {
    const auto mean = g.topics[static_cast<std::size_t>(k)].mean();
    for (int v = 0; v < g.V(); ++v) log_phi(v, k) = std::log(mean[static_cast<std::size_t>(v)]);
  }
  return completion(test, log_phi, g.alpha, opts);
}

HeldoutReport doc_completion_score(const Corpus& test, const Matrix& topics, double alpha,
                                   const CompletionOptions& opts) {
  if (topics.cols() != test.vocab_size) {
    throw ArgumentError("doc_completion_score: topic matrix and corpus vocabularies differ");
  }
  const RowMatrix log_phi = topics.transpose().array().log().matrix();
  return completion(test, log_phi, alpha, opts);
}

std::vector<double> distance_cdf(const RespBatch& dense, const RespBatch& sparse) {
  if (dense.n_obs != sparse.n_obs || dense.K != sparse.K) {
    throw ArgumentError("distance_cdf: batches are not aligned");
  }
  std::vector<double> out(dense.n_obs);
  std::vector<double> a(static_cast<std::size_t>(dense.K));
  std::vector<double> b(static_cast<std::size_t>(dense.K));
  for (std::size_t i = 0; i < dense.n_obs; ++i) {
    auto fill = [&](const RespBatch& batch, std::vector<double>& dst) {
      if (batch.dense) {
        dst = batch.dense_at(i).r;
      } else {
        dst = densify(batch.sparse_at(i)).r;
      }
    };
    fill(dense, a);
    fill(sparse, b);
    out[i] = total_variation(a, b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> distance_cdf(std::span<const std::vector<double>> counts_a,
                                 std::span<const std::vector<double>> counts_b) {
  if (counts_a.size() != counts_b.size()) throw ArgumentError("distance_cdf: pair count mismatch");
  std::vector<double> out(counts_a.size());
  auto normalize = [](const std::vector<double>& c) {
    double total = 0.0;
    for (double v : c) total += v;
    std::vector<double> p(c.size(), 0.0);
    if (total > 0.0) {
      for (std::size_t k = 0; k < c.size(); ++k) p[k] = c[k] / total;
    }
    return p;
  };
  for (std::size_t d = 0; d < counts_a.size(); ++d) {
    out[d] = total_variation(normalize(counts_a[d]), normalize(counts_b[d]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double median_wall_seconds(const std::function<void()>& fn, int reps) {
  if (reps < 1) throw ArgumentError("median_wall_seconds: reps must be >= 1");
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    fn();
    times.push_back(seconds_since(start));
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

namespace {

std::uint64_t exp_calls_of(const std::function<void()>& fn) {
  const auto before = thread_counters().exp_calls;
  fn();
  return thread_counters().exp_calls - before;
}

void bench_gmm(const BenchSpec& spec, std::vector<BenchRow>& rows) {
  const auto data = make_gmm_data(spec.n, spec.dim, std::max(2, spec.Ks.front() / 4), spec.seed).data;
  Matrix second = data.x.transpose() * data.x / static_cast<double>(data.n_obs());
  const auto prior = default_wishart_prior(second);
  for (int K : spec.Ks) {
    auto g = init_gaussian_mixture(data, K, 10.0, prior, spec.seed + 1);
    g = global_step(local_summary<GaussianFamily>(data, 0, data.n_obs(), g, kDense), 10.0, prior);
    RowMatrix weights;
    const double t_weights = median_wall_seconds(
        [&] { weights = compute_weights_block(data, 0, data.n_obs(), g); }, spec.reps);
    rows.push_back({"weights", kDense, K, t_weights, 0});
    for (int L : spec.Ls) {
      if (L != kDense && L > K) continue;
      RespBatch resp;
      auto run_resp = [&] { resp = resp_from_weight_block(weights, L); };
      const double t_resp = median_wall_seconds(run_resp, spec.reps);
      rows.push_back({"resp", L, K, t_resp, exp_calls_of(run_resp)});
      MixSuffStats<GaussianFamily> stats;
      const double t_summary = median_wall_seconds(
          [&] { stats = summary_step<GaussianFamily>(data, 0, data.n_obs(), resp, prior); },
          spec.reps);
      rows.push_back({"summary", L, K, t_summary, 0});
      const double t_global =
          median_wall_seconds([&] { (void)global_step(stats, 10.0, prior); }, spec.reps);
      rows.push_back({"global", L, K, t_global, 0});
    }
  }
}

void bench_lda(const BenchSpec& spec, std::vector<BenchRow>& rows) {
  CorpusSpec cs;
  cs.n_topics = std::max(2, spec.Ks.front() / 4);
  cs.vocab_size = spec.dim;
  cs.n_docs = spec.n;
  cs.tokens_per_doc = spec.tokens_per_doc;
  const auto corpus = make_lda_corpus(cs, spec.seed).corpus;
  for (int K : spec.Ks) {
    const auto g = init_lda(corpus, K, 0.5, 0.1, spec.seed + 1);
    for (int L : spec.Ls) {
      if (L != kDense && L > K) continue;
      LocalStepConfig cfg;
      cfg.L = L;
      std::vector<DocState> states;
      auto run_local = [&] {
        states.clear();
        for (const auto& doc : corpus.docs) states.push_back(local_step_for_doc(doc, g, cfg));
      };
      const double t_local = median_wall_seconds(run_local, spec.reps);
      rows.push_back({"local", L, K, t_local, exp_calls_of(run_local)});
      LdaSuffStats stats;
      const double t_summary = median_wall_seconds(
          [&] { stats = lda_summary(corpus.docs, states, g.alpha, corpus.vocab_size); }, spec.reps);
      rows.push_back({"summary", L, K, t_summary, 0});
      const double t_global =
          median_wall_seconds([&] { (void)lda_global_step(stats, g.alpha, g.lambda_bar); }, spec.reps);
      rows.push_back({"global", L, K, t_global, 0});
    }
  }
}

}  // namespace

std::vector<BenchRow> bench(const BenchSpec& spec) {
  if (spec.Ks.empty() || spec.Ls.empty()) throw ArgumentError("bench: empty K or L grid");
  std::vector<BenchRow> rows;
  if (spec.model == "gmm") {
    bench_gmm(spec, rows);
  } else if (spec.model == "lda") {
    bench_lda(spec, rows);
  } else {
    throw ArgumentError("bench: unknown model '" + spec.model + "'");
  }
  return rows;
}

std::string format_bench(std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << "substep\tL\tK\twall_sec\texp_calls\n";
  out << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.substep << '\t' << (r.L == kDense ? std::string("dense") : std::to_string(r.L)) << '\t'
        << r.K << '\t' << r.wall_sec << '\t' << r.exp_calls << '\n';
  }
  return out.str();
}

}  // namespace sparsevi
