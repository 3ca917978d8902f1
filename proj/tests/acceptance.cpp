// Acceptance checks, one PASS/FAIL line per criterion. Exit status is
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparsevi/counters.hpp"
#include "sparsevi/eval.hpp"
#include "sparsevi/init.hpp"
#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"
#include "sparsevi/resp.hpp"
#include "sparsevi/selection.hpp"
#include "sparsevi/special_fn.hpp"
#include "sparsevi/synthetic.hpp"
#include "sparsevi/train.hpp"

using namespace sparsevi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Matrix second_moment(const DenseDataset& d) {
  return d.x.transpose() * d.x / static_cast<double>(d.n_obs());
}

// ---------------------------------------------------------------- 1
Outcome top_l_optimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> normal(0.0, 3.0);
  double worst = 0.0;
  int cases = 0;
  for (int v = 0; v < 200; ++v) {
    const int K = 3 + v % 6;
    std::vector<double> w(static_cast<std::size_t>(K));
    for (auto& x : w) x = normal(rng);
    for (int L = 1; L <= K; ++L) {
      const double got = local_objective(w, top_l_resp_from_weights(w, L));
      worst = std::max(worst, std::abs(got - oracle::brute_force_top_l(w, L)));
      ++cases;
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-9 && secs < 10.0,
          std::to_string(cases) + " (w, L) cases, max |diff| = " + fmt("%.3g", worst) +
              ", " + fmt("%.2f", secs) + " s"};
}

// ---------------------------------------------------------------- 2
Outcome dense_sparse_equivalence() {
  std::mt19937_64 rng(1002);
  double worst_resp = 0.0, worst_stat = 0.0, worst_elbo = 0.0;
  // Gaussian mixtures.
  for (int inst = 0; inst < 20; ++inst) {
    const int K = 2 + inst % 6;
    const auto syn = make_gmm_data(300, 1 + inst % 4, K, 2000 + static_cast<std::uint64_t>(inst));
    const auto prior = default_wishart_prior(second_moment(syn.data));
    const auto g = init_gaussian_mixture(syn.data, K, 10.0, prior, static_cast<std::uint64_t>(inst));
    const auto rd = local_step<GaussianFamily>(syn.data, 0, 300, g, kDense);
    const auto rs = local_step<GaussianFamily>(syn.data, 0, 300, g, K);
    for (std::size_t i = 0; i < 300; ++i) {
      const auto a = rd.dense_at(i).r;
      const auto b = densify(rs.sparse_at(i)).r;
      for (int k = 0; k < K; ++k) worst_resp = std::max(worst_resp, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
    }
    const auto sd = summary_step<GaussianFamily>(syn.data, 0, 300, rd, prior);
    const auto ss = summary_step<GaussianFamily>(syn.data, 0, 300, rs, prior);
    for (int k = 0; k < K; ++k) {
      worst_stat = std::max(worst_stat, rel_diff(ss.s[static_cast<std::size_t>(k)].n, sd.s[static_cast<std::size_t>(k)].n));
      const double scale = std::max(1.0, sd.s[static_cast<std::size_t>(k)].s.cwiseAbs().maxCoeff());
      worst_stat = std::max(worst_stat, (ss.s[static_cast<std::size_t>(k)].s - sd.s[static_cast<std::size_t>(k)].s).cwiseAbs().maxCoeff() / scale);
    }
    const auto gd = global_step<GaussianFamily>(sd, 10.0, prior);
    const auto gs = global_step<GaussianFamily>(ss, 10.0, prior);
    worst_elbo = std::max(worst_elbo, rel_diff(elbo(ss, gs), elbo(sd, gd)));
  }
  // LDA with eps = 0 and selection at every iteration.
  for (int inst = 0; inst < 20; ++inst) {
    CorpusSpec spec;
    spec.n_topics = 3 + inst % 5;
    spec.vocab_size = 40;
    spec.n_docs = 40;
    spec.tokens_per_doc = 30;
    const auto syn = make_lda_corpus(spec, 3000 + static_cast<std::uint64_t>(inst));
    const int K = spec.n_topics;
    const auto g = init_lda(syn.corpus, K, 0.5, 0.1, static_cast<std::uint64_t>(inst));
    LocalStepConfig dense_cfg;
    LocalStepConfig sparse_cfg;
    sparse_cfg.L = K;
    sparse_cfg.eps_active = 0.0;
    sparse_cfg.schedule = SelectionSchedule::always();
    std::vector<DocState> ds, ss;
    for (const auto& d : syn.corpus.docs) {
      ds.push_back(dense_step_for_doc(d, g, dense_cfg));
      ss.push_back(l_sparse_step_for_doc(d, g, sparse_cfg));
      for (std::size_t u = 0; u < d.n_unique(); ++u) {
        const auto a = ds.back().token_resp(u);
        const auto b = ss.back().token_resp(u);
        for (int k = 0; k < K; ++k) worst_resp = std::max(worst_resp, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
      }
    }
    const auto a = lda_summary(syn.corpus.docs, ds, 0.5, spec.vocab_size);
    const auto b = lda_summary(syn.corpus.docs, ss, 0.5, spec.vocab_size);
    for (int k = 0; k < K; ++k)
      for (int v = 0; v < spec.vocab_size; ++v)
        worst_stat = std::max(worst_stat, rel_diff(b.topics[static_cast<std::size_t>(k)].s[static_cast<std::size_t>(v)], a.topics[static_cast<std::size_t>(k)].s[static_cast<std::size_t>(v)]));
    worst_elbo = std::max(worst_elbo, rel_diff(lda_elbo(b, lda_global_step(b, 0.5, 0.1)),
                                               lda_elbo(a, lda_global_step(a, 0.5, 0.1))));
  }
  const double worst = std::max({worst_resp, worst_stat, worst_elbo});
  return {worst <= 1e-8, "20 gmm + 20 lda instances; max diff resp " + fmt("%.3g", worst_resp) +
                             ", stats " + fmt("%.3g", worst_stat) + ", elbo " + fmt("%.3g", worst_elbo)};
}

// ---------------------------------------------------------------- 3
Outcome mvi_monotone() {
  const auto start = Clock::now();
  const auto syn = make_gmm_data(2000, 2, 5, 1003);
  const auto prior = default_wishart_prior(second_moment(syn.data));
  MixtureModel<GaussianFamily> model(syn.data, 10.0, prior, kDense);
  RunOptions opts;
  opts.alg = Algorithm::mvi;
  opts.batches = 4;
  opts.laps = 10;
  const auto res = run(model, init_gaussian_mixture(syn.data, 5, 10.0, prior, 1003), opts);
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    const double prev = res.trace[i - 1].elbo;
    worst_drop = std::max(worst_drop, (prev - res.trace[i].elbo) / std::abs(prev));
  }
  const double secs = seconds_since(start);
  return {res.trace.size() == 10 && worst_drop <= 1e-8 && secs < 30.0,
          "elbo " + fmt("%.6f", res.trace.front().elbo) + " -> " + fmt("%.6f", res.trace.back().elbo) +
              ", max relative drop " + fmt("%.3g", std::max(worst_drop, 0.0)) + ", " + fmt("%.2f", secs) + " s"};
}

// ---------------------------------------------------------------- 4
Outcome elbo_upper_bound() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double worst_margin = INFINITY;
  int instances = 0;
  for (int N = 1; N <= 6; ++N) {
    for (int K = 1; K <= 3; ++K) {
      for (int V = 2; V <= 3; ++V) {
        for (int rep = 0; rep < 4; ++rep) {
          TokenDataset t;
          t.vocab_size = V;
          for (int i = 0; i < N; ++i) t.tokens.push_back(static_cast<int>(rng() % static_cast<unsigned>(V)));
          const double alpha = 0.5 + rep, lb = 0.2 + 0.5 * rep;
          const double exact = oracle::categorical_mixture_log_marginal(t.tokens, K, V, alpha, lb);
          CategoricalMixture g;
          g.alpha = alpha;
          g.prior = lb;
          std::vector<double> theta(static_cast<std::size_t>(K));
          for (auto& x : theta) x = u(rng);
          g.theta = DirichletPosterior(theta);
          for (int k = 0; k < K; ++k) {
            std::vector<double> lam(static_cast<std::size_t>(V));
            for (auto& x : lam) x = u(rng);
            g.posts.emplace_back(lam);
          }
          MixSuffStats<CategoricalFamily> st;
          for (int it = 0; it < 500; ++it) {
            st = local_summary<CategoricalFamily>(t, 0, t.n_obs(), g, kDense);
            g = global_step<CategoricalFamily>(st, alpha, lb);
          }
          worst_margin = std::min(worst_margin, exact - elbo(st, g));
          ++instances;
        }
      }
    }
  }
  return {worst_margin >= -1e-9, std::to_string(instances) +
                                     " instances, min (log p(x) - elbo) = " + fmt("%.3g", worst_margin)};
}

// ---------------------------------------------------------------- 5
Outcome tv_trend() {
  const auto start = Clock::now();
  const int K = 50;
  const auto syn = make_patch_data(20000, 8, K, 1005);
  const auto prior = default_wishart_prior(second_moment(syn.data));
  ParallelOptions par;
  par.threads = 4;
  MixtureModel<GaussianFamily> model(syn.data, 10.0, prior, kDense, par);
  RunOptions opts;
  opts.batches = 4;
  opts.laps = 10;
  const auto fit = run(model, init_gaussian_mixture(syn.data, K, 10.0, prior, 1005), opts);
  const auto& g = fit.state;
  const auto n = syn.data.n_obs();
  const RowMatrix w = compute_weights_block<GaussianFamily>(syn.data, 0, n, g);
  const auto dense = resp_from_weight_block(w, kDense);
  std::vector<double> medians;
  std::string detail = "medians:";
  for (int L : {1, 2, 4, 8, 16, K}) {
    const auto cdf = distance_cdf(dense, resp_from_weight_block(w, L));
    const double med = cdf[cdf.size() / 2];
    medians.push_back(med);
    detail += " L=" + std::to_string(L) + ":" + fmt("%.3g", med);
  }
  bool ok = true;
  for (std::size_t i = 1; i < medians.size(); ++i) ok = ok && medians[i] <= medians[i - 1];
  ok = ok && medians.back() == 0.0 && medians[3] * 5.0 < medians[0];
  return {ok, detail + ", fit " + fmt("%.1f", seconds_since(start)) + " s"};
}

// ---------------------------------------------------------------- 6
Outcome op_counts() {
  const int K = 64;
  const auto syn = make_gmm_data(3000, 3, K, 1006);
  const auto prior = default_wishart_prior(second_moment(syn.data));
  const auto g = init_gaussian_mixture(syn.data, K, 10.0, prior, 1006);
  bool ok = true;
  std::string detail;
  for (int L : {kDense, 1, 4, 16, K}) {
    reset_thread_counters();
    (void)local_step<GaussianFamily>(syn.data, 0, 3000, g, L);
    const std::uint64_t want = 3000u * static_cast<std::uint64_t>(L == kDense ? K : L);
    ok = ok && thread_counters().exp_calls == want;
  }
  detail = "exp calls = 3000 x {K, L} for L in {dense,1,4,16,K}: " + std::string(ok ? "exact" : "MISMATCH");

  const std::size_t n = 100000;
  std::vector<std::vector<double>> inputs(6, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    inputs[0][i] = static_cast<double>(i);
    inputs[1][i] = static_cast<double>(n - i);
    inputs[2][i] = 1.0;
    inputs[3][i] = static_cast<double>(i % 13);
    inputs[4][i] = static_cast<double>(i < n / 2 ? i : n - i);
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    inputs[5][2 * i] = static_cast<double>(i + 1);
    inputs[5][2 * i + 1] = static_cast<double>(n / 2 + i + 1);
  }
  double worst_ratio = 0.0;
  for (const auto& v : inputs) {
    for (int L : {1, 3, 100, static_cast<int>(n / 2), static_cast<int>(n)}) {
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      reset_thread_counters();
      partition_top_l_inplace(perm, v, L);
      worst_ratio = std::max(worst_ratio, static_cast<double>(thread_counters().comparisons) / static_cast<double>(n));
    }
  }
  ok = ok && worst_ratio <= 16.0;
  return {ok, detail + "; max comparisons/K on adversarial inputs = " + fmt("%.2f", worst_ratio)};
}

// ---------------------------------------------------------------- 7
Outcome summary_speed() {
  const int K = 200;
  const std::size_t N = 20000;
  const auto syn = make_patch_data(N, 8, 20, 1007);
  const auto prior = default_wishart_prior(second_moment(syn.data));
  const auto g = init_gaussian_mixture(syn.data, K, 10.0, prior, 1007);
  const auto r4 = local_step<GaussianFamily>(syn.data, 0, N, g, 4);
  const auto rK = local_step<GaussianFamily>(syn.data, 0, N, g, K);
  const auto rD = local_step<GaussianFamily>(syn.data, 0, N, g, kDense);
  const double t4 = median_wall_seconds([&] { (void)summary_step<GaussianFamily>(syn.data, 0, N, r4, prior); }, 5);
  const double tK = median_wall_seconds([&] { (void)summary_step<GaussianFamily>(syn.data, 0, N, rK, prior); }, 5);
  const double tD = median_wall_seconds([&] { (void)summary_step<GaussianFamily>(syn.data, 0, N, rD, prior); }, 5);
  const double ratio = tK / t4;
  return {ratio >= 4.0, "median summary time L=4 " + fmt("%.4f", t4) + " s, L=K " + fmt("%.4f", tK) +
                            " s (dense layout " + fmt("%.4f", tD) + " s), speedup " + fmt("%.1f", ratio) + "x"};
}

// ---------------------------------------------------------------- 8
Outcome digamma_value() {
  const double v = digamma(0.005);
  return {v >= -201.0 && v <= -199.5, "digamma(0.005) = " + fmt("%.10f", v)};
}

// ---------------------------------------------------------------- 9
Outcome restart_safety() {
  CorpusSpec spec;
  spec.n_topics = 10;
  spec.vocab_size = 100;
  spec.n_docs = 300;
  spec.tokens_per_doc = 80;
  const auto syn = make_lda_corpus(spec, 1009);
  LocalStepConfig cfg;
  cfg.L = 4;
  cfg.restarts_enabled = true;
  LdaModel model(syn.corpus, 0.5, 0.1, cfg);
  auto g = init_lda(syn.corpus, 10, 0.5, 0.1, 1009);
  std::size_t docs = 0, bad_docs = 0, accepted = 0, proposals = 0, bad_accepts = 0;
  RunOptions opts;
  opts.batches = 3;
  opts.laps = 1;
  for (int lap = 0; lap < 4; ++lap) {
    for (const auto& d : syn.corpus.docs) {
      const auto s0 = l_sparse_step_for_doc(d, g, cfg);
      std::vector<RestartRecord> log;
      const auto s1 = restart_proposal(s0, d, g, cfg, &log);
      const double before = doc_objective(s0, d, g.log_prob, g.alpha);
      const double after = doc_objective(s1, d, g.log_prob, g.alpha);
      for (const auto& rec : log) {
        ++proposals;
        if (rec.accepted) {
          ++accepted;
          if (!(rec.after > rec.before)) ++bad_accepts;
        }
      }
      ++docs;
      if (after < before) ++bad_docs;
    }
    g = run(model, g, opts).state;  // advance the topics
  }
  return {bad_docs == 0 && bad_accepts == 0,
          std::to_string(docs) + " doc visits, " + std::to_string(proposals) + " proposals, " +
              std::to_string(accepted) + " accepted; accepted with dL <= 0: " + std::to_string(bad_accepts) +
              "; docs ending below pre-restart objective: " + std::to_string(bad_docs)};
}

// ---------------------------------------------------------------- 10, 11
struct RecoveryRun {
  double score = 0.0;
  double secs = 0.0;
};

struct RecoveryData {
  SyntheticCorpus train;
  Corpus test;
  double true_score = 0.0;
};

RecoveryData recovery_data() {
  CorpusSpec spec;  // K = 10, V = 100, 500 docs x 100 tokens
  RecoveryData r;
  r.train = make_lda_corpus(spec, 1010);
  r.test = make_lda_corpus(r.train.topics, 200, spec.tokens_per_doc, spec.doc_concentration, 1011).corpus;
  r.true_score = doc_completion_score(r.test, r.train.topics, 0.5).score;
  return r;
}

// Best of several initializations, chosen by final training ELBO (never by
// the heldout score).
constexpr int kRecoveryInits = 5;

RecoveryRun train_recovery(const RecoveryData& data, int L) {
  const auto start = Clock::now();
  LocalStepConfig cfg;
  cfg.L = L;
  cfg.restarts_enabled = true;
  LdaModel model(data.train.corpus, 0.5, 0.1, cfg);
  RunOptions opts;
  opts.alg = Algorithm::mvi;
  opts.batches = 5;
  opts.laps = 20;
  double best_elbo = -INFINITY;
  LdaGlobalState best;
  for (int i = 0; i < kRecoveryInits; ++i) {
    const auto res = run(model, init_lda(data.train.corpus, 10, 0.5, 0.1, 1010 + static_cast<std::uint64_t>(i)), opts);
    if (res.trace.back().elbo > best_elbo) {
      best_elbo = res.trace.back().elbo;
      best = res.state;
    }
  }
  RecoveryRun out;
  out.secs = seconds_since(start);
  out.score = doc_completion_score(data.test, best).score;
  return out;
}

// ---------------------------------------------------------------- 12
// Corpus built to punish stale document counts: documents mix pairs of
// near-duplicate topics, and initialization seeds topics from single
// documents, so early counts lock onto the wrong split.
struct WarmColdResult {
  std::vector<double> elbo;
  int decreases = 0;
  double worst_rel_drop = 0.0;
};

WarmColdResult warm_cold_run(const Corpus& corpus, bool warm, bool restarts, int K) {
  LocalStepConfig cfg;
  cfg.L = 2;
  cfg.restarts_enabled = restarts;
  LdaModel model(corpus, 0.5, 0.1, cfg, {}, warm);
  RunOptions opts;
  opts.batches = 4;
  opts.laps = 30;
  const auto res = run(model, init_lda(corpus, K, 0.5, 0.1, 1012), opts);
  WarmColdResult out;
  for (const auto& row : res.trace) out.elbo.push_back(row.elbo);
  for (std::size_t i = 1; i < out.elbo.size(); ++i) {
    const double drop = (out.elbo[i - 1] - out.elbo[i]) / std::abs(out.elbo[i - 1]);
    if (drop > 1e-12) ++out.decreases;
    out.worst_rel_drop = std::max(out.worst_rel_drop, drop);
  }
  return out;
}

Corpus twin_topic_corpus(std::uint64_t seed) {
  const int K = 12;
  const int V = 60;
  // Six base topics, each with a perturbed twin.
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(0.1, 1.0);
  Matrix topics(K, V);
  for (int b = 0; b < K / 2; ++b) {
    std::vector<double> base(static_cast<std::size_t>(V));
    double total = 0.0;
    for (auto& x : base) total += (x = gamma(rng) + 1e-6);
    for (int twin = 0; twin < 2; ++twin) {
      double t2 = 0.0;
      for (int v = 0; v < V; ++v) {
        const double scale = twin == 0 ? 1.0 : 0.5 + static_cast<double>(rng() % 100) / 100.0;
        t2 += topics(2 * b + twin, v) = base[static_cast<std::size_t>(v)] / total * scale;
      }
      topics.row(2 * b + twin) /= t2;
    }
  }
  return make_lda_corpus(topics, 400, 60, 0.05, seed + 1).corpus;
}

Outcome warm_vs_cold() {
  constexpr int kCorpora = 4;
  int warm_decreases = 0, cold_plain_decreases = 0;
  double warm_worst = 0.0, cold_worst = 0.0, cold_plain_worst = 0.0;
  int warm_below_cold = 0;
  for (int c = 0; c < kCorpora; ++c) {
    const auto corpus = twin_topic_corpus(1012 + 10 * static_cast<std::uint64_t>(c));
    const auto warm = warm_cold_run(corpus, true, false, 12);
    const auto cold = warm_cold_run(corpus, false, true, 12);
    const auto cold_plain = warm_cold_run(corpus, false, false, 12);
    warm_decreases += warm.decreases;
    warm_worst = std::max(warm_worst, warm.worst_rel_drop);
    cold_worst = std::max(cold_worst, cold.worst_rel_drop);
    cold_plain_decreases += cold_plain.decreases;
    cold_plain_worst = std::max(cold_plain_worst, cold_plain.worst_rel_drop);
    if (warm.elbo.back() < cold.elbo.back()) ++warm_below_cold;
  }
  const bool warm_ok = warm_decreases >= 1;
  const bool cold_ok = cold_worst <= 1e-6;
  return {warm_ok && cold_ok,
          std::to_string(kCorpora) + " corpora x 30 laps; warm/no-restarts: " + std::to_string(warm_decreases) +
              " lap decreases (max rel " + fmt("%.3g", warm_worst) + "); cold+restarts: max rel drop " +
              fmt("%.3g", cold_worst) + "; cold/no-restarts: " + std::to_string(cold_plain_decreases) +
              " decreases (max rel " + fmt("%.3g", cold_plain_worst) + "); warm final elbo below cold+restarts on " +
              std::to_string(warm_below_cold) + "/" + std::to_string(kCorpora) + " corpora"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  };
  report(1, top_l_optimality);
  report(2, dense_sparse_equivalence);
  report(3, mvi_monotone);
  report(4, elbo_upper_bound);
  report(5, tv_trend);
  report(6, op_counts);
  report(7, summary_speed);
  report(8, digamma_value);
  report(9, restart_safety);

  RecoveryData data;
  RecoveryRun l8, l1;
  bool recovery_ok = true;
  std::string recovery_error;
  try {
    data = recovery_data();
    l8 = train_recovery(data, 8);
    l1 = train_recovery(data, 1);
  } catch (const std::exception& e) {
    recovery_ok = false;
    recovery_error = e.what();
  }
  report(10, [&]() -> Outcome {
    if (!recovery_ok) return {false, "exception: " + recovery_error};
    const double gap = std::abs(l8.score - data.true_score) / std::abs(data.true_score);
    return {gap <= 0.05 && l8.secs < 120.0,
            "L=8 score " + fmt("%.4f", l8.score) + " vs true-topic score " + fmt("%.4f", data.true_score) +
                " nats/token (gap " + fmt("%.2f", 100 * gap) + "%), best of " + std::to_string(kRecoveryInits) +
                " inits by training elbo, train " + fmt("%.1f", l8.secs) + " s"};
  });
  report(11, [&]() -> Outcome {
    if (!recovery_ok) return {false, "exception: " + recovery_error};
    return {l8.score >= l1.score - 1e-3,
            "L=8 " + fmt("%.4f", l8.score) + " vs L=1 " + fmt("%.4f", l1.score) + " nats/token"};
  });
  report(12, warm_vs_cold);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
