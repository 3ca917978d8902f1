#include "sparsevi/init.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

void check_k(int K, std::size_t n) {
  if (K < 1) throw ArgumentError("init: K must be >= 1");
  if (static_cast<std::size_t>(K) > n) {
    throw ArgumentError("init: K = " + std::to_string(K) + " exceeds the " + std::to_string(n) +
                        " available units");
  }
}

// Generic seeding loop; dist(i, s) is the divergence of unit i from unit s.
template <class Dist>
std::vector<std::size_t> seed_loop(std::size_t n, int K, std::mt19937_64& rng, Dist&& dist) {
  check_k(K, n);
  std::vector<std::size_t> seeds;
  seeds.reserve(static_cast<std::size_t>(K));
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  seeds.push_back(first(rng));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = dist(i, seeds.back());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (seeds.size() < static_cast<std::size_t>(K)) {
    double total = 0.0;
    for (double d : nearest) total += d;
    if (!(total > 0.0)) {
      throw DegenerateError("init: fewer than K = " + std::to_string(K) + " distinct units");
    }
    const double target = unit(rng) * total;
    double running = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      running += nearest[i];
      pick = i;
      if (running > target) break;
    }
    seeds.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist(i, pick));
  }
  return seeds;
}

}  // namespace

std::vector<std::size_t> kmeanspp_seeds(const DenseDataset& data, int K, std::mt19937_64& rng) {
  return seed_loop(data.n_obs(), K, rng, [&](std::size_t i, std::size_t s) {
    return (data.x.row(static_cast<Eigen::Index>(i)) - data.x.row(static_cast<Eigen::Index>(s)))
        .squaredNorm();
  });
}

std::vector<std::size_t> kmeanspp_seeds(const TokenDataset& data, int K, std::mt19937_64& rng) {
  return seed_loop(data.n_obs(), K, rng, [&](std::size_t i, std::size_t s) {
    return data.tokens[i] == data.tokens[s] ? 0.0 : 1.0;
  });
}

std::vector<std::size_t> kmeanspp_seeds(const Corpus& corpus, int K, double smoothing,
                                        std::mt19937_64& rng) {
  if (!(smoothing > 0.0)) throw ArgumentError("init: smoothing must be > 0");
  const auto V = static_cast<std::size_t>(corpus.vocab_size);
  const std::size_t D = corpus.n_docs();
  // Per document: smoothed probability of an absent word, and
  // sum_v p_v ln p_v.
  std::vector<double> floor_p(D), neg_entropy(D);
  for (std::size_t d = 0; d < D; ++d) {
    const auto& doc = corpus.docs[d];
    const double denom = doc.n_tokens() + smoothing * static_cast<double>(V);
    floor_p[d] = smoothing / denom;
    double h = static_cast<double>(V - doc.n_unique()) * floor_p[d] * std::log(floor_p[d]);
    for (double c : doc.counts) {
      const double p = (c + smoothing) / denom;
      h += p * std::log(p);
    }
    neg_entropy[d] = h;
  }
  // Dense log-probabilities of the current seed, cached by seed index.
  std::size_t cached = D;
  std::vector<double> log_q(V);
  double log_q_total = 0.0;
  auto load_seed = [&](std::size_t s) {
    if (cached == s) return;
    std::fill(log_q.begin(), log_q.end(), std::log(floor_p[s]));
    const auto& doc = corpus.docs[s];
    const double denom = doc.n_tokens() + smoothing * static_cast<double>(V);
    for (std::size_t u = 0; u < doc.n_unique(); ++u) {
      log_q[static_cast<std::size_t>(doc.word_ids[u])] = std::log((doc.counts[u] + smoothing) / denom);
    }
    log_q_total = 0.0;
    for (double l : log_q) log_q_total += l;
    cached = s;
  };
  return seed_loop(D, K, rng, [&](std::size_t i, std::size_t s) {
    if (i == s) return 0.0;
    load_seed(s);
    const auto& doc = corpus.docs[i];
    const double denom = doc.n_tokens() + smoothing * static_cast<double>(V);
    double cross = 0.0;
    double in_doc_log_q = 0.0;
    for (std::size_t u = 0; u < doc.n_unique(); ++u) {
      const double lq = log_q[static_cast<std::size_t>(doc.word_ids[u])];
      cross += (doc.counts[u] + smoothing) / denom * lq;
      in_doc_log_q += lq;
    }
    cross += floor_p[i] * (log_q_total - in_doc_log_q);
    return std::max(0.0, neg_entropy[i] - cross);
  });
}

GaussianMixture init_gaussian_mixture(const DenseDataset& data, int K, double alpha,
                                      const WishartPrior& prior, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto seeds = kmeanspp_seeds(data, K, rng);
  auto stats = MixSuffStats<GaussianFamily>::zero(prior, K, data.dim());
  for (int k = 0; k < K; ++k) {
    const auto row = data.x.row(static_cast<Eigen::Index>(seeds[static_cast<std::size_t>(k)]));
    auto& st = stats.s[static_cast<std::size_t>(k)];
    st.n = 1.0;
    st.s = row.transpose() * row;
  }
  return global_step(stats, alpha, prior);
}

CategoricalMixture init_categorical_mixture(const TokenDataset& data, int K, double alpha,
                                            double lambda_bar, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto seeds = kmeanspp_seeds(data, K, rng);
  auto stats = MixSuffStats<CategoricalFamily>::zero(lambda_bar, K, data.vocab_size);
  for (int k = 0; k < K; ++k) {
    auto& st = stats.s[static_cast<std::size_t>(k)];
    st.n = 1.0;
    st.s[static_cast<std::size_t>(data.tokens[seeds[static_cast<std::size_t>(k)]])] = 1.0;
  }
  return global_step(stats, alpha, lambda_bar);
}

LdaGlobalState init_lda(const Corpus& corpus, int K, double alpha, double lambda_bar,
                        std::uint64_t seed, int refine_iters) {
  if (refine_iters < 0) throw ArgumentError("init: refine_iters must be >= 0");
  std::mt19937_64 rng(seed);
  const auto seeds = kmeanspp_seeds(corpus, K, lambda_bar, rng);
  const auto V = static_cast<std::size_t>(corpus.vocab_size);
  const auto add_doc = [](const Document& doc, std::vector<double>& counts) {
    for (std::size_t u = 0; u < doc.n_unique(); ++u) {
      counts[static_cast<std::size_t>(doc.word_ids[u])] += doc.counts[u];
    }
  };
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(K), std::vector<double>(V, 0.0));
  for (int k = 0; k < K; ++k) add_doc(corpus.docs[seeds[static_cast<std::size_t>(k)]], counts[static_cast<std::size_t>(k)]);

  RowMatrix log_p(static_cast<Eigen::Index>(V), K);
  for (int it = 0; it < refine_iters; ++it) {
    for (int k = 0; k < K; ++k) {
      const auto& c = counts[static_cast<std::size_t>(k)];
      double total = 0.0;
      for (double x : c) total += x + lambda_bar;
      for (std::size_t v = 0; v < V; ++v) {
        log_p(static_cast<Eigen::Index>(v), k) = std::log((c[v] + lambda_bar) / total);
      }
    }
    std::vector<std::vector<double>> next(static_cast<std::size_t>(K), std::vector<double>(V, 0.0));
    std::vector<char> used(static_cast<std::size_t>(K), 0);
    Eigen::VectorXd score(K);
    for (const auto& doc : corpus.docs) {
      if (doc.n_unique() == 0) continue;
      score.setZero();
      for (std::size_t u = 0; u < doc.n_unique(); ++u) {
        score += doc.counts[u] * log_p.row(doc.word_ids[u]).transpose();
      }
      Eigen::Index best = 0;
      score.maxCoeff(&best);  // first maximum on ties
      add_doc(doc, next[static_cast<std::size_t>(best)]);
      used[static_cast<std::size_t>(best)] = 1;
    }
    for (int k = 0; k < K; ++k) {
      if (used[static_cast<std::size_t>(k)]) counts[static_cast<std::size_t>(k)] = std::move(next[static_cast<std::size_t>(k)]);
    }
  }

  auto stats = LdaSuffStats::zero(K, corpus.vocab_size);
  for (int k = 0; k < K; ++k) {
    auto& st = stats.topics[static_cast<std::size_t>(k)];
    for (std::size_t v = 0; v < V; ++v) {
      st.s[v] = counts[static_cast<std::size_t>(k)][v];
      st.n += st.s[v];
    }
  }
  return lda_global_step(stats, alpha, lambda_bar);
}

}  // namespace sparsevi
