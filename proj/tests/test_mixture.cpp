#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sparsevi/mixture.hpp"
#include "sparsevi/synthetic.hpp"

using namespace sparsevi;

namespace {

DenseDataset two_points() {
  DenseDataset d;
  d.x.resize(2, 2);
  d.x << 1, 0, 0, 2;
  return d;
}

// Categorical mixture state from explicit theta and topic parameters.
CategoricalMixture make_cat(double alpha, double lambda_bar, std::vector<double> theta,
                            const std::vector<std::vector<double>>& lambdas) {
  CategoricalMixture g;
  g.alpha = alpha;
  g.prior = lambda_bar;
  g.theta = DirichletPosterior(std::move(theta));
  for (const auto& l : lambdas) g.posts.emplace_back(l);
  return g;
}

TokenDataset random_tokens(std::mt19937_64& rng, std::size_t n, int V) {
  TokenDataset t;
  t.vocab_size = V;
  for (std::size_t i = 0; i < n; ++i) t.tokens.push_back(static_cast<int>(rng() % static_cast<unsigned>(V)));
  return t;
}

CategoricalMixture random_cat_state(std::mt19937_64& rng, int K, int V, double alpha, double lb) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::vector<double> theta(static_cast<std::size_t>(K));
  for (auto& x : theta) x = u(rng);
  std::vector<std::vector<double>> lam(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(V)));
  for (auto& row : lam)
    for (auto& x : row) x = u(rng);
  return make_cat(alpha, lb, theta, lam);
}

}  // namespace

TEST(ComputeWeights, AdditionOfTerms) {
  auto g = make_cat(2.0, 1.0, {1.0, 1.0}, {{1.0, 2.0}, {3.0, 1.0}});
  TokenDataset t{{1}, 2};
  const auto w = compute_weights<CategoricalFamily>(t, 0, g);
  const double elog_pi = oracle::psi(1.0) - oracle::psi(2.0);
  EXPECT_NEAR(w[0], elog_pi + oracle::psi(2.0) - oracle::psi(3.0), 1e-14);
  EXPECT_NEAR(w[1], elog_pi + oracle::psi(1.0) - oracle::psi(4.0), 1e-14);
}

TEST(ComputeWeights, GoldenGaussian) {
  GaussianMixture g;
  g.alpha = 4.0;
  g.theta = DirichletPosterior({1.0, 3.0});
  Matrix a(2, 2), b(2, 2);
  a << 2.0, 0.3, 0.3, 1.0;
  b << 1.0, 0.0, 0.0, 4.0;
  g.posts = {WishartPosterior(4.0, a), WishartPosterior(6.0, b)};
  g.prior = WishartPrior{4.0, Matrix::Identity(2, 2)};
  DenseDataset d;
  d.x.resize(1, 2);
  d.x << 0.5, -1.0;
  const auto w = compute_weights<GaussianFamily>(d, 0, g);
  const Eigen::Vector2d x(0.5, -1.0);
  const std::vector<Matrix> invs{a, b};
  const std::vector<double> nus{4.0, 6.0};
  const std::vector<double> theta{1.0, 3.0};
  for (int k = 0; k < 2; ++k) {
    const Matrix lam = invs[static_cast<std::size_t>(k)].inverse();
    const double nu = nus[static_cast<std::size_t>(k)];
    const double eld = oracle::psi(nu / 2) + oracle::psi((nu - 1) / 2) + 2 * std::log(2.0) +
                       std::log(lam.determinant());
    const double quad = nu * x.dot(lam * x);
    const double ref = oracle::psi(theta[static_cast<std::size_t>(k)]) - oracle::psi(4.0) -
                       std::log(2 * M_PI) + 0.5 * eld - 0.5 * quad;
    EXPECT_NEAR(w[static_cast<std::size_t>(k)], ref, 1e-12);
  }
}

TEST(LocalStep, SymmetricClustersSplitEvenly) {
  GaussianMixture g;
  g.alpha = 2.0;
  g.theta = DirichletPosterior({1.0, 1.0});
  g.posts = {WishartPosterior(4.0, Matrix::Identity(2, 2)), WishartPosterior(4.0, Matrix::Identity(2, 2))};
  const auto d = two_points();
  const auto r = local_step<GaussianFamily>(d, 0, 2, g, kDense);
  EXPECT_NEAR(r.dense_at(0).r[0], 0.5, 1e-15);
}

TEST(LocalStep, SparseMatchesBruteForceSupports) {
  std::mt19937_64 rng(41);
  auto g = random_cat_state(rng, 8, 6, 3.0, 0.5);
  const auto t = random_tokens(rng, 100, 6);
  const auto r = local_step<CategoricalFamily>(t, 0, 100, g, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto w = compute_weights<CategoricalFamily>(t, i, g);
    const auto s = r.sparse_at(i);
    EXPECT_NEAR(local_objective(w, s), oracle::brute_force_top_l(w, 3), 1e-10);
    total += oracle::brute_force_top_l(w, 3);
  }
  EXPECT_NEAR(r.log_normalizer, total, 1e-8);
}

TEST(LocalStep, FullWidthSparseEqualsDense) {
  std::mt19937_64 rng(42);
  auto g = random_cat_state(rng, 5, 4, 3.0, 0.5);
  const auto t = random_tokens(rng, 50, 4);
  const auto d = local_step<CategoricalFamily>(t, 0, 50, g, kDense);
  const auto s = local_step<CategoricalFamily>(t, 0, 50, g, 5);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto a = d.dense_at(i).r;
    const auto b = densify(s.sparse_at(i)).r;
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)], 1e-15);
  }
  const auto sd = summary_step<CategoricalFamily>(t, 0, 50, d, g.prior);
  const auto ss = summary_step<CategoricalFamily>(t, 0, 50, s, g.prior);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(sd.s[static_cast<std::size_t>(k)].n, ss.s[static_cast<std::size_t>(k)].n, 1e-12);
    for (int v = 0; v < 4; ++v) EXPECT_NEAR(sd.s[static_cast<std::size_t>(k)].s[static_cast<std::size_t>(v)], ss.s[static_cast<std::size_t>(k)].s[static_cast<std::size_t>(v)], 1e-12);
  }
  EXPECT_NEAR(sd.entropy, ss.entropy, 1e-12);
}

TEST(SummaryStep, HandExample) {
  const auto d = two_points();
  RespBatch r;
  r.n_obs = 2;
  r.K = 2;
  r.width = 2;
  r.dense = true;
  r.values = {1.0, 0.0, 0.5, 0.5};
  r.entropy = std::log(2.0);
  const auto prior = WishartPrior{4.0, Matrix::Identity(2, 2)};
  const auto st = summary_step<GaussianFamily>(d, 0, 2, r, prior);
  EXPECT_NEAR(st.s[0].n, 1.5, 1e-15);
  EXPECT_NEAR(st.s[1].n, 0.5, 1e-15);
  Matrix s1(2, 2), s2(2, 2);
  s1 << 1, 0, 0, 2;
  s2 << 0, 0, 0, 2;
  EXPECT_LT((st.s[0].s - s1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((st.s[1].s - s2).cwiseAbs().maxCoeff(), 1e-15);

  r.values = {0.0, 1.0, 0.0, 1.0};
  const auto st0 = summary_step<GaussianFamily>(d, 0, 2, r, prior);
  EXPECT_EQ(st0.s[0].n, 0.0);
  EXPECT_EQ(st0.s[0].s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GlobalStep, Examples) {
  auto stats = MixSuffStats<CategoricalFamily>::zero(0.1, 200, 3);
  const auto g = global_step<CategoricalFamily>(stats, 10.0, 0.1);
  for (double t : g.theta.lambda()) EXPECT_NEAR(t, 0.05, 1e-15);

  auto s2 = MixSuffStats<CategoricalFamily>::zero(0.1, 2, 3);
  s2.s[0].n = 1.5;
  s2.s[1].n = 0.5;
  const auto g2 = global_step<CategoricalFamily>(s2, 2.0, 0.1);
  EXPECT_NEAR(g2.theta.lambda()[0], 2.5, 1e-15);
  EXPECT_NEAR(g2.theta.lambda()[1], 1.5, 1e-15);
  const auto g3 = global_step<CategoricalFamily>(s2, 2.0, 0.1);
  EXPECT_EQ(g2.theta.lambda(), g3.theta.lambda());
  EXPECT_EQ(g2.posts[0].lambda(), g3.posts[0].lambda());
}

TEST(Elbo, AllocResidualVanishesAfterGlobalStep) {
  std::mt19937_64 rng(43);
  auto g = random_cat_state(rng, 3, 4, 2.0, 0.5);
  const auto t = random_tokens(rng, 40, 4);
  const auto st = local_summary<CategoricalFamily>(t, 0, 40, g, kDense);
  const auto g2 = global_step<CategoricalFamily>(st, 2.0, 0.5);
  const double closed = c_dir_symmetric(2.0 / 3, 3) - g2.theta.cumulant();
  EXPECT_NEAR(l_alloc(st, g2), closed, 1e-12);
}

TEST(Elbo, OneHotHasZeroEntropy) {
  const TokenDataset t{{0, 1, 1}, 2};
  auto g = make_cat(2.0, 1.0, {1.0, 1.0}, {{50.0, 0.01}, {0.01, 50.0}});
  const auto r = local_step<CategoricalFamily>(t, 0, 3, g, 1);
  EXPECT_EQ(r.entropy, 0.0);
}

TEST(Elbo, BelowExactMarginalOnEnumerableInstances) {
  std::mt19937_64 rng(44);
  int checked = 0;
  for (int N = 1; N <= 6; ++N) {
    for (int K = 1; K <= 3; ++K) {
      for (int V = 2; V <= 3; ++V) {
        for (int rep = 0; rep < 3; ++rep) {
          const auto t = random_tokens(rng, static_cast<std::size_t>(N), V);
          const double alpha = 0.5 + rep;
          const double lb = 0.3 + 0.4 * rep;
          const double exact = oracle::categorical_mixture_log_marginal(t.tokens, K, V, alpha, lb);
          auto g = random_cat_state(rng, K, V, alpha, lb);
          for (int it = 0; it < 30; ++it) {
            const auto st = local_summary<CategoricalFamily>(t, 0, t.n_obs(), g, kDense);
            g = global_step<CategoricalFamily>(st, alpha, lb);
            const auto st2 = local_summary<CategoricalFamily>(t, 0, t.n_obs(), g, kDense);
            EXPECT_LE(elbo(st2, g), exact + 1e-9);
          }
          ++checked;
        }
      }
    }
  }
  EXPECT_EQ(checked, 108);
}

TEST(Elbo, TinyInstanceExample) {
  const TokenDataset t{{0, 1, 0}, 2};
  const double exact = oracle::categorical_mixture_log_marginal(t.tokens, 2, 2, 1.0, 1.0);
  auto g = make_cat(1.0, 1.0, {1.0, 1.0}, {{2.0, 1.0}, {1.0, 2.0}});
  for (int it = 0; it < 50; ++it) {
    const auto st = local_summary<CategoricalFamily>(t, 0, 3, g, kDense);
    g = global_step<CategoricalFamily>(st, 1.0, 1.0);
  }
  const auto st = local_summary<CategoricalFamily>(t, 0, 3, g, kDense);
  const double e = elbo(st, g);
  EXPECT_LE(e, exact + 1e-9);
  // Converged ascent should beat every hard assignment.
  EXPECT_GE(e, oracle::categorical_mixture_best_joint(t.tokens, 2, 2, 1.0, 1.0) - 1e-9);
}

TEST(Elbo, DenseCoordinateAscentIsMonotone) {
  const auto syn = make_gmm_data(1500, 3, 4, 45);
  const Matrix m = syn.data.x.transpose() * syn.data.x / static_cast<double>(syn.data.n_obs());
  const auto prior = default_wishart_prior(m);
  // Start from a random hard assignment.
  std::mt19937_64 rng(45);
  RespBatch r;
  r.n_obs = syn.data.n_obs();
  r.K = 4;
  r.width = 4;
  r.values.assign(r.n_obs * 4, 0.0);
  for (std::size_t i = 0; i < r.n_obs; ++i) r.values[i * 4 + rng() % 4] = 1.0;
  auto st = summary_step<GaussianFamily>(syn.data, 0, r.n_obs, r, prior);
  auto g = global_step<GaussianFamily>(st, 10.0, prior);
  double prev = elbo(st, g);
  for (int it = 0; it < 25; ++it) {
    st = local_summary<GaussianFamily>(syn.data, 0, syn.data.n_obs(), g, kDense);
    const double after_local = elbo(st, g);
    EXPECT_GE(after_local, prev - 1e-8 * std::abs(prev));
    g = global_step<GaussianFamily>(st, 10.0, prior);
    const double after_global = elbo(st, g);
    EXPECT_GE(after_global, after_local - 1e-8 * std::abs(after_local));
    prev = after_global;
  }
}

TEST(Elbo, OrderedByConstraintNesting) {
  std::mt19937_64 rng(46);
  const auto syn = make_gmm_data(800, 2, 6, 46);
  const Matrix m = syn.data.x.transpose() * syn.data.x / 800.0;
  const auto prior = default_wishart_prior(m);
  auto g = global_step<GaussianFamily>(MixSuffStats<GaussianFamily>::zero(prior, 6, 2), 10.0, prior);
  // Perturb to a non-symmetric state.
  for (auto& p : g.posts) {
    Matrix inv = p.inverse_scale();
    inv(0, 0) *= 0.5 + static_cast<double>(rng() % 100) / 50.0;
    p = WishartPosterior(p.nu() + 3.0, inv);
  }
  const auto n = syn.data.n_obs();
  // Fixed global state: evaluate each constrained local optimum.
  const double dense = elbo(local_summary<GaussianFamily>(syn.data, 0, n, g, kDense), g);
  const double l3 = elbo(local_summary<GaussianFamily>(syn.data, 0, n, g, 3), g);
  const double l1 = elbo(local_summary<GaussianFamily>(syn.data, 0, n, g, 1), g);
  EXPECT_GE(dense, l3 - 1e-9 * std::abs(dense));
  EXPECT_GE(l3, l1 - 1e-9 * std::abs(dense));
}

TEST(SummaryStep, CountsSumToBatchSize) {
  const auto syn = make_gmm_data(700, 2, 3, 47);
  const Matrix m = syn.data.x.transpose() * syn.data.x / 700.0;
  const auto prior = default_wishart_prior(m);
  const auto g = global_step<GaussianFamily>(MixSuffStats<GaussianFamily>::zero(prior, 3, 2), 10.0, prior);
  for (int L : {kDense, 1, 2, 3}) {
    const auto st = local_summary<GaussianFamily>(syn.data, 100, 700, g, L);
    double total = 0.0;
    for (double c : st.counts()) total += c;
    EXPECT_NEAR(total, 600.0, 1e-8);
    EXPECT_EQ(st.count_obs, 600.0);
  }
}

TEST(LocalSummary, DeterministicAcrossThreadCounts) {
  const auto syn = make_gmm_data(5000, 3, 5, 48);
  const Matrix m = syn.data.x.transpose() * syn.data.x / 5000.0;
  const auto prior = default_wishart_prior(m);
  auto g = global_step<GaussianFamily>(MixSuffStats<GaussianFamily>::zero(prior, 5, 3), 10.0, prior);
  ParallelOptions one{1, true, 256};
  ParallelOptions four{4, true, 256};
  const auto a = local_summary<GaussianFamily>(syn.data, 0, 5000, g, 2, one);
  const auto b = local_summary<GaussianFamily>(syn.data, 0, 5000, g, 2, four);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(a.s[static_cast<std::size_t>(k)].n, b.s[static_cast<std::size_t>(k)].n);
    EXPECT_TRUE(a.s[static_cast<std::size_t>(k)].s == b.s[static_cast<std::size_t>(k)].s);
  }
  EXPECT_EQ(a.entropy, b.entropy);
}

TEST(LocalStep, RejectsBadL) {
  std::mt19937_64 rng(49);
  auto g = random_cat_state(rng, 3, 2, 1.0, 1.0);
  const TokenDataset t{{0}, 2};
  EXPECT_THROW(local_step<CategoricalFamily>(t, 0, 1, g, 4), ArgumentError);
  EXPECT_THROW(local_step<CategoricalFamily>(t, 0, 1, g, -1), ArgumentError);
}
