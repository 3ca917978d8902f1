#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sparsevi/counters.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/selection.hpp"

using namespace sparsevi;

namespace {

std::vector<int> identity_perm(std::size_t K) {
  std::vector<int> p(K);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

void expect_partitioned(const std::vector<int>& perm, const std::vector<double>& v, int L) {
  double min_top = INFINITY;
  double max_rest = -INFINITY;
  for (int i = 0; i < L; ++i) min_top = std::min(min_top, v[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
  for (std::size_t i = static_cast<std::size_t>(L); i < perm.size(); ++i) max_rest = std::max(max_rest, v[static_cast<std::size_t>(perm[i])]);
  EXPECT_GE(min_top, max_rest);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, identity_perm(perm.size()));
}

std::uint64_t comparisons_for(const std::vector<double>& v, int L) {
  auto perm = identity_perm(v.size());
  reset_thread_counters();
  partition_top_l_inplace(perm, v, L);
  expect_partitioned(perm, v, L);
  return thread_counters().comparisons;
}

}  // namespace

TEST(SelectTopL, Examples) {
  const std::vector<double> v{3, 1, 4, 1, 5};
  EXPECT_EQ(select_top_l(v, 2), (std::vector<int>{4, 2}));
  const std::vector<double> ties{7, 7, 7};
  EXPECT_EQ(select_top_l(ties, 2), (std::vector<int>{0, 1}));
  const std::vector<double> one{-2.5};
  EXPECT_EQ(select_top_l(one, 1), (std::vector<int>{0}));
}

TEST(SelectTopL, MatchesSortOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<double> v(1000);
  for (auto& x : v) x = normal(rng);
  EXPECT_EQ(select_top_l(v, 10), oracle::sorted_top_l(v, 10));
}

TEST(SelectTopL, TieRuleMatchesSortOracleWithDuplicates) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 40);
    std::vector<double> v(static_cast<std::size_t>(K));
    for (auto& x : v) x = static_cast<double>(rng() % 4);  // heavy duplication
    for (int L = 1; L <= K; ++L) {
      ASSERT_EQ(select_top_l(v, L), oracle::sorted_top_l(v, L)) << "K=" << K << " L=" << L;
    }
  }
}

TEST(SelectTopL, InputUnmodifiedAndErrors) {
  const std::vector<double> v{3, 1, 4};
  const auto copy = v;
  (void)select_top_l(v, 2);
  EXPECT_EQ(v, copy);
  EXPECT_THROW(select_top_l(v, 0), ArgumentError);
  EXPECT_THROW(select_top_l(v, 4), ArgumentError);
  const std::vector<double> nan{1.0, std::nan("")};
  EXPECT_THROW(select_top_l(nan, 1), ArgumentError);
}

TEST(SelectTopL, WorkspaceVariantAgrees) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u;
  std::vector<double> v(64);
  for (auto& x : v) x = u(rng);
  std::vector<int> perm(64);
  std::vector<int> out(7);
  select_top_l(v, 7, perm, out);
  EXPECT_EQ(out, select_top_l(v, 7));
}

TEST(PartitionTopL, Examples) {
  const std::vector<double> v{3, 1, 4, 1, 5};
  auto perm = identity_perm(5);
  partition_top_l_inplace(perm, v, 2);
  std::vector<int> top(perm.begin(), perm.begin() + 2);
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<int>{2, 4}));

  const std::vector<double> single{9.0};
  std::vector<int> p1{0};
  partition_top_l_inplace(p1, single, 1);
  EXPECT_EQ(p1, std::vector<int>{0});
}

TEST(PartitionTopL, RandomArraysAllL) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 500; ++trial) {
    const int K = 1 + static_cast<int>(rng() % 64);
    std::vector<double> v(static_cast<std::size_t>(K));
    for (auto& x : v) x = trial % 3 == 0 ? std::round(normal(rng)) : normal(rng);
    for (int L = 1; L <= K; ++L) {
      auto perm = identity_perm(v.size());
      std::shuffle(perm.begin(), perm.end(), rng);
      partition_top_l_inplace(perm, v, L);
      expect_partitioned(perm, v, L);
    }
  }
}

TEST(PartitionTopL, ComparisonBudgetOnAdversarialInputs) {
  const std::size_t K = 100000;
  std::vector<double> ascending(K), descending(K), equal(K, 1.0), saw(K), organ(K);
  for (std::size_t i = 0; i < K; ++i) {
    ascending[i] = static_cast<double>(i);
    descending[i] = static_cast<double>(K - i);
    saw[i] = static_cast<double>(i % 17);
    organ[i] = static_cast<double>(i < K / 2 ? i : K - i);
  }
  for (const auto* v : {&ascending, &descending, &equal, &saw, &organ}) {
    for (int L : {1, 3, 50, static_cast<int>(K / 2), static_cast<int>(K)}) {
      EXPECT_LE(comparisons_for(*v, L), 16 * K) << "L=" << L;
    }
  }
}

TEST(PartitionTopL, MedianOfThreeKiller) {
  // Classic input that drives median-of-three quickselect quadratic; the
  // fallback must keep it linear.
  const std::size_t K = 1 << 16;
  std::vector<double> v(K);
  const std::size_t half = K / 2;
  for (std::size_t i = 0; i < half; ++i) {
    v[2 * i] = static_cast<double>(i + 1);
    v[2 * i + 1] = static_cast<double>(half + i + 1);
  }
  for (int L : {1, 3, static_cast<int>(half)}) EXPECT_LE(comparisons_for(v, L), 16 * K);
}
