#pragma once

// k-means++ style seeding: the first seed is uniform, each later seed is
// drawn with probability proportional to its divergence from the nearest
// chosen seed. Global states are then built from each seed's statistics
// plus the prior.

#include <cstdint>
#include <random>
#include <vector>

#include "sparsevi/dataset.hpp"
#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"

namespace sparsevi {

/// Squared Euclidean divergence. Throws ArgumentError if K > n, and
/// DegenerateError if fewer than K distinct rows exist.
std::vector<std::size_t> kmeanspp_seeds(const DenseDataset& data, int K, std::mt19937_64& rng);

/// KL(p_d || p_seed) between smoothed empirical word distributions,
/// p(v) proportional to count(v) + smoothing.
std::vector<std::size_t> kmeanspp_seeds(const Corpus& corpus, int K, double smoothing,
                                        std::mt19937_64& rng);

/// Token identity (divergence 1 between different tokens, 0 otherwise).
std::vector<std::size_t> kmeanspp_seeds(const TokenDataset& data, int K, std::mt19937_64& rng);

GaussianMixture init_gaussian_mixture(const DenseDataset& data, int K, double alpha,
                                      const WishartPrior& prior, std::uint64_t seed);
CategoricalMixture init_categorical_mixture(const TokenDataset& data, int K, double alpha,
                                            double lambda_bar, std::uint64_t seed);
/// Default number of hard-assignment refinement passes in init_lda.
inline constexpr int kDefaultLdaRefineIters = 3;

/// Seeds K documents by k-means++ under KL, then runs `refine_iters` passes
/// of hard Bregman k-means on whole documents: each document joins the topic
/// maximizing sum_v c_v ln p_kv (p_k = smoothed topic word frequencies), and
/// topic counts are recomputed from their members. A topic left without
/// members keeps its previous counts. lambda_k = lambda_bar + final counts;
/// with refine_iters = 0 these are the seed document's counts.
LdaGlobalState init_lda(const Corpus& corpus, int K, double alpha, double lambda_bar,
                        std::uint64_t seed, int refine_iters = kDefaultLdaRefineIters);

}  // namespace sparsevi
