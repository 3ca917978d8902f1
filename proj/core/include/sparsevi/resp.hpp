#pragma once

// Turning log posterior weights W_k into responsibilities: the dense softmax
// and the optimal L-sparse variant, plus the distances and entropies used to
// compare them.
//
// Weights may contain -inf to mark excluded clusters. Both conversions shift
// by the maximum weight before exponentiating; the optimum is unchanged.

#include <span>
#include <vector>

namespace sparsevi {

struct DenseResp {
  std::vector<double> r;
};

// L non-zero values with their cluster indices, ordered by weight rank.
struct SparseResp {
  std::vector<double> values;
  std::vector<int> indices;
  int K = 0;
};

DenseResp dense_resp_from_weights(std::span<const double> w);

/// Writes the softmax of `w` into `out` and returns the log normalizer
/// max(w) + ln sum exp(w - max(w)). Performs exactly K exp calls.
double dense_resp_from_weights(std::span<const double> w, std::span<double> out);

/// Optimal responsibilities with at most L non-zeros. Throws ArgumentError
/// for L outside [1, K] and DegenerateError when fewer than L weights are
/// finite.
SparseResp top_l_resp_from_weights(std::span<const double> w, int L);

/// Allocation-free form: `perm` is K ints of scratch, `values` and `indices`
/// receive L entries. Returns the log normalizer over the selected support.
/// Performs exactly L exp calls.
double top_l_resp_from_weights(std::span<const double> w, int L, std::span<int> perm,
                               std::span<double> values, std::span<int> indices);

/// Softmax restricted to a fixed support: values[l] is proportional to
/// exp(w[indices[l]]). Returns the log normalizer. Used when the support is
/// frozen and only the values are refreshed.
double resp_on_support(std::span<const double> w, std::span<const int> indices,
                       std::span<double> values);

DenseResp densify(const SparseResp& s);

/// 0.5 * sum_k |a_k - b_k|. Throws ArgumentError on length mismatch.
double total_variation(std::span<const double> a, std::span<const double> b);

/// -sum r log r over the support, with 0 log 0 = 0. Accepts either a dense
/// vector or the values of a sparse one.
double entropy(std::span<const double> r);
double entropy(const SparseResp& s);

/// Per-observation objective sum_k r_k W_k - r_k ln r_k.
double local_objective(std::span<const double> w, std::span<const double> r);
double local_objective(std::span<const double> w, const SparseResp& s);

}  // namespace sparsevi
