#pragma once

// Top-L selection over a read-only array of weights.
//
// Order used throughout: i ranks above j iff values[i] > values[j], or the
// values are equal and i < j. Under this strict total order the top-L set is
// unique, which makes every downstream result reproducible.

#include <span>
#include <vector>

namespace sparsevi {

/// Rearranges `perm` (a permutation of [0, K)) so that positions [0, L) hold
/// the L highest-ranked indices. No order is guaranteed within either block.
/// Quickselect with median-of-three pivots; falls back to median-of-medians
/// once the partition depth exceeds 2 floor(log2 K), so the worst case is
/// O(K) comparisons. Comparisons are added to thread_counters().
void partition_top_l_inplace(std::span<int> perm, std::span<const double> values,
                             int L);

/// Indices of the L largest values, sorted by rank (value descending, index
/// ascending). Throws ArgumentError if L is outside [1, K] or values contain
/// NaN.
std::vector<int> select_top_l(std::span<const double> values, int L);

/// Allocation-free variant. `perm_workspace` must have size K; the L ranked
/// indices are written to `out` (size >= L).
void select_top_l(std::span<const double> values, int L,
                  std::span<int> perm_workspace, std::span<int> out);

}  // namespace sparsevi
