#include "sparsevi/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

#include "sparsevi/counters.hpp"
#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

struct RankBefore {
  const double* values;
  std::uint64_t* count;

  bool operator()(int a, int b) const {
    ++*count;
    const double va = values[a];
    const double vb = values[b];
    return va > vb || (va == vb && a < b);
  }
};

constexpr std::ptrdiff_t kInsertionCutoff = 12;

void insertion_sort(int* first, int* last, const RankBefore& before) {
  for (int* i = first + 1; i < last; ++i) {
    const int key = *i;
    int* j = i;
    while (j > first && before(key, *(j - 1))) {
      *j = *(j - 1);
      --j;
    }
    *j = key;
  }
}

// Partitions [first, last) around the element at `pivot_pos`; returns the
// pivot's final position. Elements ranked before the pivot end up left of it.
int* partition_around(int* first, int* last, int* pivot_pos, const RankBefore& before) {
  std::swap(*pivot_pos, *(last - 1));
  const int pivot = *(last - 1);
  int* store = first;
  for (int* it = first; it < last - 1; ++it) {
    if (before(*it, pivot)) {
      std::swap(*it, *store);
      ++store;
    }
  }
  std::swap(*store, *(last - 1));
  return store;
}

int* median_of_three(int* a, int* b, int* c, const RankBefore& before) {
  if (before(*a, *b)) {
    if (before(*b, *c)) return b;
    return before(*a, *c) ? c : a;
  }
  if (before(*a, *c)) return a;
  return before(*b, *c) ? c : b;
}

void select_nth(int* first, int* nth, int* last, int depth, const RankBefore& before);

// Median-of-medians pivot: medians of groups of five are gathered at the
// front and their median is selected recursively.
int* median_of_medians(int* first, int* last, const RankBefore& before) {
  const std::ptrdiff_t n = last - first;
  if (n <= 5) {
    insertion_sort(first, last, before);
    return first + n / 2;
  }
  int* out = first;
  for (int* g = first; g < last; g += 5) {
    int* g_end = std::min(g + 5, last);
    insertion_sort(g, g_end, before);
    std::swap(*out, *(g + (g_end - g) / 2));
    ++out;
  }
  int* mid = first + (out - first) / 2;
  select_nth(first, mid, out, 0, before);
  return mid;
}

// Deterministic pivot sampling so that fixed input patterns cannot line up
// with the sampled positions.
struct SplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::ptrdiff_t below(std::ptrdiff_t n) { return static_cast<std::ptrdiff_t>(next() % static_cast<std::uint64_t>(n)); }
};

// Quickselect on sampled median-of-3 pivots. After `bad_budget` partitions
// that fail to discard a quarter of the range, pivots come from
// median-of-medians, which bounds the worst case.
void select_nth(int* first, int* nth, int* last, int bad_budget, const RankBefore& before) {
  SplitMix rng{static_cast<std::uint64_t>(last - first)};
  while (last - first > kInsertionCutoff) {
    const std::ptrdiff_t n = last - first;
    int* pivot_pos;
    if (bad_budget <= 0) {
      pivot_pos = median_of_medians(first, last, before);
    } else {
      pivot_pos = median_of_three(first + rng.below(n), first + rng.below(n), first + rng.below(n), before);
    }
    int* p = partition_around(first, last, pivot_pos, before);
    if (p == nth) return;
    if (nth < p) {
      last = p;
    } else {
      first = p + 1;
    }
    if (4 * (last - first) > 3 * n) --bad_budget;
  }
  insertion_sort(first, last, before);
}

void check_inputs(std::span<const double> values, int L) {
  const auto K = static_cast<std::ptrdiff_t>(values.size());
  if (L < 1 || L > K) {
    throw ArgumentError("top-L selection: L = " + std::to_string(L) +
                        " outside [1, " + std::to_string(K) + "]");
  }
  for (double v : values) {
    if (std::isnan(v)) throw ArgumentError("top-L selection: NaN in weights");
  }
}

}  // namespace

OpCounters& thread_counters() {
  thread_local OpCounters counters;
  return counters;
}

void partition_top_l_inplace(std::span<int> perm, std::span<const double> values,
                             int L) {
  check_inputs(values, L);
  if (perm.size() != values.size()) {
    throw ArgumentError("partition_top_l_inplace: permutation and values differ in length");
  }
  const auto K = static_cast<int>(perm.size());
  if (L == K) return;
  std::uint64_t count = 0;
  const RankBefore before{values.data(), &count};
  constexpr int kBadPartitionBudget = 4;
  select_nth(perm.data(), perm.data() + (L - 1), perm.data() + K, kBadPartitionBudget, before);
  // select_nth leaves position L - 1 holding the L-th ranked index with all
  // better-ranked ones before it.
  thread_counters().comparisons += count;
}

void select_top_l(std::span<const double> values, int L, std::span<int> perm_workspace,
                  std::span<int> out) {
  std::iota(perm_workspace.begin(), perm_workspace.end(), 0);
  partition_top_l_inplace(perm_workspace, values, L);
  std::uint64_t count = 0;
  const RankBefore before{values.data(), &count};
  std::sort(perm_workspace.begin(), perm_workspace.begin() + L, before);
  thread_counters().comparisons += count;
  std::copy_n(perm_workspace.begin(), L, out.begin());
}

std::vector<int> select_top_l(std::span<const double> values, int L) {
  check_inputs(values, L);
  std::vector<int> perm(values.size());
  std::vector<int> out(static_cast<std::size_t>(L));
  select_top_l(values, L, perm, out);
  return out;
}

}  // namespace sparsevi
