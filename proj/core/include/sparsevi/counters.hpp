#pragma once

#include <cstdint>

namespace sparsevi {

// Instrumentation counters for the hot paths. Each thread owns its own
// instance; the parallel helpers fold worker counts back into the calling
// thread when they join.
struct OpCounters {
  std::uint64_t exp_calls = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t restart_proposals = 0;
  std::uint64_t restart_accepts = 0;

  OpCounters& operator+=(const OpCounters& o) {
    exp_calls += o.exp_calls;
    comparisons += o.comparisons;
    restart_proposals += o.restart_proposals;
    restart_accepts += o.restart_accepts;
    return *this;
  }
  friend OpCounters operator-(OpCounters a, const OpCounters& b) {
    a.exp_calls -= b.exp_calls;
    a.comparisons -= b.comparisons;
    a.restart_proposals -= b.restart_proposals;
    a.restart_accepts -= b.restart_accepts;
    return a;
  }
};

OpCounters& thread_counters();

inline void reset_thread_counters() { thread_counters() = OpCounters{}; }

}  // namespace sparsevi
