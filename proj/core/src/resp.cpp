#include "sparsevi/resp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparsevi/counters.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/selection.hpp"

namespace sparsevi {

double dense_resp_from_weights(std::span<const double> w, std::span<double> out) {
  if (w.empty()) throw DegenerateError("dense_resp_from_weights: empty weight vector");
  const double max_w = *std::max_element(w.begin(), w.end());
  if (!std::isfinite(max_w)) {
    throw DegenerateError("dense_resp_from_weights: no finite weight");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    out[k] = std::exp(w[k] - max_w);
    total += out[k];
  }
  thread_counters().exp_calls += w.size();
  const double inv = 1.0 / total;
  for (std::size_t k = 0; k < w.size(); ++k) out[k] *= inv;
  return max_w + std::log(total);
}

DenseResp dense_resp_from_weights(std::span<const double> w) {
  DenseResp out;
  out.r.resize(w.size());
  dense_resp_from_weights(w, out.r);
  return out;
}

double resp_on_support(std::span<const double> w, std::span<const int> indices,
                       std::span<double> values) {
  const std::size_t n = indices.size();
  double max_w = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < n; ++l) max_w = std::max(max_w, w[indices[l]]);
  if (!std::isfinite(max_w)) throw DegenerateError("resp_on_support: no finite weight");
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    values[l] = std::exp(w[indices[l]] - max_w);
    total += values[l];
  }
  thread_counters().exp_calls += n;
  const double inv = 1.0 / total;
  for (std::size_t l = 0; l < n; ++l) values[l] *= inv;
  return max_w + std::log(total);
}

double top_l_resp_from_weights(std::span<const double> w, int L, std::span<int> perm,
                               std::span<double> values, std::span<int> indices) {
  select_top_l(w, L, perm, indices);
  if (!std::isfinite(w[indices[L - 1]])) {
    throw DegenerateError("top_l_resp_from_weights: fewer than L = " + std::to_string(L) +
                          " finite weights");
  }
  // indices[0] holds the maximum weight.
  const double max_w = w[indices[0]];
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    values[l] = std::exp(w[indices[l]] - max_w);
    total += values[l];
  }
  thread_counters().exp_calls += static_cast<std::uint64_t>(L);
  const double inv = 1.0 / total;
  for (int l = 0; l < L; ++l) values[l] *= inv;
  return max_w + std::log(total);
}

SparseResp top_l_resp_from_weights(std::span<const double> w, int L) {
  if (L < 1 || static_cast<std::size_t>(L) > w.size()) {
    throw ArgumentError("top_l_resp_from_weights: L = " + std::to_string(L) +
                        " outside [1, " + std::to_string(w.size()) + "]");
  }
  SparseResp out;
  out.K = static_cast<int>(w.size());
  out.values.resize(static_cast<std::size_t>(L));
  out.indices.resize(static_cast<std::size_t>(L));
  std::vector<int> perm(w.size());
  top_l_resp_from_weights(w, L, perm, out.values, out.indices);
  return out;
}

DenseResp densify(const SparseResp& s) {
  DenseResp out;
  out.r.assign(static_cast<std::size_t>(s.K), 0.0);
  for (std::size_t l = 0; l < s.indices.size(); ++l) out.r[s.indices[l]] = s.values[l];
  return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("total_variation: length mismatch (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return 0.5 * sum;
}

double entropy(std::span<const double> r) {
  double h = 0.0;
  for (double v : r) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double entropy(const SparseResp& s) { return entropy(s.values); }

double local_objective(std::span<const double> w, std::span<const double> r) {
  double total = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] > 0.0) total += r[k] * (w[k] - std::log(r[k]));
  }
  return total;
}

double local_objective(std::span<const double> w, const SparseResp& s) {
  double total = 0.0;
  for (std::size_t l = 0; l < s.indices.size(); ++l) {
    const double v = s.values[l];
    if (v > 0.0) total += v * (w[s.indices[l]] - std::log(v));
  }
  return total;
}

}  // namespace sparsevi
