#include "sparsevi/mixture.hpp"

#include <algorithm>

namespace sparsevi {

DenseResp RespBatch::dense_at(std::size_t i) const {
  if (dense) {
    const auto* row = values.data() + i * static_cast<std::size_t>(K);
    return DenseResp{std::vector<double>(row, row + K)};
  }
  return densify(sparse_at(i));
}

SparseResp RespBatch::sparse_at(std::size_t i) const {
  SparseResp out;
  out.K = K;
  if (dense) {
    const auto* row = values.data() + i * static_cast<std::size_t>(K);
    out.values.assign(row, row + K);
    out.indices.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) out.indices[static_cast<std::size_t>(k)] = k;
    return out;
  }
  const std::size_t off = i * static_cast<std::size_t>(width);
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(off),
                    values.begin() + static_cast<std::ptrdiff_t>(off + width));
  out.indices.assign(indices.begin() + static_cast<std::ptrdiff_t>(off),
                     indices.begin() + static_cast<std::ptrdiff_t>(off + width));
  return out;
}

RespBatch resp_from_weight_block(const RowMatrix& weights, int L) {
  RespBatch out;
  out.n_obs = static_cast<std::size_t>(weights.rows());
  out.K = static_cast<int>(weights.cols());
  out.dense = (L == kDense);
  out.width = out.dense ? out.K : L;
  const auto width = static_cast<std::size_t>(out.width);
  out.values.resize(out.n_obs * width);
  if (!out.dense) out.indices.resize(out.n_obs * width);
  std::vector<int> perm(static_cast<std::size_t>(out.K));
  double entropy = 0.0;
  double log_norm = 0.0;
  for (std::size_t i = 0; i < out.n_obs; ++i) {
    const std::span<const double> w(weights.row(static_cast<Eigen::Index>(i)).data(),
                                    static_cast<std::size_t>(out.K));
    const std::span<double> vals(out.values.data() + i * width, width);
    if (out.dense) {
      log_norm += dense_resp_from_weights(w, vals);
    } else {
      const std::span<int> idx(out.indices.data() + i * width, width);
      log_norm += top_l_resp_from_weights(w, L, perm, vals, idx);
    }
    entropy += sparsevi::entropy(vals);
  }
  out.entropy = entropy;
  out.log_normalizer = log_norm;
  return out;
}

}  // namespace sparsevi
