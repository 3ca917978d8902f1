#include "sparsevi/train.hpp"

#include <algorithm>
#include <json.hpp>

namespace sparsevi {

double LearningRateSchedule::rho(std::uint64_t t) const {
  return std::min(1.0, std::pow(delta + static_cast<double>(t), -kappa));
}

void LearningRateSchedule::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ArgumentError("delta must be >= 0");
  if (!(kappa > 0.5 && kappa <= 1.0)) throw ArgumentError("kappa must be in (0.5, 1]");
}

std::string to_json_line(const TraceRow& row) {
  nlohmann::ordered_json j;
  j["lap"] = row.lap;
  j["t"] = row.t;
  j["rho"] = row.rho ? nlohmann::ordered_json(*row.rho) : nlohmann::ordered_json(nullptr);
  j["elapsed_sec"] = row.elapsed_sec;
  j["elbo"] = row.elbo;
  j["heldout"] = row.heldout ? nlohmann::ordered_json(*row.heldout) : nlohmann::ordered_json(nullptr);
  j["n_exp_calls"] = row.n_exp_calls;
  j["n_restart_accepts"] = row.n_restart_accepts;
  j["n_restart_proposals"] = row.n_restart_proposals;
  return j.dump();
}

LdaModel::LdaModel(const Corpus& corpus, double alpha, double lambda_bar, LocalStepConfig local,
                   ParallelOptions parallel, bool warm_start)
    : corpus_(corpus),
      alpha_(alpha),
      lambda_bar_(lambda_bar),
      local_(local),
      parallel_(parallel),
      warm_start_(warm_start) {
  if (warm_start_) warm_.resize(corpus.n_docs());
}

LdaSuffStats LdaModel::summarize(std::size_t begin, std::size_t end, const LdaGlobalState& g) {
  return lda_local_summary(corpus_, begin, end, g, local_, parallel_,
                           warm_start_ ? &warm_ : nullptr);
}

LdaSuffStats LdaModel::summarize(std::span<const std::size_t> idx, const LdaGlobalState& g) {
  const Corpus batch = subset(corpus_, idx);
  if (!warm_start_) return lda_local_summary(batch, 0, batch.n_docs(), g, local_, parallel_);
  std::vector<std::vector<double>> warm(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) warm[i] = warm_[idx[i]];
  auto stats = lda_local_summary(batch, 0, batch.n_docs(), g, local_, parallel_, &warm);
  for (std::size_t i = 0; i < idx.size(); ++i) warm_[idx[i]] = std::move(warm[i]);
  return stats;
}

LdaGlobalState LdaModel::blend(const LdaGlobalState& current, const LdaGlobalState& target,
                               double rho) const {
  std::vector<DirichletPosterior> topics;
  topics.reserve(current.topics.size());
  for (std::size_t k = 0; k < current.topics.size(); ++k) {
    topics.push_back(CategoricalFamily::blend(current.topics[k], target.topics[k], rho));
  }
  return make_lda_state(std::move(topics), alpha_, lambda_bar_);
}

}  // namespace sparsevi
