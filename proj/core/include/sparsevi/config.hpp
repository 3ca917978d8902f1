#pragma once

// Training configuration as plain "key = value" lines. Unknown keys and
// malformed values are rejected; `validate` checks the whole configuration
// before any work starts.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsevi/types.hpp"

namespace sparsevi {

enum class ModelKind { gmm, lda };
enum class Algorithm { svi, mvi, full };

struct TrainConfig {
  ModelKind model = ModelKind::gmm;
  int K = 10;
  int L = kDense;
  Algorithm alg = Algorithm::mvi;
  int batches = 1;
  int laps = 10;
  std::optional<double> alpha;  // unset: 10 for gmm, 0.5 for lda
  double lambda_bar = 0.1;
  std::optional<double> nu_bar;  // unset: D + 2
  double delta = 1.0;
  double kappa = 0.55;
  int max_local_iters = 100;
  double conv_threshold = 0.05;
  double eps_active = 1e-8;
  bool restarts = false;
  bool warm_start = false;
  std::uint64_t seed = 0;
  bool deterministic = true;
  int threads = 1;
  bool timing = true;  // off: elapsed_sec recorded as 0 so metrics are reproducible
  std::string data;
  std::string data_format = "auto";  // auto | csv | raw64 | pgm | uci
  std::string heldout;
  std::string output;
  std::string init;  // empty: k-means++ seeding; otherwise a snapshot path

  double resolved_alpha() const;

  /// Sets one field from its text form; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError for the first invalid field.
  void validate() const;
  /// Every field, one "key = value" line each, in a fixed order. Parsing the
  /// result reproduces this configuration.
  std::string to_text() const;

  static TrainConfig parse(const std::string& text);
  static TrainConfig load(const std::string& path);
  static const std::vector<std::string>& keys();
};

std::string to_string(ModelKind m);
std::string to_string(Algorithm a);

}  // namespace sparsevi
