#pragma once

// Binary snapshots of trained global states.
//
// Layout (little-endian): "SVSN", u32 version, u32 family (1 = gmm,
// 2 = lda), u32 K, u32 dim, f64 alpha, family payload, u64 config length,
// config text.
//   gmm payload: f64 prior nu, D*D prior inverse scale, K theta, then per
//                cluster f64 nu and D*D inverse scale.
//   lda payload: f64 lambda_bar, K*V lambda (topic-major).

#include <string>
#include <variant>

#include "sparsevi/lda.hpp"
#include "sparsevi/mixture.hpp"

namespace sparsevi {

struct Snapshot {
  std::variant<GaussianMixture, LdaGlobalState> state;
  std::string config_text;

  bool is_gmm() const { return std::holds_alternative<GaussianMixture>(state); }
};

void save_snapshot(const std::string& path, const Snapshot& snap);
/// Throws ParseError (with a byte offset) on malformed or truncated files.
Snapshot load_snapshot(const std::string& path);

}  // namespace sparsevi
