#pragma once

#include <cstddef>
#include <vector>

#include "sparsevi/types.hpp"

namespace sparsevi {

// Real-valued observations, one per row.
struct DenseDataset {
  RowMatrix x;

  std::size_t n_obs() const { return static_cast<std::size_t>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Single-token observations for the categorical mixture.
struct TokenDataset {
  std::vector<int> tokens;
  int vocab_size = 0;

  std::size_t n_obs() const { return tokens.size(); }
};

// Sparse histogram form of a document: distinct word types and their counts.
struct Document {
  std::vector<int> word_ids;
  std::vector<double> counts;

  std::size_t n_unique() const { return word_ids.size(); }
  double n_tokens() const {
    double total = 0.0;
    for (double c : counts) total += c;
    return total;
  }
};

struct Corpus {
  std::vector<Document> docs;
  int vocab_size = 0;

  std::size_t n_docs() const { return docs.size(); }
  std::size_t n_obs() const { return docs.size(); }
};

}  // namespace sparsevi
