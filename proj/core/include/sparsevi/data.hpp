#pragma once

// Dataset ingestion and batching: dense matrices (csv or raw64), PGM image
// patches, UCI bag-of-words corpora, document-completion splits, and batch
// partitions.
//
// raw64 layout: 16-byte header ("SMX0", little-endian u32 n_obs, u32 dim,
// u32 reserved = 0), then n_obs * dim little-endian f64 values in row-major
// order.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sparsevi/dataset.hpp"

namespace sparsevi {

enum class DenseFormat { csv, raw64 };

/// "csv" or "raw64"; throws ArgumentError otherwise.
DenseFormat parse_dense_format(const std::string& name);

DenseDataset load_dense(const std::string& path, DenseFormat format);
DenseDataset read_dense_csv(std::istream& in);
DenseDataset read_dense_raw64(std::istream& in);
void write_dense(const std::string& path, const DenseDataset& data, DenseFormat format);
void write_dense_csv(std::ostream& out, const DenseDataset& data);
void write_dense_raw64(std::ostream& out, const DenseDataset& data);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

/// Binary PGM (P5) with maxval <= 255.
GrayImage load_pgm(const std::string& path);
GrayImage read_pgm(std::istream& in);
void write_pgm(const std::string& path, const GrayImage& image);

/// Patches at top-left offsets (stride*i, stride*j) lying fully inside the
/// image, each flattened row-major; zero_mean subtracts every patch's mean.
DenseDataset extract_patches(const GrayImage& image, int patch = 8, int stride = 4,
                             bool zero_mean = true);

/// UCI bag-of-words: lines D, V, NNZ, then NNZ lines "doc word count" with
/// 1-based ids. Documents with no entries are dropped; their count is
/// reported through `n_empty` when given.
Corpus load_uci_bow(const std::string& path, std::size_t* n_empty = nullptr);
Corpus read_uci_bow(std::istream& in, std::size_t* n_empty = nullptr);
void write_uci_bow(const std::string& path, const Corpus& corpus);
void write_uci_bow(std::ostream& out, const Corpus& corpus);

struct CompletionSplit {
  Document a;  // observed part
  Document b;  // held-out part
};

/// Partitions word types at random: ceil(frac_a * U) types go to `a`, the
/// rest to `b`. Returns nullopt when U < 2.
std::optional<CompletionSplit> completion_split(const Document& doc, double frac_a,
                                                std::mt19937_64& rng);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Contiguous ranges covering [0, n) with sizes differing by at most one,
/// larger ones first. Throws ArgumentError if B < 1 or B > n.
std::vector<IndexRange> fixed_partition(std::size_t n, int B);

// Uniform draws of ceil(n / B) indices with replacement.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, int B, std::uint64_t seed);
  std::vector<std::size_t> next();
  std::size_t batch_size() const { return batch_size_; }

 private:
  std::size_t n_;
  std::size_t batch_size_;
  std::mt19937_64 rng_;
};

DenseDataset subset(const DenseDataset& data, std::span<const std::size_t> rows);
TokenDataset subset(const TokenDataset& data, std::span<const std::size_t> rows);
Corpus subset(const Corpus& corpus, std::span<const std::size_t> docs);

}  // namespace sparsevi
