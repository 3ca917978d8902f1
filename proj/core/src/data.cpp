#include "sparsevi/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse '" + std::string(field) +
                         "' as a number",
                     line);
  }
  return value;
}

long long parse_int(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  long long value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("line " + std::to_string(line) + ": expected integer " + what + ", got '" +
                         std::string(field) + "'",
                     line);
  }
  return value;
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

}  // namespace

DenseFormat parse_dense_format(const std::string& name) {
  if (name == "csv") return DenseFormat::csv;
  if (name == "raw64") return DenseFormat::raw64;
  throw ArgumentError("unknown dense format '" + name + "' (expected csv or raw64)");
}

DenseDataset read_dense_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      const double v = parse_double(view.substr(start, comma - start), line_no);
      if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value", line_no);
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      dim = fields;
    } else if (fields != dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                           " columns, got " + std::to_string(fields),
                       line_no);
    }
    ++rows;
  }
  DenseDataset out;
  out.x = Eigen::Map<const RowMatrix>(values.data(), static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(dim));
  return out;
}

DenseDataset read_dense_raw64(std::istream& in) {
  std::array<unsigned char, 16> header{};
  in.read(reinterpret_cast<char*>(header.data()), 16);
  const auto got_header = static_cast<std::size_t>(in.gcount());
  if (got_header < 16) {
    throw ParseError("raw64: truncated header, expected 16 bytes, got " +
                         std::to_string(got_header),
                     got_header);
  }
  if (std::string_view(reinterpret_cast<const char*>(header.data()), 4) != "SMX0") {
    throw ParseError("raw64: bad magic (expected SMX0)", 0);
  }
  const std::uint32_t n = read_u32_le(header.data() + 4);
  const std::uint32_t dim = read_u32_le(header.data() + 8);
  const std::size_t count = static_cast<std::size_t>(n) * dim;
  const std::size_t expected = 16 + count * 8;
  std::vector<unsigned char> body(count * 8);
  in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
  const std::size_t actual = 16 + static_cast<std::size_t>(in.gcount());
  if (actual < expected) {
    throw ParseError("raw64: truncated file, expected " + std::to_string(expected) +
                         " bytes, got " + std::to_string(actual),
                     actual);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("raw64: trailing bytes after " + std::to_string(expected) + " bytes",
                     expected);
  }
  DenseDataset out;
  out.x.resize(n, dim);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | body[i * 8 + static_cast<std::size_t>(b)];
    double v = 0.0;
    static_assert(sizeof(v) == sizeof(bits));
    std::memcpy(&v, &bits, sizeof(v));
    if (!std::isfinite(v)) {
      throw ParseError("raw64: non-finite value at byte " + std::to_string(16 + i * 8), 16 + i * 8);
    }
    out.x.data()[i] = v;
  }
  return out;
}

DenseDataset load_dense(const std::string& path, DenseFormat format) {
  auto in = open_in(path);
  return format == DenseFormat::csv ? read_dense_csv(in) : read_dense_raw64(in);
}

void write_dense_csv(std::ostream& out, const DenseDataset& data) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      if (j > 0) out << ',';
      out << data.x(i, j);
    }
    out << '\n';
  }
}

void write_dense_raw64(std::ostream& out, const DenseDataset& data) {
  out.write("SMX0", 4);
  write_u32_le(out, static_cast<std::uint32_t>(data.x.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(data.x.cols()));
  write_u32_le(out, 0);  // reserved, pads the header to 16 bytes
  const std::size_t count = static_cast<std::size_t>(data.x.size());
  std::vector<char> body(count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    const double v = data.x.data()[i];
    std::memcpy(&bits, &v, sizeof(v));
    for (std::size_t b = 0; b < 8; ++b) body[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

void write_dense(const std::string& path, const DenseDataset& data, DenseFormat format) {
  auto out = open_out(path);
  if (format == DenseFormat::csv) {
    write_dense_csv(out, data);
  } else {
    write_dense_raw64(out, data);
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ------------------------------------------------------------------ images

namespace {

// Reads the next header token of a PGM, skipping whitespace and comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return tok;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P5") {
    throw ParseError("pgm: unsupported variant '" + magic + "' (only binary P5 is supported)", 0);
  }
  auto number = [&](const char* what) {
    const std::string tok = pgm_token(in);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0) {
      throw ParseError(std::string("pgm: bad ") + what + " '" + tok + "'", 0);
    }
    return v;
  };
  const long long width = number("width");
  const long long height = number("height");
  const long long maxval = number("maxval");
  if (maxval > 255) {
    throw ParseError("pgm: unsupported variant, 16-bit maxval " + std::to_string(maxval), 0);
  }
  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.pixels.resize(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw ParseError("pgm: truncated pixel data, expected " + std::to_string(img.pixels.size()) +
                         " bytes, got " + std::to_string(in.gcount()),
                     static_cast<std::size_t>(in.gcount()));
  }
  return img;
}

GrayImage load_pgm(const std::string& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_pgm(const std::string& path, const GrayImage& image) {
  auto out = open_out(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

DenseDataset extract_patches(const GrayImage& image, int patch, int stride, bool zero_mean) {
  if (patch < 1 || stride < 1) throw ArgumentError("extract_patches: patch and stride must be >= 1");
  if (image.width < patch || image.height < patch) {
    throw ArgumentError("extract_patches: image " + std::to_string(image.width) + "x" +
                        std::to_string(image.height) + " smaller than patch " +
                        std::to_string(patch));
  }
  const int rows = (image.height - patch) / stride + 1;
  const int cols = (image.width - patch) / stride + 1;
  const int dim = patch * patch;
  DenseDataset out;
  out.x.resize(static_cast<Eigen::Index>(rows) * cols, dim);
  Eigen::Index n = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j, ++n) {
      for (int r = 0; r < patch; ++r) {
        for (int c = 0; c < patch; ++c) {
          out.x(n, r * patch + c) = image.at(i * stride + r, j * stride + c);
        }
      }
      if (zero_mean) out.x.row(n).array() -= out.x.row(n).mean();
    }
  }
  return out;
}

// ------------------------------------------------------------------ corpora

Corpus read_uci_bow(std::istream& in, std::size_t* n_empty) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  long long header[3] = {0, 0, 0};
  const char* names[3] = {"D", "V", "NNZ"};
  for (int h = 0; h < 3; ++h) {
    if (!next_line()) {
      throw ParseError("line " + std::to_string(line_no + 1) + ": missing header " + names[h],
                       line_no + 1);
    }
    header[h] = parse_int(line, line_no, names[h]);
    if (header[h] < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": negative " + names[h], line_no);
    }
  }
  const long long D = header[0];
  const long long V = header[1];
  const long long nnz = header[2];
  std::vector<std::vector<std::pair<int, double>>> entries(static_cast<std::size_t>(D));
  for (long long e = 0; e < nnz; ++e) {
    if (!next_line()) {
      throw ParseError("line " + std::to_string(line_no + 1) + ": expected " +
                           std::to_string(nnz) + " entries, found " + std::to_string(e),
                       line_no + 1);
    }
    std::istringstream fields(line);
    std::string f_doc, f_word, f_count, extra;
    if (!(fields >> f_doc >> f_word >> f_count) || (fields >> extra)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'docID wordID count'",
                       line_no);
    }
    const long long d = parse_int(f_doc, line_no, "docID");
    const long long w = parse_int(f_word, line_no, "wordID");
    const double c = parse_double(f_count, line_no);
    if (d < 1 || d > D) {
      throw ParseError("line " + std::to_string(line_no) + ": docID " + std::to_string(d) +
                           " outside [1, " + std::to_string(D) + "]",
                       line_no);
    }
    if (w < 1 || w > V) {
      throw ParseError("line " + std::to_string(line_no) + ": wordID " + std::to_string(w) +
                           " outside [1, " + std::to_string(V) + "]",
                       line_no);
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ParseError("line " + std::to_string(line_no) + ": count must be positive", line_no);
    }
    entries[static_cast<std::size_t>(d - 1)].emplace_back(static_cast<int>(w - 1), c);
  }
  if (next_line()) {
    throw ParseError("line " + std::to_string(line_no) + ": more entries than NNZ = " +
                         std::to_string(nnz),
                     line_no);
  }
  Corpus corpus;
  corpus.vocab_size = static_cast<int>(V);
  std::size_t empty = 0;
  for (auto& doc_entries : entries) {
    if (doc_entries.empty()) {
      ++empty;
      continue;
    }
    std::stable_sort(doc_entries.begin(), doc_entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Document doc;
    for (const auto& [w, c] : doc_entries) {
      if (!doc.word_ids.empty() && doc.word_ids.back() == w) {
        doc.counts.back() += c;
      } else {
        doc.word_ids.push_back(w);
        doc.counts.push_back(c);
      }
    }
    corpus.docs.push_back(std::move(doc));
  }
  if (n_empty != nullptr) *n_empty = empty;
  return corpus;
}

Corpus load_uci_bow(const std::string& path, std::size_t* n_empty) {
  auto in = open_in(path);
  return read_uci_bow(in, n_empty);
}

void write_uci_bow(std::ostream& out, const Corpus& corpus) {
  std::size_t nnz = 0;
  for (const auto& d : corpus.docs) nnz += d.n_unique();
  out << corpus.n_docs() << '\n' << corpus.vocab_size << '\n' << nnz << '\n';
  out << std::setprecision(17);
  for (std::size_t d = 0; d < corpus.n_docs(); ++d) {
    const auto& doc = corpus.docs[d];
    for (std::size_t u = 0; u < doc.n_unique(); ++u) {
      out << d + 1 << ' ' << doc.word_ids[u] + 1 << ' ' << doc.counts[u] << '\n';
    }
  }
}

void write_uci_bow(const std::string& path, const Corpus& corpus) {
  auto out = open_out(path);
  write_uci_bow(out, corpus);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::optional<CompletionSplit> completion_split(const Document& doc, double frac_a,
                                                std::mt19937_64& rng) {
  const std::size_t U = doc.n_unique();
  if (U < 2) return std::nullopt;
  if (!(frac_a > 0.0 && frac_a < 1.0)) throw ArgumentError("completion_split: frac_a must be in (0, 1)");
  // Guard against 0.8 * 5 = 4.000...01 style rounding before the ceiling.
  auto n_a = static_cast<std::size_t>(std::ceil(frac_a * static_cast<double>(U) - 1e-9));
  n_a = std::clamp<std::size_t>(n_a, 1, U - 1);
  std::vector<std::size_t> order(U);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> in_a(U, 0);
  for (std::size_t i = 0; i < n_a; ++i) in_a[order[i]] = 1;
  CompletionSplit split;
  for (std::size_t u = 0; u < U; ++u) {
    Document& part = in_a[u] ? split.a : split.b;
    part.word_ids.push_back(doc.word_ids[u]);
    part.counts.push_back(doc.counts[u]);
  }
  return split;
}

std::vector<IndexRange> fixed_partition(std::size_t n, int B) {
  if (B < 1) throw ArgumentError("batches must be >= 1");
  if (static_cast<std::size_t>(B) > n) {
    throw ArgumentError("batches (" + std::to_string(B) + ") exceed observations (" +
                        std::to_string(n) + ")");
  }
  const std::size_t base = n / static_cast<std::size_t>(B);
  const std::size_t extra = n % static_cast<std::size_t>(B);
  std::vector<IndexRange> out;
  out.reserve(static_cast<std::size_t>(B));
  std::size_t begin = 0;
  for (std::size_t b = 0; b < static_cast<std::size_t>(B); ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    out.push_back(IndexRange{begin, begin + size});
    begin += size;
  }
  return out;
}

BatchSampler::BatchSampler(std::size_t n, int B, std::uint64_t seed) : n_(n), rng_(seed) {
  if (B < 1) throw ArgumentError("batches must be >= 1");
  if (static_cast<std::size_t>(B) > n) {
    throw ArgumentError("batches (" + std::to_string(B) + ") exceed observations (" +
                        std::to_string(n) + ")");
  }
  batch_size_ = (n + static_cast<std::size_t>(B) - 1) / static_cast<std::size_t>(B);
}

std::vector<std::size_t> BatchSampler::next() {
  std::uniform_int_distribution<std::size_t> pick(0, n_ - 1);
  std::vector<std::size_t> out(batch_size_);
  for (auto& i : out) i = pick(rng_);
  return out;
}

DenseDataset subset(const DenseDataset& data, std::span<const std::size_t> rows) {
  DenseDataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

TokenDataset subset(const TokenDataset& data, std::span<const std::size_t> rows) {
  TokenDataset out;
  out.vocab_size = data.vocab_size;
  out.tokens.reserve(rows.size());
  for (std::size_t i : rows) out.tokens.push_back(data.tokens[i]);
  return out;
}

Corpus subset(const Corpus& corpus, std::span<const std::size_t> docs) {
  Corpus out;
  out.vocab_size = corpus.vocab_size;
  out.docs.reserve(docs.size());
  for (std::size_t d : docs) out.docs.push_back(corpus.docs[d]);
  return out;
}

}  // namespace sparsevi
