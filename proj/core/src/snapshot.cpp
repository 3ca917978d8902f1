#include "sparsevi/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFamilyGmm = 1;
constexpr std::uint32_t kFamilyLda = 2;

class Writer {
 public:
  template <class T>
  void put(T v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_doubles(const double* p, std::size_t n) {
    const auto* c = reinterpret_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n * sizeof(double));
  }
  void put_bytes(const std::string& s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void get_doubles(double* p, std::size_t n) {
    need(n * sizeof(double));
    std::memcpy(p, buf_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) {
      throw ParseError("snapshot: truncated at byte " + std::to_string(pos_) + ", needed " +
                           std::to_string(n) + " more bytes",
                       pos_);
    }
  }
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const std::string& path, const Snapshot& snap) {
  Writer w;
  w.put_bytes("SVSN");
  w.put<std::uint32_t>(kVersion);
  if (const auto* g = std::get_if<GaussianMixture>(&snap.state)) {
    const int D = g->prior.dim();
    w.put<std::uint32_t>(kFamilyGmm);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(g->K()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(D));
    w.put<double>(g->alpha);
    w.put<double>(g->prior.nu);
    w.put_doubles(g->prior.inverse_scale.data(), static_cast<std::size_t>(D * D));
    w.put_doubles(g->theta.lambda().data(), g->theta.lambda().size());
    for (const auto& post : g->posts) {
      w.put<double>(post.nu());
      w.put_doubles(post.inverse_scale().data(), static_cast<std::size_t>(D * D));
    }
  } else {
    const auto& lda = std::get<LdaGlobalState>(snap.state);
    w.put<std::uint32_t>(kFamilyLda);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(lda.K()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(lda.V()));
    w.put<double>(lda.alpha);
    w.put<double>(lda.lambda_bar);
    for (const auto& t : lda.topics) w.put_doubles(t.lambda().data(), t.lambda().size());
  }
  w.put<std::uint64_t>(snap.config_text.size());
  w.put_bytes(snap.config_text);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));
  if (r.get_bytes(4) != "SVSN") throw ParseError("snapshot: bad magic (not a snapshot file)", 0);
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw ParseError("snapshot: unsupported version " + std::to_string(version), 4);
  }
  const auto family = r.get<std::uint32_t>();
  const auto K = static_cast<int>(r.get<std::uint32_t>());
  const auto dim = static_cast<int>(r.get<std::uint32_t>());
  const double alpha = r.get<double>();
  if (K < 1 || dim < 1) throw ParseError("snapshot: empty model", r.pos());
  Snapshot snap;
  if (family == kFamilyGmm) {
    GaussianMixture g;
    g.alpha = alpha;
    g.prior.nu = r.get<double>();
    g.prior.inverse_scale.resize(dim, dim);
    r.get_doubles(g.prior.inverse_scale.data(), static_cast<std::size_t>(dim * dim));
    std::vector<double> theta(static_cast<std::size_t>(K));
    r.get_doubles(theta.data(), theta.size());
    g.theta = DirichletPosterior(std::move(theta));
    for (int k = 0; k < K; ++k) {
      const double nu = r.get<double>();
      Matrix inv(dim, dim);
      r.get_doubles(inv.data(), static_cast<std::size_t>(dim * dim));
      g.posts.emplace_back(nu, std::move(inv));
    }
    snap.state = std::move(g);
  } else if (family == kFamilyLda) {
    const double lambda_bar = r.get<double>();
    std::vector<DirichletPosterior> topics;
    for (int k = 0; k < K; ++k) {
      std::vector<double> lambda(static_cast<std::size_t>(dim));
      r.get_doubles(lambda.data(), lambda.size());
      topics.emplace_back(std::move(lambda));
    }
    snap.state = make_lda_state(std::move(topics), alpha, lambda_bar);
  } else {
    throw ParseError("snapshot: unknown model family " + std::to_string(family), 8);
  }
  const auto len = r.get<std::uint64_t>();
  snap.config_text = r.get_bytes(static_cast<std::size_t>(len));
  if (!r.done()) throw ParseError("snapshot: trailing bytes", r.pos());
  return snap;
}

}  // namespace sparsevi
