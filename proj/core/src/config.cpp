#include "sparsevi/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsevi/errors.hpp"

namespace sparsevi {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key, key + ": cannot parse '" + value + "'");
  }
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError(key, key + ": expected on or off, got '" + value + "'");
}

std::string flag(bool b) { return b ? "on" : "off"; }

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string to_string(ModelKind m) { return m == ModelKind::gmm ? "gmm" : "lda"; }

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::svi: return "svi";
    case Algorithm::mvi: return "mvi";
    case Algorithm::full: return "full";
  }
  return "mvi";
}

double TrainConfig::resolved_alpha() const {
  if (alpha) return *alpha;
  return model == ModelKind::gmm ? 10.0 : 0.5;
}

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k{
      "model",    "K",          "L",           "alg",           "batches",
      "laps",     "alpha",      "lambda_bar",  "nu_bar",        "delta",
      "kappa",    "max_local_iters", "conv_threshold", "eps_active", "restarts",
      "warm_start", "seed",     "deterministic", "threads",     "timing",
      "data",     "data_format", "heldout",    "output",        "init"};
  return k;
}

void TrainConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "model") {
    if (value == "gmm") {
      model = ModelKind::gmm;
    } else if (value == "lda") {
      model = ModelKind::lda;
    } else {
      throw ConfigError(key, "model: expected gmm or lda, got '" + value + "'");
    }
  } else if (key == "K") {
    K = parse_number<int>(key, value);
  } else if (key == "L") {
    L = value == "dense" ? kDense : parse_number<int>(key, value);
    if (value != "dense" && L == kDense) throw ConfigError(key, "L: use 'dense' rather than 0");
  } else if (key == "alg") {
    if (value == "svi") {
      alg = Algorithm::svi;
    } else if (value == "mvi") {
      alg = Algorithm::mvi;
    } else if (value == "full") {
      alg = Algorithm::full;
    } else {
      throw ConfigError(key, "alg: expected svi, mvi or full, got '" + value + "'");
    }
  } else if (key == "batches") {
    batches = parse_number<int>(key, value);
  } else if (key == "laps") {
    laps = parse_number<int>(key, value);
  } else if (key == "alpha") {
    if (value == "auto") {
      alpha.reset();
    } else {
      alpha = parse_number<double>(key, value);
    }
  } else if (key == "lambda_bar") {
    lambda_bar = parse_number<double>(key, value);
  } else if (key == "nu_bar") {
    if (value == "auto") {
      nu_bar.reset();
    } else {
      nu_bar = parse_number<double>(key, value);
    }
  } else if (key == "delta") {
    delta = parse_number<double>(key, value);
  } else if (key == "kappa") {
    kappa = parse_number<double>(key, value);
  } else if (key == "max_local_iters") {
    max_local_iters = parse_number<int>(key, value);
  } else if (key == "conv_threshold") {
    conv_threshold = parse_number<double>(key, value);
  } else if (key == "eps_active") {
    eps_active = parse_number<double>(key, value);
  } else if (key == "restarts") {
    restarts = parse_flag(key, value);
  } else if (key == "warm_start") {
    warm_start = parse_flag(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "deterministic") {
    deterministic = parse_flag(key, value);
  } else if (key == "threads") {
    threads = parse_number<int>(key, value);
  } else if (key == "timing") {
    timing = parse_flag(key, value);
  } else if (key == "data") {
    data = value;
  } else if (key == "data_format") {
    data_format = value;
  } else if (key == "heldout") {
    heldout = value;
  } else if (key == "output") {
    output = value;
  } else if (key == "init") {
    init = value;
  } else {
    throw ConfigError(key, key + ": unknown configuration key");
  }
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, std::string(key) + ": " + what);
  };
  require(K >= 1, "K", "must be >= 1");
  require(L == kDense || (L >= 1 && L <= K), "L",
          "must be 'dense' or in [1, K = " + std::to_string(K) + "], got " + std::to_string(L));
  require(batches >= 1, "batches", "must be >= 1");
  require(laps >= 0, "laps", "must be >= 0");
  require(!alpha || (*alpha > 0.0 && std::isfinite(*alpha)), "alpha", "must be > 0");
  require(lambda_bar > 0.0 && std::isfinite(lambda_bar), "lambda_bar", "must be > 0");
  require(delta >= 0.0 && std::isfinite(delta), "delta", "must be >= 0");
  require(kappa > 0.5 && kappa <= 1.0, "kappa", "must be in (0.5, 1]");
  require(max_local_iters >= 1, "max_local_iters", "must be >= 1");
  require(conv_threshold > 0.0, "conv_threshold", "must be > 0");
  require(eps_active >= 0.0, "eps_active", "must be >= 0");
  require(threads >= 1, "threads", "must be >= 1");
  require(data_format == "auto" || data_format == "csv" || data_format == "raw64" ||
              data_format == "pgm" || data_format == "uci",
          "data_format", "expected auto, csv, raw64, pgm or uci");
  require(!data.empty(), "data", "required (path to training data)");
  if (model == ModelKind::gmm) {
    require(data_format != "uci", "data_format", "uci corpora need model = lda");
  } else {
    require(data_format == "auto" || data_format == "uci", "data_format",
            "lda needs a uci corpus");
  }
}

std::string TrainConfig::to_text() const {
  std::ostringstream out;
  out << "model = " << to_string(model) << '\n'
      << "K = " << K << '\n'
      << "L = " << (L == kDense ? std::string("dense") : std::to_string(L)) << '\n'
      << "alg = " << to_string(alg) << '\n'
      << "batches = " << batches << '\n'
      << "laps = " << laps << '\n'
      << "alpha = " << num(resolved_alpha()) << '\n'
      << "lambda_bar = " << num(lambda_bar) << '\n'
      << "nu_bar = " << (nu_bar ? num(*nu_bar) : std::string("auto")) << '\n'
      << "delta = " << num(delta) << '\n'
      << "kappa = " << num(kappa) << '\n'
      << "max_local_iters = " << max_local_iters << '\n'
      << "conv_threshold = " << num(conv_threshold) << '\n'
      << "eps_active = " << num(eps_active) << '\n'
      << "restarts = " << flag(restarts) << '\n'
      << "warm_start = " << flag(warm_start) << '\n'
      << "seed = " << seed << '\n'
      << "deterministic = " << flag(deterministic) << '\n'
      << "threads = " << threads << '\n'
      << "timing = " << flag(timing) << '\n'
      << "data = " << data << '\n'
      << "data_format = " << data_format << '\n'
      << "heldout = " << heldout << '\n'
      << "output = " << output << '\n'
      << "init = " << init << '\n';
  return out.str();
}

TrainConfig TrainConfig::parse(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'",
                       line_no);
    }
    cfg.set(trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  return cfg;
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace sparsevi
