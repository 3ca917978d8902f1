#include "commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <json.hpp>

#include "sparsevi/config.hpp"
#include "sparsevi/data.hpp"
#include "sparsevi/errors.hpp"
#include "sparsevi/eval.hpp"
#include "sparsevi/init.hpp"
#include "sparsevi/snapshot.hpp"
#include "sparsevi/train.hpp"

namespace sparsevi::cli {
namespace {

// Bad invocation that is not tied to a single config key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string extension_of(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Resolves "auto" from the file extension.
std::string resolve_format(const std::string& format, const std::string& path, ModelKind model) {
  if (format != "auto") return format;
  if (model == ModelKind::lda) return "uci";
  const std::string ext = extension_of(path);
  if (ext == ".csv") return "csv";
  if (ext == ".raw64" || ext == ".bin" || ext == ".smx") return "raw64";
  if (ext == ".pgm") return "pgm";
  throw ConfigError("data_format", "data_format: cannot infer a dense format from '" + path +
                                       "'; pass --data_format csv, raw64 or pgm");
}

DenseDataset load_dense_any(const std::string& path, const std::string& format) {
  if (format == "pgm") return extract_patches(load_pgm(path));
  if (format == "csv" || format == "raw64") return load_dense(path, parse_dense_format(format));
  throw UsageError("format '" + format + "' does not hold dense observations");
}

WishartPrior make_prior(const DenseDataset& data, const std::optional<double>& nu_bar) {
  const int D = data.dim();
  if (data.n_obs() == 0) throw ArgumentError("training data is empty");
  const Matrix second = data.x.transpose() * data.x / static_cast<double>(data.n_obs());
  WishartPrior prior = default_wishart_prior(second);
  if (nu_bar) {
    if (!(*nu_bar > D - 1.0)) {
      throw ConfigError("nu_bar", "nu_bar: must exceed D - 1 = " + std::to_string(D - 1));
    }
    prior.inverse_scale *= *nu_bar / prior.nu;
    prior.nu = *nu_bar;
  }
  return prior;
}

ParallelOptions parallel_of(const TrainConfig& cfg) {
  ParallelOptions p;
  p.threads = cfg.threads;
  p.deterministic = cfg.deterministic;
  return p;
}

LocalStepConfig local_of(const TrainConfig& cfg) {
  LocalStepConfig local;
  local.L = cfg.L;
  local.max_iters = cfg.max_local_iters;
  local.conv_threshold = cfg.conv_threshold;
  local.eps_active = cfg.eps_active;
  local.restarts_enabled = cfg.restarts;
  return local;
}

RunOptions run_options_of(const TrainConfig& cfg) {
  RunOptions opts;
  opts.alg = cfg.alg;
  opts.batches = cfg.batches;
  opts.laps = cfg.laps;
  opts.sched = LearningRateSchedule{cfg.delta, cfg.kappa};
  opts.seed = cfg.seed;
  opts.timing = cfg.timing;
  return opts;
}

// Registers one "--key" option per TrainConfig field.
std::map<std::string, std::string>& add_config_flags(CLI::App* app,
                                                     std::map<std::string, std::string>& values) {
  for (const auto& key : TrainConfig::keys()) {
    app->add_option("--" + key, values[key], "TrainConfig field " + key);
  }
  return values;
}

TrainConfig resolve_config(CLI::App* app, const std::string& config_path,
                           const std::map<std::string, std::string>& values) {
  TrainConfig cfg = config_path.empty() ? TrainConfig{} : TrainConfig::load(config_path);
  for (const auto& key : TrainConfig::keys()) {
    if (app->count("--" + key) > 0) cfg.set(key, values.at(key));
  }
  cfg.validate();
  return cfg;
}

GaussianMixture initial_gmm(const TrainConfig& cfg, const DenseDataset& data,
                            const WishartPrior& prior) {
  if (cfg.init.empty()) {
    return init_gaussian_mixture(data, cfg.K, cfg.resolved_alpha(), prior, cfg.seed);
  }
  Snapshot snap = load_snapshot(cfg.init);
  if (!snap.is_gmm()) throw UsageError("init snapshot '" + cfg.init + "' holds an lda model");
  auto g = std::get<GaussianMixture>(std::move(snap.state));
  if (g.K() != cfg.K || g.prior.dim() != data.dim()) {
    throw UsageError("init snapshot '" + cfg.init + "' has K = " + std::to_string(g.K()) +
                     ", D = " + std::to_string(g.prior.dim()) + "; expected K = " +
                     std::to_string(cfg.K) + ", D = " + std::to_string(data.dim()));
  }
  g.alpha = cfg.resolved_alpha();
  g.prior = prior;
  return g;
}

LdaGlobalState initial_lda(const TrainConfig& cfg, const Corpus& corpus) {
  if (cfg.init.empty()) {
    return init_lda(corpus, cfg.K, cfg.resolved_alpha(), cfg.lambda_bar, cfg.seed);
  }
  Snapshot snap = load_snapshot(cfg.init);
  if (snap.is_gmm()) throw UsageError("init snapshot '" + cfg.init + "' holds a gmm model");
  auto g = std::get<LdaGlobalState>(std::move(snap.state));
  if (g.K() != cfg.K || g.V() != corpus.vocab_size) {
    throw UsageError("init snapshot '" + cfg.init + "' has K = " + std::to_string(g.K()) +
                     ", V = " + std::to_string(g.V()) + "; expected K = " + std::to_string(cfg.K) +
                     ", V = " + std::to_string(corpus.vocab_size));
  }
  return make_lda_state(g.topics, cfg.resolved_alpha(), cfg.lambda_bar);
}

void check_vocab(const Corpus& corpus, int V, const std::string& what) {
  if (corpus.vocab_size != V) {
    throw UsageError(what + " vocabulary size " + std::to_string(corpus.vocab_size) +
                     " differs from the model's " + std::to_string(V));
  }
}

std::string report_json(const HeldoutReport& r) {
  nlohmann::ordered_json j;
  j["score"] = r.score;
  j["n_units"] = r.n_units;
  j["n_skipped"] = r.n_skipped;
  j["n_tokens"] = r.n_tokens;
  j["elapsed_sec"] = r.elapsed_sec;
  return j.dump();
}

int cmd_train(const TrainConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw ConfigError("output", "output: required (output directory)");
  std::filesystem::create_directories(cfg.output);
  const std::filesystem::path dir(cfg.output);
  std::ofstream metrics(dir / "metrics.jsonl", std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot write '" + (dir / "metrics.jsonl").string() + "'");
  auto on_lap = [&](const TraceRow& row) { metrics << to_json_line(row) << '\n' << std::flush; };
  const ParallelOptions par = parallel_of(cfg);
  const std::string format = resolve_format(cfg.data_format, cfg.data, cfg.model);
  Snapshot snap;
  double final_elbo = 0.0;
  if (cfg.model == ModelKind::gmm) {
    const DenseDataset data = load_dense_any(cfg.data, format);
    std::optional<DenseDataset> heldout;
    if (!cfg.heldout.empty()) {
      heldout = load_dense_any(cfg.heldout, resolve_format("auto", cfg.heldout, cfg.model));
      if (heldout->dim() != data.dim()) throw UsageError("heldout dimension differs from data");
    }
    const WishartPrior prior = make_prior(data, cfg.nu_bar);
    MixtureModel<GaussianFamily> model(data, cfg.resolved_alpha(), prior, cfg.L, par);
    HeldoutHook<decltype(model)> hook;
    if (heldout) {
      hook = [&](const GaussianMixture& g) -> std::optional<double> {
        return mixture_heldout(*heldout, g, par).score;
      };
    }
    auto result = run(model, initial_gmm(cfg, data, prior), run_options_of(cfg), hook, on_lap);
    if (!result.trace.empty()) final_elbo = result.trace.back().elbo;
    snap.state = std::move(result.state);
  } else {
    const Corpus corpus = load_uci_bow(cfg.data);
    std::optional<Corpus> heldout;
    if (!cfg.heldout.empty()) {
      heldout = load_uci_bow(cfg.heldout);
      check_vocab(*heldout, corpus.vocab_size, "heldout");
    }
    LdaModel model(corpus, cfg.resolved_alpha(), cfg.lambda_bar, local_of(cfg), par,
                   cfg.warm_start);
    HeldoutHook<LdaModel> hook;
    if (heldout) {
      hook = [&](const LdaGlobalState& g) -> std::optional<double> {
        CompletionOptions copts;
        copts.seed = cfg.seed;
        copts.parallel = par;
        return doc_completion_score(*heldout, g, copts).score;
      };
    }
    auto result = run(model, initial_lda(cfg, corpus), run_options_of(cfg), hook, on_lap);
    if (!result.trace.empty()) final_elbo = result.trace.back().elbo;
    snap.state = std::move(result.state);
  }
  snap.config_text = cfg.to_text();
  save_snapshot((dir / "snapshot.bin").string(), snap);
  std::ofstream config_out(dir / "config.txt", std::ios::binary);
  config_out << snap.config_text;
  if (!config_out) throw std::runtime_error("cannot write '" + (dir / "config.txt").string() + "'");
  out << std::setprecision(10) << "trained " << to_string(cfg.model) << " K=" << cfg.K
      << " laps=" << cfg.laps << " final_elbo=" << final_elbo << " output=" << cfg.output << '\n';
  return 0;
}

int cmd_init(const TrainConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw ConfigError("output", "output: required (snapshot path)");
  Snapshot snap;
  const std::string format = resolve_format(cfg.data_format, cfg.data, cfg.model);
  if (cfg.model == ModelKind::gmm) {
    const DenseDataset data = load_dense_any(cfg.data, format);
    snap.state = init_gaussian_mixture(data, cfg.K, cfg.resolved_alpha(),
                                       make_prior(data, cfg.nu_bar), cfg.seed);
  } else {
    const Corpus corpus = load_uci_bow(cfg.data);
    snap.state = init_lda(corpus, cfg.K, cfg.resolved_alpha(), cfg.lambda_bar, cfg.seed);
  }
  snap.config_text = cfg.to_text();
  save_snapshot(cfg.output, snap);
  out << "initialized " << to_string(cfg.model) << " K=" << cfg.K << " snapshot=" << cfg.output
      << '\n';
  return 0;
}

struct EvalArgs {
  std::string snapshot;
  std::string heldout;
  std::string format = "auto";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  const Snapshot snap = load_snapshot(args.snapshot);
  ParallelOptions par;
  par.threads = args.threads;
  if (snap.is_gmm()) {
    const auto& g = std::get<GaussianMixture>(snap.state);
    const std::string format = resolve_format(args.format, args.heldout, ModelKind::gmm);
    if (format == "uci") throw UsageError("snapshot holds a gmm model but --format is uci");
    const DenseDataset data = load_dense_any(args.heldout, format);
    if (data.dim() != g.prior.dim()) {
      throw UsageError("heldout dimension " + std::to_string(data.dim()) +
                       " differs from the snapshot's " + std::to_string(g.prior.dim()));
    }
    out << report_json(mixture_heldout(data, g, par)) << '\n';
    return 0;
  }
  const auto& g = std::get<LdaGlobalState>(snap.state);
  if (args.format != "auto" && args.format != "uci") {
    throw UsageError("snapshot holds an lda model but --format is " + args.format);
  }
  const Corpus corpus = load_uci_bow(args.heldout);
  check_vocab(corpus, g.V(), "heldout");
  CompletionOptions copts;
  copts.parallel = par;
  if (args.seed) {
    copts.seed = *args.seed;
  } else if (!snap.config_text.empty()) {
    copts.seed = TrainConfig::parse(snap.config_text).seed;
  }
  out << report_json(doc_completion_score(corpus, g, copts)) << '\n';
  return 0;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag, bool allow_dense) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (allow_dense && item == "dense") {
      out.push_back(kDense);
      continue;
    }
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse variational inference for mixtures and topic models"};
  app.require_subcommand(1);

  std::map<std::string, std::string> train_values, init_values;
  std::string train_config, init_config;
  auto* train = app.add_subcommand("train", "Fit a model and write metrics, snapshot and config");
  train->add_option("--config", train_config, "Config file of key = value lines");
  add_config_flags(train, train_values);

  auto* init = app.add_subcommand("init", "Write a k-means++ seeded snapshot");
  init->add_option("--config", init_config, "Config file of key = value lines");
  add_config_flags(init, init_values);

  EvalArgs eval_args;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Score heldout data under a snapshot");
  eval->add_option("--snapshot", eval_args.snapshot, "Snapshot file")->required();
  eval->add_option("--heldout", eval_args.heldout, "Heldout data file")->required();
  eval->add_option("--format", eval_args.format, "auto, csv, raw64, pgm or uci");
  auto* seed_opt = eval->add_option("--seed", eval_seed, "Completion split seed");
  eval->add_option("--threads", eval_args.threads, "Worker threads");

  BenchSpec bench_spec;
  std::string bench_K = "50", bench_L = "dense,1,4";
  auto* bench_cmd = app.add_subcommand("bench", "Time substeps over a (K, L) grid");
  bench_cmd->add_option("--model", bench_spec.model, "gmm or lda");
  bench_cmd->add_option("--K", bench_K, "Comma-separated K values");
  bench_cmd->add_option("--L", bench_L, "Comma-separated L values, 'dense' allowed");
  bench_cmd->add_option("--n", bench_spec.n, "Observations or documents");
  bench_cmd->add_option("--dim", bench_spec.dim, "D for gmm, V for lda");
  bench_cmd->add_option("--tokens", bench_spec.tokens_per_doc, "Tokens per document (lda)");
  bench_cmd->add_option("--reps", bench_spec.reps, "Timing repetitions (median reported)");
  bench_cmd->add_option("--seed", bench_spec.seed, "Synthetic data seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(resolve_config(train, train_config, train_values), out);
    if (*init) return cmd_init(resolve_config(init, init_config, init_values), out);
    if (*eval) {
      if (seed_opt->count() > 0) eval_args.seed = eval_seed;
      return cmd_eval(eval_args, out);
    }
    if (*bench_cmd) {
      bench_spec.Ks = parse_int_list(bench_K, "--K", false);
      bench_spec.Ls = parse_int_list(bench_L, "--L", true);
      const auto rows = bench(bench_spec);
      out << format_bench(rows);
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: --" << e.what() << '\n';
    return 2;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sparsevi::cli
