#include "garner_cli/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "garner/evaluate.hpp"
#include "garner/matrix_io.hpp"
#include "garner/synthetic.hpp"
#include "garner/views.hpp"

namespace garner::cli {

namespace {

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "data",          "out",
      "k",             "d",
      "alpha",         "p",
      "f",             "depth",
      "lr",            "iters",
      "batch",         "patience",
      "seed",          "diffusion_terms",
      "diffusion_topk", "use_config_view",
      "use_spectral_negative", "l2_spectral_negative",
      "certify_every", "checkpoint_every",
      "log_every"};
  return keys;
}

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& dst) {
  if (!doc.contains(key)) return;
  try {
    dst = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // The parser message carries the line and column of the failure.
    throw IoError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw IoError(path.string() + ": config root must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    if (known_config_keys().count(item.key()) == 0) {
      throw InvalidArgument("unknown config key: " + item.key());
    }
  }

  RunConfig cfg;
  std::string data_str, out_str;
  read_key(doc, "data", data_str);
  read_key(doc, "out", out_str);
  cfg.data = data_str;
  cfg.out = out_str;
  read_key(doc, "k", cfg.train.k);
  read_key(doc, "d", cfg.train.d);
  read_key(doc, "alpha", cfg.train.alpha);
  read_key(doc, "p", cfg.train.p);
  read_key(doc, "f", cfg.train.f);
  read_key(doc, "depth", cfg.train.depth);
  read_key(doc, "lr", cfg.train.lr);
  read_key(doc, "iters", cfg.train.iters);
  read_key(doc, "batch", cfg.train.batch);
  read_key(doc, "patience", cfg.train.patience);
  read_key(doc, "seed", cfg.train.seed);
  read_key(doc, "diffusion_terms", cfg.train.diffusion_terms);
  read_key(doc, "diffusion_topk", cfg.train.diffusion_topk);
  read_key(doc, "use_config_view", cfg.train.use_config_view);
  read_key(doc, "use_spectral_negative", cfg.train.use_spectral_negative);
  read_key(doc, "l2_spectral_negative", cfg.train.l2_spectral_negative);
  read_key(doc, "certify_every", cfg.train.certify_every);
  read_key(doc, "checkpoint_every", cfg.train.checkpoint_every);
  read_key(doc, "log_every", cfg.train.log_every);
  return cfg;
}

Task parse_task(const std::string& name) {
  if (name == "function") return Task::kFunction;
  if (name == "traffic") return Task::kTraffic;
  if (name == "retrieval") return Task::kRetrieval;
  throw InvalidArgument("unknown task '" + name +
                        "'; expected function, traffic, or retrieval");
}

namespace {

const char* task_name(Task task) {
  switch (task) {
    case Task::kFunction: return "function";
    case Task::kTraffic: return "traffic";
    case Task::kRetrieval: return "retrieval";
  }
  return "?";
}

struct SynthArgs {
  Index n = 0;
  Index clusters = 0;
  std::uint64_t seed = 0;
  std::string out;
  SyntheticOptions opts;
};

int cmd_synth(const SynthArgs& a) {
  const SyntheticData data = generate_synthetic(a.n, a.clusters, a.seed, a.opts);
  std::filesystem::create_directories(a.out);
  save_dataset(a.out, data.dataset);
  save_labels(a.out, data.function);
  save_labels(a.out, data.traffic);
  save_labels(a.out, data.retrieval);
  std::fprintf(stderr,
               "synthetic dataset: %lld nodes, %lld clusters, %lld queries "
               "-> %s\n",
               static_cast<long long>(a.n), static_cast<long long>(a.clusters),
               static_cast<long long>(data.retrieval.queries.rows()),
               a.out.c_str());
  return 0;
}

struct AugmentArgs {
  std::string data;
  std::string view;
  std::string out;
  Index k = 6;
  Real alpha = 0.2;
  int terms = 64;
  Index topk = 64;
  Index d = 22;
  std::uint64_t seed = 0;
};

int cmd_augment(const AugmentArgs& a) {
  const RoadDataset ds = load_dataset(a.data);
  const Index n = ds.n();
  SparseGraph g;
  if (a.view == "knn") {
    DenseMatrix c = ds.C;
    fill_missing_configs(c, ds.has_config);
    g = knn_similarity_graph(c, std::min(a.k, n - 1));
  } else if (a.view == "diffusion") {
    g = ppr_diffusion(ds.graph, a.alpha, a.terms, a.topk);
  } else if (a.view == "negative") {
    g = regular_negative_graph(n, clamp_regular_degree(a.d, n), a.seed);
  } else {
    throw InvalidArgument("unknown view '" + a.view +
                          "'; expected knn, diffusion, or negative");
  }

  std::ofstream out(a.out);
  if (!out) throw IoError("cannot open " + a.out + " for writing");
  out << "src,dst,weight\n";
  char buf[96];
  for (Index i = 0; i < n; ++i) {
    const auto cols = g.neighbors(i);
    const auto vals = g.edge_weights(i);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      if (cols[t] < i) continue;  // one row per undirected edge
      std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g\n",
                    static_cast<long long>(i),
                    static_cast<long long>(cols[t]), vals[t]);
      out << buf;
    }
  }
  if (!out) throw IoError("failed writing " + a.out);
  std::fprintf(stderr, "%s view: %lld nodes, %lld undirected edges -> %s\n",
               a.view.c_str(), static_cast<long long>(n),
               static_cast<long long>(g.num_entries() / 2), a.out.c_str());
  return 0;
}

void require_path(const std::filesystem::path& p, const char* key) {
  if (p.empty()) {
    throw InvalidArgument(std::string("missing required key '") + key +
                          "' (set it in the config or pass --" + key + ")");
  }
}

int cmd_train(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  require_path(cfg.data, "data");
  require_path(cfg.out, "out");
  const RoadDataset ds = load_dataset(cfg.data);
  std::filesystem::create_directories(cfg.out);
  if (cfg.train.checkpoint_path.empty()) {
    cfg.train.checkpoint_path = cfg.out / "checkpoint.grnp";
  }

  const TrainResult result = train(ds, cfg.train);
  save_checkpoint(cfg.train.checkpoint_path, result.params);
  save_training_log(cfg.out / "training_log.csv", result.log);
  if (result.best_iter >= 0) {
    std::fprintf(stderr,
                 "trained %d iterations; best loss %.6f at iteration %d\n",
                 result.iterations_run, result.best_loss, result.best_iter);
  } else {
    std::fprintf(stderr, "no training iterations requested; wrote the "
                         "initial parameters\n");
  }
  return 0;
}

struct EmbedArgs {
  RunConfig cfg;
  std::string checkpoint;
  std::string out;
};

int cmd_embed(const EmbedArgs& a) {
  require_path(a.cfg.data, "data");
  const RoadDataset ds = load_dataset(a.cfg.data);
  const ModelParams params = load_checkpoint(a.checkpoint);
  const EmbeddingMatrix z = embed(ds, params, a.cfg.train);
  save_matrix(a.out, z);
  std::fprintf(stderr, "embeddings: %lld x %lld -> %s\n",
               static_cast<long long>(z.rows()),
               static_cast<long long>(z.cols()), a.out.c_str());
  return 0;
}

struct EvalArgs {
  std::string task;
  std::string embedding;
  std::string data;
  std::string checkpoint;
  std::string out;
  std::uint64_t seed = 0;
  int seeds = 1;
};

int cmd_eval(const EvalArgs& a) {
  const Task task = parse_task(a.task);
  const EmbeddingMatrix z = load_matrix(a.embedding);
  const LabelSet labels = load_labels(a.data, task);

  std::optional<ModelParams> params;
  if (!a.checkpoint.empty()) params = load_checkpoint(a.checkpoint);
  if (task == Task::kRetrieval && !params.has_value()) {
    throw InvalidArgument("retrieval scoring needs --checkpoint for the "
                          "trained query projection");
  }

  const AggregateReport agg = evaluate_repeated(
      z, labels, params.has_value() ? &*params : nullptr, a.seed, a.seeds);

  nlohmann::json j;
  j["task"] = task_name(task);
  j["runs"] = agg.runs;
  j["base_seed"] = a.seed;
  j["metrics"] = nlohmann::json::object();
  for (const auto& [name, stats] : agg.metrics) {
    j["metrics"][name] = {{"mean", stats.mean}, {"stddev", stats.stddev}};
  }
  const std::string text = j.dump(2);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw IoError("cannot open " + a.out + " for writing");
    out << text << "\n";
    if (!out) throw IoError("failed writing " + a.out);
  }

  std::fprintf(stderr, "%-14s %12s %12s   (%d run%s)\n", "metric", "mean",
               "stddev", agg.runs, agg.runs == 1 ? "" : "s");
  for (const auto& [name, stats] : agg.metrics) {
    std::fprintf(stderr, "%-14s %12.6f %12.6f\n", name.c_str(), stats.mean,
                 stats.stddev);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"road-network representation learning pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--n", synth.n, "number of roads")->required();
  synth_cmd->add_option("--clusters", synth.clusters, "planted cluster count")
      ->required();
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--noise", synth.opts.noise_scale,
                        "config noise as a fraction of centroid spacing");
  synth_cmd->add_option("--query-noise", synth.opts.query_noise,
                        "query noise, same units");
  synth_cmd->add_option("--speed-noise", synth.opts.speed_noise,
                        "additive traffic noise");
  synth_cmd->add_option("--config-dim", synth.opts.config_dim,
                        "configuration vector width");
  synth_cmd->add_option("--feature-dim", synth.opts.feature_dim,
                        "basic feature width");
  synth_cmd->add_option("--spatial-k", synth.opts.k_spatial,
                        "spatial kNN degree of the planted topology");
  synth_cmd->add_option("--queries", synth.opts.num_queries,
                        "retrieval query count (0: n/10)");

  AugmentArgs aug;
  CLI::App* aug_cmd = app.add_subcommand(
      "augment", "emit one graph view as edges.csv for inspection");
  aug_cmd->add_option("--data", aug.data, "dataset directory")->required();
  aug_cmd->add_option("--view", aug.view, "knn, diffusion, or negative")
      ->required();
  aug_cmd->add_option("--out", aug.out, "output CSV path")->required();
  aug_cmd->add_option("--k", aug.k, "kNN degree");
  aug_cmd->add_option("--alpha", aug.alpha, "diffusion teleport probability");
  aug_cmd->add_option("--terms", aug.terms, "diffusion series terms");
  aug_cmd->add_option("--topk", aug.topk, "diffusion row budget");
  aug_cmd->add_option("--d", aug.d, "negative-graph degree");
  aug_cmd->add_option("--seed", aug.seed, "negative-graph seed");

  std::string train_config;
  RunConfig train_over;  // flag values; applied only when the flag was given
  CLI::App* train_cmd =
      app.add_subcommand("train", "train and write checkpoint plus loss log");
  train_cmd->add_option("--config", train_config, "JSON run configuration")
      ->required();
  std::string train_data, train_out;
  train_cmd->add_option("--data", train_data, "dataset directory");
  train_cmd->add_option("--out", train_out, "output directory");
  train_cmd->add_option("--seed", train_over.train.seed, "run seed");
  train_cmd->add_option("--iters", train_over.train.iters, "max iterations");
  train_cmd->add_option("--batch", train_over.train.batch, "nodes per step");
  train_cmd->add_option("--lr", train_over.train.lr, "learning rate");
  train_cmd->add_option("--k", train_over.train.k, "kNN view degree");
  train_cmd->add_option("--d", train_over.train.d, "negative-graph degree");
  train_cmd->add_option("--alpha", train_over.train.alpha,
                        "diffusion teleport probability");
  train_cmd->add_option("--p", train_over.train.p, "projection width");
  train_cmd->add_option("--f", train_over.train.f, "embedding width");
  train_cmd->add_option("--depth", train_over.train.depth,
                        "propagation depth");
  train_cmd->add_option("--patience", train_over.train.patience,
                        "early-stop window");
  train_cmd->add_option("--log-every", train_over.train.log_every,
                        "stderr progress cadence (0: silent)");
  bool no_config_view = false, no_spectral = false, l2_spectral = false;
  train_cmd->add_flag("--no-config-view", no_config_view,
                      "drop the configuration view and inputs");
  train_cmd->add_flag("--no-spectral-negative", no_spectral,
                      "use feature shuffling for every negative");
  train_cmd->add_flag("--l2-spectral-negative", l2_spectral,
                      "spectral negative for the diffusion loss too");

  EmbedArgs emb;
  std::string embed_config, embed_data;
  CLI::App* embed_cmd =
      app.add_subcommand("embed", "write fused embeddings for a checkpoint");
  embed_cmd->add_option("--config", embed_config, "JSON run configuration")
      ->required();
  embed_cmd->add_option("--checkpoint", emb.checkpoint, "trained checkpoint")
      ->required();
  embed_cmd->add_option("--out", emb.out, "output matrix path (.grnm or .csv)")
      ->required();
  embed_cmd->add_option("--data", embed_data, "dataset directory");
  bool embed_no_config_view = false;
  embed_cmd->add_flag("--no-config-view", embed_no_config_view,
                      "fuse only the topology and diffusion views");

  EvalArgs ev;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "probe frozen embeddings on one task");
  eval_cmd->add_option("--task", ev.task, "function, traffic, or retrieval")
      ->required();
  eval_cmd->add_option("--embedding", ev.embedding, "embedding matrix path")
      ->required();
  eval_cmd->add_option("--data", ev.data, "dataset directory")->required();
  eval_cmd->add_option("--checkpoint", ev.checkpoint,
                       "trained checkpoint (required for retrieval)");
  eval_cmd->add_option("--seed", ev.seed, "base split seed");
  eval_cmd->add_option("--seeds", ev.seeds, "number of split seeds");
  eval_cmd->add_option("--out", ev.out, "also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (aug_cmd->parsed()) return cmd_augment(aug);
    if (train_cmd->parsed()) {
      RunConfig cfg = load_run_config(train_config);
      if (!train_data.empty()) cfg.data = train_data;
      if (!train_out.empty()) cfg.out = train_out;
      if (train_cmd->count("--seed")) cfg.train.seed = train_over.train.seed;
      if (train_cmd->count("--iters")) cfg.train.iters = train_over.train.iters;
      if (train_cmd->count("--batch")) cfg.train.batch = train_over.train.batch;
      if (train_cmd->count("--lr")) cfg.train.lr = train_over.train.lr;
      if (train_cmd->count("--k")) cfg.train.k = train_over.train.k;
      if (train_cmd->count("--d")) cfg.train.d = train_over.train.d;
      if (train_cmd->count("--alpha")) cfg.train.alpha = train_over.train.alpha;
      if (train_cmd->count("--p")) cfg.train.p = train_over.train.p;
      if (train_cmd->count("--f")) cfg.train.f = train_over.train.f;
      if (train_cmd->count("--depth")) cfg.train.depth = train_over.train.depth;
      if (train_cmd->count("--patience")) {
        cfg.train.patience = train_over.train.patience;
      }
      if (train_cmd->count("--log-every")) {
        cfg.train.log_every = train_over.train.log_every;
      }
      if (no_config_view) cfg.train.use_config_view = false;
      if (no_spectral) cfg.train.use_spectral_negative = false;
      if (l2_spectral) cfg.train.l2_spectral_negative = true;
      return cmd_train(cfg);
    }
    if (embed_cmd->parsed()) {
      emb.cfg = load_run_config(embed_config);
      if (!embed_data.empty()) emb.cfg.data = embed_data;
      if (embed_no_config_view) emb.cfg.train.use_config_view = false;
      return cmd_embed(emb);
    }
    if (eval_cmd->parsed()) return cmd_eval(ev);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "error: no subcommand given\n");
  return 1;
}

}  // namespace garner::cli
