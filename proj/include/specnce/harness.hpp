#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "specnce/datasets.hpp"
#include "specnce/io.hpp"
#include "specnce/verify.hpp"

namespace specnce::harness {

using nlohmann::json;

// ---- JSON codecs ------------------------------------------------------------

inline void expect_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& context) {
  require(j.is_object(), ErrorCode::ConfigError, context + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(allowed.count(it.key()) > 0, ErrorCode::ConfigError,
            "unknown key '" + it.key() + "' in " + context);
}

inline double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), ErrorCode::ConfigError, key + " must be a number");
  return j.at(key).get<double>();
}

inline kernels::KernelSpec kernel_from_json(const json& j) {
  expect_keys(j, {"kind", "params"}, "kernel");
  require(j.contains("kind") && j.at("kind").is_string(), ErrorCode::ConfigError,
          "kernel.kind must be a string");
  std::string kind = j.at("kind").get<std::string>();
  json params = j.value("params", json::object());
  kernels::KernelSpec spec;
  if (kind == "gaussian") {
    expect_keys(params, {"tau"}, "kernel.params");
    spec = kernels::Gaussian{get_number(params, "tau", 1.0)};
  } else if (kind == "exponential") {
    expect_keys(params, {"gamma", "sigma"}, "kernel.params");
    spec = kernels::Exponential{get_number(params, "gamma", 1.0),
                                get_number(params, "sigma", 1.0)};
  } else if (kind == "simple_sum") {
    expect_keys(params, {"tau1", "tau2"}, "kernel.params");
    spec = kernels::SimpleSum{get_number(params, "tau1", 1.0),
                              get_number(params, "tau2", 1.0)};
  } else if (kind == "concat_sum") {
    expect_keys(params, {"tau1", "tau2"}, "kernel.params");
    spec = kernels::ConcatSum{get_number(params, "tau1", 1.0),
                              get_number(params, "tau2", 1.0)};
  } else {
    fail(ErrorCode::ConfigError, "unknown kernel kind '" + kind + "'");
  }
  kernels::validate(spec);
  return spec;
}

inline json kernel_to_json(const kernels::KernelSpec& spec) {
  json j;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, kernels::Gaussian>) {
          j = {{"kind", "gaussian"}, {"params", {{"tau", k.tau}}}};
        } else if constexpr (std::is_same_v<T, kernels::Exponential>) {
          j = {{"kind", "exponential"},
               {"params", {{"gamma", k.gamma}, {"sigma", k.sigma}}}};
        } else if constexpr (std::is_same_v<T, kernels::SimpleSum>) {
          j = {{"kind", "simple_sum"},
               {"params", {{"tau1", k.tau1}, {"tau2", k.tau2}}}};
        } else {
          j = {{"kind", "concat_sum"},
               {"params", {{"tau1", k.tau1}, {"tau2", k.tau2}}}};
        }
      },
      spec);
  return j;
}

inline losses::LossConfig loss_from_json(const json& j) {
  expect_keys(j, {"variant", "tau", "gamma", "lambda", "tau1", "tau2", "kernel"},
              "loss");
  require(j.contains("variant") && j.at("variant").is_string(), ErrorCode::ConfigError,
          "loss.variant must be a string");
  std::string variant = j.at("variant").get<std::string>();
  losses::LossConfig cfg;
  if (variant == "info_nce") {
    cfg = losses::LossConfig::info_nce(get_number(j, "tau", 0.5));
  } else if (variant == "kernel_info_nce") {
    require(j.contains("kernel"), ErrorCode::ConfigError,
            "kernel_info_nce needs a kernel");
    cfg = losses::LossConfig::kernel_info_nce(kernel_from_json(j.at("kernel")));
  } else if (variant == "laplacian") {
    cfg = losses::LossConfig::laplacian(get_number(j, "tau", 0.5));
  } else if (variant == "sum") {
    cfg = losses::LossConfig::sum(get_number(j, "lambda", 0.5),
                                  get_number(j, "tau1", 0.5),
                                  get_number(j, "tau2", 0.5));
  } else if (variant == "concat_sum") {
    cfg = losses::LossConfig::concat_sum(get_number(j, "lambda", 0.5),
                                         get_number(j, "tau1", 0.5),
                                         get_number(j, "tau2", 0.5));
  } else if (variant == "gamma") {
    cfg = losses::LossConfig::gamma_loss(get_number(j, "gamma", 0.5),
                                         get_number(j, "tau", 0.5));
  } else {
    fail(ErrorCode::ConfigError, "unknown loss variant '" + variant + "'");
  }
  losses::validate(cfg);
  return cfg;
}

// ---- experiment configuration ------------------------------------------------

struct GraphSource {
  enum class Kind { Sbm, File, Augmentation, Blobs };

  Kind kind = Kind::Sbm;
  // sbm
  std::vector<int> blocks = {20, 20, 20};
  double p_in = 0.9;
  double p_out = 0.02;
  double jitter = 0.0;
  // file
  std::string path;
  bool require_symmetric = false;
  // augmentation (points from file) and blobs (points synthesized)
  std::string points_path;
  double bandwidth = 1.2;
  int n_blobs = 5;
  int per_blob = 40;
  double separation = 10.0;
  double stddev = 0.8;
};

struct ClipConfig {
  int concepts = 2;
  int images_per_concept = 5;
  int texts_per_concept = 5;
  double tau = 0.5;
};

struct MaxentConfig {
  Eigen::VectorXd psi = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  double tau = 1.0;
  int iters = 20000;
};

struct GenConfig {
  std::string type = "sbm";  // sbm | blobs | pairs
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int jobs = 1;
  GraphSource graph;
  kernels::KernelSpec kernel = kernels::Gaussian{0.5};
  losses::LossConfig loss = losses::LossConfig::info_nce(0.5);
  int embedding_dim = 2;
  int clusters = 3;
  optimize::OptimizerOptions optimizer;
  MaxentConfig maxent;
  ClipConfig clip;
  GenConfig gen;
  double verify_tolerance_scale = 1.0;
  std::vector<std::string> verify_only;
};

inline GraphSource graph_source_from_json(const json& j) {
  expect_keys(j,
              {"source", "blocks", "p_in", "p_out", "jitter", "path",
               "require_symmetric", "points_path", "bandwidth", "blobs", "per_blob",
               "separation", "stddev"},
              "graph");
  GraphSource g;
  std::string source = j.value("source", std::string("sbm"));
  if (source == "sbm") {
    g.kind = GraphSource::Kind::Sbm;
  } else if (source == "file") {
    g.kind = GraphSource::Kind::File;
    require(j.contains("path"), ErrorCode::ConfigError, "graph.path is required");
  } else if (source == "augmentation") {
    g.kind = GraphSource::Kind::Augmentation;
    require(j.contains("points_path"), ErrorCode::ConfigError,
            "graph.points_path is required");
  } else if (source == "blobs") {
    g.kind = GraphSource::Kind::Blobs;
  } else {
    fail(ErrorCode::ConfigError, "unknown graph source '" + source + "'");
  }
  if (j.contains("blocks")) {
    require(j.at("blocks").is_array(), ErrorCode::ConfigError,
            "graph.blocks must be an array");
    g.blocks.clear();
    for (const auto& b : j.at("blocks")) g.blocks.push_back(b.get<int>());
  }
  g.p_in = get_number(j, "p_in", g.p_in);
  g.p_out = get_number(j, "p_out", g.p_out);
  g.jitter = get_number(j, "jitter", g.jitter);
  g.path = j.value("path", g.path);
  g.require_symmetric = j.value("require_symmetric", g.require_symmetric);
  g.points_path = j.value("points_path", g.points_path);
  g.bandwidth = get_number(j, "bandwidth", g.bandwidth);
  g.n_blobs = static_cast<int>(get_number(j, "blobs", g.n_blobs));
  g.per_blob = static_cast<int>(get_number(j, "per_blob", g.per_blob));
  g.separation = get_number(j, "separation", g.separation);
  g.stddev = get_number(j, "stddev", g.stddev);
  return g;
}

inline ExperimentConfig config_from_json(const json& j) {
  expect_keys(j,
              {"seed", "out", "jobs", "graph", "kernel", "loss", "embedding_dim",
               "clusters", "optimizer", "maxent", "clip", "gen", "verify"},
              "config");
  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.jobs = static_cast<int>(get_number(j, "jobs", cfg.jobs));
  if (j.contains("graph")) cfg.graph = graph_source_from_json(j.at("graph"));
  if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("loss")) cfg.loss = loss_from_json(j.at("loss"));
  cfg.embedding_dim = static_cast<int>(get_number(j, "embedding_dim", cfg.embedding_dim));
  cfg.clusters = static_cast<int>(get_number(j, "clusters", cfg.clusters));
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    expect_keys(o, {"step_size", "max_iters", "grad_tol", "schedule"}, "optimizer");
    cfg.optimizer.step_size = get_number(o, "step_size", cfg.optimizer.step_size);
    cfg.optimizer.max_iters =
        static_cast<int>(get_number(o, "max_iters", cfg.optimizer.max_iters));
    cfg.optimizer.grad_tol = get_number(o, "grad_tol", cfg.optimizer.grad_tol);
    std::string schedule = o.value("schedule", std::string("constant"));
    if (schedule == "constant") {
      cfg.optimizer.schedule = optimize::OptimizerOptions::Schedule::Constant;
    } else if (schedule == "cosine") {
      cfg.optimizer.schedule = optimize::OptimizerOptions::Schedule::Cosine;
    } else {
      fail(ErrorCode::ConfigError, "unknown schedule '" + schedule + "'");
    }
  }
  if (j.contains("maxent")) {
    const json& m = j.at("maxent");
    expect_keys(m, {"psi", "tau", "iters"}, "maxent");
    if (m.contains("psi")) {
      require(m.at("psi").is_array() && !m.at("psi").empty(), ErrorCode::ConfigError,
              "maxent.psi must be a nonempty array");
      cfg.maxent.psi.resize(m.at("psi").size());
      for (std::size_t i = 0; i < m.at("psi").size(); ++i)
        cfg.maxent.psi(static_cast<Eigen::Index>(i)) = m.at("psi")[i].get<double>();
    }
    cfg.maxent.tau = get_number(m, "tau", cfg.maxent.tau);
    cfg.maxent.iters = static_cast<int>(get_number(m, "iters", cfg.maxent.iters));
  }
  if (j.contains("clip")) {
    const json& c = j.at("clip");
    expect_keys(c, {"concepts", "images_per_concept", "texts_per_concept", "tau"},
                "clip");
    cfg.clip.concepts = static_cast<int>(get_number(c, "concepts", cfg.clip.concepts));
    cfg.clip.images_per_concept = static_cast<int>(
        get_number(c, "images_per_concept", cfg.clip.images_per_concept));
    cfg.clip.texts_per_concept = static_cast<int>(
        get_number(c, "texts_per_concept", cfg.clip.texts_per_concept));
    cfg.clip.tau = get_number(c, "tau", cfg.clip.tau);
  }
  if (j.contains("gen")) {
    const json& g = j.at("gen");
    expect_keys(g, {"type"}, "gen");
    cfg.gen.type = g.value("type", cfg.gen.type);
    require(cfg.gen.type == "sbm" || cfg.gen.type == "blobs" || cfg.gen.type == "pairs",
            ErrorCode::ConfigError, "gen.type must be sbm, blobs or pairs");
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    expect_keys(v, {"tolerance_scale", "only"}, "verify");
    cfg.verify_tolerance_scale =
        get_number(v, "tolerance_scale", cfg.verify_tolerance_scale);
    require(cfg.verify_tolerance_scale > 0.0, ErrorCode::ConfigError,
            "verify.tolerance_scale must be positive");
    if (v.contains("only")) {
      require(v.at("only").is_array(), ErrorCode::ConfigError,
              "verify.only must be an array");
      for (const auto& o : v.at("only"))
        cfg.verify_only.push_back(o.get<std::string>());
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::optional<std::string>& path) {
  if (!path) return ExperimentConfig{};
  json j;
  try {
    j = json::parse(io::read_text(*path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("cannot parse config: ") + e.what());
  }
  return config_from_json(j);
}

/// Materializes the configured graph source; returns planted labels when
/// the source carries any.
struct ResolvedGraph {
  graph::SimilarityGraph graph;
  std::vector<int> labels;  // empty if the source has no ground truth
  Eigen::MatrixXd points;   // populated for point-cloud sources
};

inline ResolvedGraph resolve_graph(const ExperimentConfig& cfg) {
  ResolvedGraph out;
  switch (cfg.graph.kind) {
    case GraphSource::Kind::Sbm:
      out.graph = graph::sbm_generate(cfg.graph.blocks, cfg.graph.p_in, cfg.graph.p_out,
                                      cfg.seed, cfg.graph.jitter);
      out.labels = graph::sbm_labels(cfg.graph.blocks);
      break;
    case GraphSource::Kind::File:
      out.graph = io::load_graph(cfg.graph.path, cfg.graph.require_symmetric);
      break;
    case GraphSource::Kind::Augmentation:
      out.points = io::read_matrix_csv(cfg.graph.points_path);
      out.graph = graph::augmentation_graph(out.points, cfg.graph.bandwidth);
      break;
    case GraphSource::Kind::Blobs: {
      Rng rng(cfg.seed, "blobs");
      datasets::Blobs blobs = datasets::make_blobs(
          cfg.graph.n_blobs, cfg.graph.per_blob, cfg.graph.separation,
          cfg.graph.stddev, rng);
      out.points = blobs.points;
      out.labels = blobs.labels;
      out.graph = graph::augmentation_graph(blobs.points, cfg.graph.bandwidth);
      break;
    }
  }
  return out;
}

// ---- reports ------------------------------------------------------------------

struct Report {
  std::vector<CheckRecord> checks;
  bool pass = true;

  void add(CheckRecord r) {
    pass = pass && r.pass;
    checks.push_back(std::move(r));
  }

  json to_json() const {
    json arr = json::array();
    for (const CheckRecord& r : checks)
      arr.push_back({{"name", r.name},
                     {"anchor", r.anchor},
                     {"value", r.value},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass}});
    return {{"checks", arr}, {"pass", pass}};
  }

  std::string table() const {
    std::string out;
    std::size_t width = 4;
    for (const CheckRecord& r : checks) width = std::max(width, r.name.size());
    for (const CheckRecord& r : checks) {
      char line[256];
      std::snprintf(line, sizeof(line), "%s  %-*s  value=%-13.6g tolerance=%-13.6g\n",
                    r.pass ? "PASS" : "FAIL", static_cast<int>(width), r.name.c_str(),
                    r.value, r.tolerance);
      out += line;
    }
    out += pass ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n";
    return out;
  }
};

// ---- commands -------------------------------------------------------------------

inline std::filesystem::path ensure_out_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Runs the full verification suite, writes verify_report.json plus a
/// human-readable table, and returns the aggregate as a process exit code.
inline int cmd_verify(const ExperimentConfig& cfg, std::string* table_out = nullptr) {
  VerifyOptions options;
  options.seed = cfg.seed;
  options.tolerance_scale = cfg.verify_tolerance_scale;
  options.only = cfg.verify_only;
  options.jobs = cfg.jobs;
  VerifyOutcome outcome = run_verify(options);

  Report report;
  for (CheckRecord& r : outcome.records) report.add(std::move(r));
  std::filesystem::path dir = ensure_out_dir(cfg);
  io::write_text(dir / "verify_report.json", report.to_json().dump(2) + "\n");
  std::string table = report.table();
  io::write_text(dir / "verify_report.txt", table);
  if (table_out) *table_out = table;
  return report.pass ? 0 : 1;
}

/// Trains an embedding on the configured graph and writes the artifacts:
/// embedding.csv, trace.csv, labels.csv and (for 2-D embeddings) a scatter
/// plot colored by k-means labels.
inline void cmd_train(const ExperimentConfig& cfg) {
  ResolvedGraph resolved = resolve_graph(cfg);
  optimize::OptimizerOptions opts = cfg.optimizer;
  opts.seed = Rng::derive(cfg.seed, "train");
  optimize::MinimizeResult res =
      optimize::minimize(resolved.graph, cfg.loss, cfg.embedding_dim, opts);

  std::filesystem::path dir = ensure_out_dir(cfg);
  io::write_matrix_csv(dir / "embedding.csv", res.embedding.rows);
  io::write_trace_csv(dir / "trace.csv", res.trace);
  int k = std::min(cfg.clusters, res.embedding.n());
  spectral::KMeansResult km =
      spectral::kmeans(res.embedding.rows, k, Rng::derive(cfg.seed, "train-kmeans"), 8);
  io::write_labels_csv(dir / "labels.csv", km.labels);
  if (cfg.embedding_dim == 2)
    io::write_scatter_svg(dir / "scatter.svg", res.embedding.rows, km.labels);
}

/// Eigendecomposes the Laplacian of the configured graph; writes the full
/// eigenvalue list, the spectral embedding and its k-means labels.
inline void cmd_spectral(const ExperimentConfig& cfg) {
  ResolvedGraph resolved = resolve_graph(cfg);
  graph::LaplacianMatrix l = graph::laplacian(resolved.graph);
  spectral::EigResult eig = spectral::eig_sym(l);
  spectral::SpectralEmbedding se = spectral::spectral_embedding(l, cfg.embedding_dim);
  std::filesystem::path dir = ensure_out_dir(cfg);
  io::write_vector_csv(dir / "eigenvalues.csv", eig.values);
  io::write_matrix_csv(dir / "embedding.csv", se.vectors);
  int k = std::min(cfg.clusters, static_cast<int>(se.vectors.rows()));
  spectral::KMeansResult km =
      spectral::kmeans(se.vectors, k, Rng::derive(cfg.seed, "spectral-kmeans"), 8);
  io::write_labels_csv(dir / "labels.csv", km.labels);
}

/// Solves the entropy-regularized program for the configured psi and tau;
/// reports the closed-form/numeric gap and the duality identity.
inline int cmd_maxent(const ExperimentConfig& cfg, std::string* table_out = nullptr) {
  const Eigen::VectorXd& psi = cfg.maxent.psi;
  double tau = cfg.maxent.tau;
  Eigen::VectorXd closed = maxent::solve_p2_closed(psi, tau);
  Eigen::VectorXd numeric = maxent::solve_p2_numeric(psi, tau, cfg.maxent.iters,
                                                     Rng::derive(cfg.seed, "maxent"));
  double gap = (closed - numeric).cwiseAbs().maxCoeff();
  double duality = std::abs(maxent::dual_value(psi, tau) +
                            maxent::energy(closed, psi, tau));
  Report report;
  report.add({"alpha_1", "maxent/alpha-1", closed(0), 1e-6, gap <= 1e-6});
  report.add({"closed_matches_numeric", "maxent/closed-vs-numeric", gap, 1e-6,
              gap <= 1e-6});
  report.add({"duality_identity", "maxent/duality", duality, 1e-9, duality <= 1e-9});
  std::filesystem::path dir = ensure_out_dir(cfg);
  io::write_text(dir / "maxent_report.json", report.to_json().dump(2) + "\n");
  io::write_vector_csv(dir / "alpha.csv", closed);
  if (table_out) *table_out = report.table();
  return report.pass ? 0 : 1;
}

/// Builds the synthetic concept pair graph, trains the joint embedding and
/// writes the embedding, concept labels and a summary report.
inline int cmd_clip_sim(const ExperimentConfig& cfg, std::string* table_out = nullptr) {
  auto pairs = datasets::two_concept_pairs(cfg.clip.concepts, cfg.clip.images_per_concept,
                                           cfg.clip.texts_per_concept);
  std::vector<int> planted = datasets::concept_labels(
      cfg.clip.concepts, cfg.clip.images_per_concept, cfg.clip.texts_per_concept);
  multimodal::PairGraph pg = multimodal::pair_graph(
      pairs, cfg.clip.concepts * cfg.clip.images_per_concept,
      cfg.clip.concepts * cfg.clip.texts_per_concept);
  multimodal::TrainOptions topts;
  topts.optimizer = cfg.optimizer;
  topts.optimizer.seed = Rng::derive(cfg.seed, "clip-train");
  optimize::MinimizeResult res =
      multimodal::train_multimodal(pg, cfg.kernel, cfg.embedding_dim, topts);
  spectral::KMeansResult km =
      spectral::kmeans(res.embedding.rows, cfg.clip.concepts,
                       Rng::derive(cfg.seed, "clip-kmeans"), 8);
  double score = spectral::ari(km.labels, planted);

  std::filesystem::path dir = ensure_out_dir(cfg);
  io::write_matrix_csv(dir / "joint_embedding.csv", res.embedding.rows);
  io::write_labels_csv(dir / "joint_labels.csv", km.labels);
  io::write_pairs_csv(dir / "pairs.csv", pairs);
  Report report;
  report.add({"concept_recovery_ari", "clip/concept-recovery", score, 1.0,
              score >= 1.0 - 1e-12});
  io::write_text(dir / "clip_report.json", report.to_json().dump(2) + "\n");
  if (table_out) *table_out = report.table();
  return report.pass ? 0 : 1;
}

/// Emits synthetic inputs in the documented file formats.
inline void cmd_gen_data(const ExperimentConfig& cfg) {
  std::filesystem::path dir = ensure_out_dir(cfg);
  if (cfg.gen.type == "sbm") {
    graph::SimilarityGraph g = graph::sbm_generate(
        cfg.graph.blocks, cfg.graph.p_in, cfg.graph.p_out, cfg.seed, cfg.graph.jitter);
    io::write_matrix_csv(dir / "graph.csv", g.weights);
    io::write_labels_csv(dir / "labels.csv", graph::sbm_labels(cfg.graph.blocks));
  } else if (cfg.gen.type == "blobs") {
    Rng rng(cfg.seed, "blobs");
    datasets::Blobs blobs =
        datasets::make_blobs(cfg.graph.n_blobs, cfg.graph.per_blob,
                             cfg.graph.separation, cfg.graph.stddev, rng);
    io::write_matrix_csv(dir / "points.csv", blobs.points);
    io::write_labels_csv(dir / "labels.csv", blobs.labels);
  } else {
    auto pairs = datasets::two_concept_pairs(
        cfg.clip.concepts, cfg.clip.images_per_concept, cfg.clip.texts_per_concept);
    io::write_pairs_csv(dir / "pairs.csv", pairs);
  }
}

}  // namespace specnce::harness
