// Command-line front end: verification suite, embedding training, spectral
// decomposition, the max-entropy solver, the synthetic multi-modal
// experiment and data generation. Configuration comes from an optional
// JSON file; --seed, --out and --jobs override it.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specnce/harness.hpp"

namespace {

struct CommonArgs {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file");
  cmd->add_option("--seed", args.seed, "master seed (overrides config)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--jobs", args.jobs, "concurrent verification jobs");
}

specnce::harness::ExperimentConfig resolve(const CommonArgs& args) {
  specnce::harness::ExperimentConfig cfg =
      specnce::harness::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  if (args.jobs) cfg.jobs = *args.jobs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-nce: contrastive-learning objectives as spectral clustering"};
  app.require_subcommand(1);

  CommonArgs verify_args, train_args, spectral_args, maxent_args, clip_args, gen_args;
  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify, verify_args);
  CLI::App* train = app.add_subcommand("train", "optimize an embedding on a graph");
  add_common(train, train_args);
  CLI::App* spectral = app.add_subcommand("spectral", "Laplacian eigendecomposition");
  add_common(spectral, spectral_args);
  CLI::App* maxent = app.add_subcommand("maxent", "entropy-regularized softmax program");
  add_common(maxent, maxent_args);
  CLI::App* clip_sim = app.add_subcommand("clip-sim", "synthetic paired-modality run");
  add_common(clip_sim, clip_args);
  CLI::App* gen_data = app.add_subcommand("gen-data", "emit synthetic input files");
  add_common(gen_data, gen_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      std::string table;
      int rc = specnce::harness::cmd_verify(resolve(verify_args), &table);
      std::fputs(table.c_str(), stdout);
      return rc;
    }
    if (train->parsed()) {
      specnce::harness::cmd_train(resolve(train_args));
      return 0;
    }
    if (spectral->parsed()) {
      specnce::harness::cmd_spectral(resolve(spectral_args));
      return 0;
    }
    if (maxent->parsed()) {
      std::string table;
      int rc = specnce::harness::cmd_maxent(resolve(maxent_args), &table);
      std::fputs(table.c_str(), stdout);
      return rc;
    }
    if (clip_sim->parsed()) {
      std::string table;
      int rc = specnce::harness::cmd_clip_sim(resolve(clip_args), &table);
      std::fputs(table.c_str(), stdout);
      return rc;
    }
    if (gen_data->parsed()) {
      specnce::harness::cmd_gen_data(resolve(gen_args));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
