#include <CLI11.hpp>
#include <cstdlib>
#include <string>
#include <thread>

#include "commands.hpp"

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("PINNFP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pinnfp::cli;
  CLI::App app{"PINN fixed-point laboratory: training runs, sweeps, loss landscapes and reference solutions"};
  app.require_subcommand(1);

  Options options;
  options.threads = default_threads();
  std::string out, manifest;
  std::uint64_t seed = 0;
  std::int64_t max_epochs = 0;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Command commands[] = {
      {"train", "train the run(s) described by a manifest", cmd_train},
      {"sweep", "run a success-rate sweep", cmd_sweep},
      {"landscape", "project the physics loss onto a plane through recorded checkpoints", cmd_landscape},
      {"oracle", "write a reference solution", cmd_oracle},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("manifest", manifest, "experiment manifest (JSON)")->required();
    sub->add_option("-o,--out", out, "output root directory (default: manifest 'output' or ./runs)");
    sub->add_option("-s,--seed", seed, "override the manifest seed");
    sub->add_option("-j,--threads", options.threads, "worker threads (env PINNFP_THREADS)")->check(CLI::PositiveNumber);
    sub->add_option("--max-epochs", max_epochs, "cap the epochs of every training run")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", options.verbosity, "progress on stderr (repeat for more)");
    sub->add_flag("-f,--force", options.force, "overwrite existing artifacts that differ");
  }
  CLI11_PARSE(app, argc, argv);

  options.manifest = manifest;
  for (const auto& c : commands) {
    const CLI::App* sub = app.get_subcommand(c.name);
    if (!sub->parsed()) continue;
    if (sub->count("--out")) options.out = out;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--max-epochs")) options.max_epochs = max_epochs;
    return guarded(c.name, c.fn, options);
  }
  return kExitConfig;
}
