#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "fairmsm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-state transition-rate estimation and fair LTCI pricing"};
  app.require_subcommand(1);

  fairmsm::cli::CommonArgs args;
  std::uint64_t seed = 0;

  const char* names[] = {"simulate", "transform", "fit", "price", "fair", "report"};
  const char* descriptions[] = {
      "generate a synthetic population and its trajectories",
      "restructure trajectories into Poisson exposure rows",
      "fit per-transition Poisson regressions",
      "price policies under the configured modes",
      "run a fairness adjustment and report parity metrics",
      "summarize parity metrics from a quote file",
  };
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", args.config_path, "configuration file")->required();
    sub->add_option("--out", args.out_dir, "output directory (default .)");
    sub->add_option("--seed", seed, "seed override")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", args.threads, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) args.seed = seed;
  return fairmsm::cli::run_command(sub->get_name(), args);
}
