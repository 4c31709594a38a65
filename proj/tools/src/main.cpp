#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "geoloc/error.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> k;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Overrides noise.seed");
  cmd->add_option("--out", flags.out, "Overrides out (output directory)");
  cmd->add_option("-k,--landmarks", flags.k, "Overrides k");
}

geoloc::cli::PipelineConfig resolve(const CommonFlags& flags) {
  auto config = geoloc::cli::load_config(flags.config_path);
  if (flags.seed) config.noise.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.k) config.k = *flags.k;
  geoloc::cli::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace geoloc::cli;
  CLI::App app{"Latency-based geolocation pipeline: landmark placement, curve fitting, lateration, evaluation"};
  app.require_subcommand(1);

  CommonFlags flags;
  FitOptions fit_options;
  LocateOptions locate_options;

  auto* place = app.add_subcommand("place", "Choose landmarks on the topology");
  auto* simulate = app.add_subcommand("simulate", "Simulate landmark-pair and target measurements");
  auto* fit = app.add_subcommand("fit", "Fit one latency-distance curve per landmark");
  auto* locate = app.add_subcommand("locate", "Localize targets from their measurements");
  auto* eval = app.add_subcommand("eval", "Place, fit and localize random targets; write evaluation tables");
  for (auto* cmd : {place, simulate, fit, locate, eval}) add_common(cmd, flags);
  fit->add_option("--measurements", fit_options.measurements, "Landmark-pair measurements (JSONL)")
      ->check(CLI::ExistingFile);
  locate->add_option("--measurements", locate_options.measurements, "Target measurements (JSONL)")
      ->check(CLI::ExistingFile);
  locate->add_option("--target", locate_options.target, "Only localize this target id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto config = resolve(flags);
    if (*place) cmd_place(config, std::cout);
    if (*simulate) cmd_simulate(config, std::cout);
    if (*fit) cmd_fit(config, fit_options, std::cout);
    if (*locate) cmd_locate(config, locate_options, std::cout);
    if (*eval) cmd_eval(config, std::cout);
  } catch (const geoloc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
