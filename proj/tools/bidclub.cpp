// Command-line front end: bidclub EXPERIMENT [--config PATH] [--seed N]
// [--trials N] [--out PATH] [--threads N]

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "bidclub/cli.hpp"
#include "bidclub/error.hpp"

int main(int argc, char** argv) {
  namespace cli = bidclub::cli;

  CLI::App app{"Bidding-club auction verification experiments"};
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<unsigned> threads;

  std::string names;
  for (const auto& n : cli::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names)->required();
  app.add_option("--config", config_path, "Configuration file");
  app.add_option("--seed", seed, "Master seed (overrides the file)");
  app.add_option("--trials", trials, "Monte Carlo trials (overrides the file)");
  app.add_option("--out", out, "Report or table path (default stdout)");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  cli::RunConfig config;
  try {
    if (!config_path.empty()) config = cli::load_config(config_path);
  } catch (const bidclub::Error& e) {
    std::cerr << "error (" << bidclub::to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == bidclub::ErrorKind::io ? cli::kIoError : cli::kConfigError;
  }
  config.experiment = experiment;
  if (seed) config.seed = *seed;
  if (trials) config.trials = *trials;
  if (out) config.output = *out;
  if (threads) config.threads = *threads;
  return cli::run(config, std::cout, std::cerr);
}
