#include <iostream>

#include <CLI11.hpp>

#include "parea/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"parea: generalized area functionals, variations and minimal graphs"};
  app.require_subcommand(1);
  parea::cli::Options opt;
  std::string config, out;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "minimize F_H by elliptic regularization and continuation"},
      {"vary", "first and second variation of a field along a direction"},
      {"verify", "run the invariant suite"},
      {"area", "area densities of graphs"},
      {"curvature", "mean and p-mean curvature fields"},
      {"decompose", "Radon-Nikodym decomposition of discrete measures"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : parea::cli::usage_error;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) opt.config = config;
  if (sub->count("--out")) opt.out = out;
  if (sub->count("--seed")) opt.seed = seed;
  return parea::cli::run(sub->get_name(), opt, std::cout);
}
