#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "regime_scout/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"regime scout: maps the response regimes of a dynamical system"};
  app.require_subcommand(1);

  std::string config, out, theta, run, fig;
  long grid = 100;

  CLI::App* explore = app.add_subcommand("explore", "run a full exploration");
  explore->add_option("--config", config, "run configuration (json)")->required();
  explore->add_option("--out", out, "output directory")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  simulate->add_option("--config", config, "run configuration (json)")->required();
  simulate->add_option("--theta", theta, "free-axis values, comma separated")->required();
  simulate->add_option("--out", out, "output csv")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "grade a grid with the brute-force rule");
  oracle->add_option("--config", config, "run configuration (json)")->required();
  oracle->add_option("--grid", grid, "grid resolution per axis");
  oracle->add_option("--out", out, "output csv")->required();

  CLI::App* plot = app.add_subcommand("plot", "render a figure from a run directory");
  plot->add_option("--run", run, "directory written by explore")->required();
  plot->add_option("--fig", fig, "regimes | uncertainty | surface | pca")->required();
  plot->add_option("--out", out, "output svg")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // normalize to the 0 (help) / 2 (usage) contract
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (explore->parsed()) return regime_scout::cmd_explore(config, out, std::cerr);
  if (simulate->parsed()) return regime_scout::cmd_simulate(config, theta, out, std::cerr);
  if (oracle->parsed()) return regime_scout::cmd_oracle(config, grid, out, std::cerr);
  if (plot->parsed()) return regime_scout::cmd_plot(run, fig, out, std::cerr);
  return 2;
}
