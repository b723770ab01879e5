#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lhsis/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lie-Hamilton SIS systems: simulation, exact solutions, superposition and checks"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  bool cross_check = false;
  std::uint64_t seed = lhsis::cli::Options{}.seed;
  double tol = 0.0;

  for (const auto& name : lhsis::cli::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--cross-check", cross_check, "compare the closed form against the integrator (exact)");
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_option("--tol", tol, "integration tolerance override")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  lhsis::cli::Options opt;
  opt.out_dir = out_dir;
  opt.cross_check = cross_check;
  opt.seed = seed;
  if (tol > 0.0) opt.tol = tol;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const lhsis::RunConfig cfg = lhsis::load_config(config_path);
    return lhsis::cli::dispatch(command, cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "lhsis " << command << ": error: " << e.what() << '\n';
    return 2;
  }
}
