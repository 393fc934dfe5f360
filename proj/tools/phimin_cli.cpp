#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phimin/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"phimin: weighted minimal and translating surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = ".", format, tol, grid, seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key = value settings file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "mesh format: obj, ply or csv");
  app.add_option("--tol", tol, "tolerance (solver or verification threshold)");
  app.add_option("--grid", grid, "grid size NxM");
  app.add_option("--seed", seed, "seed for randomized runs");
  app.add_option("--set", sets, "extra key=value override (repeatable)");

  std::string input;
  for (const auto& [name, fn] : phimin::cli::commands()) {
    auto* sub = app.add_subcommand(name);
    if (name == "verify") sub->add_option("input", input, "artifact to check")->required();
    (void)fn;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  phimin::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = phimin::RunConfig::load(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw phimin::Error(phimin::ErrorKind::InvalidParameter, "--set expects key=value");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
  } catch (const phimin::Error& e) {
    std::cerr << "phimin: " << e.what() << "\n";
    return 1;
  }
  if (!format.empty()) cfg.set("format", format);
  if (!tol.empty()) cfg.set("tol", tol);
  if (!grid.empty()) cfg.set("grid", grid);
  if (!seed.empty()) cfg.set("seed", seed);
  if (!input.empty()) cfg.set("input", input);
  return phimin::cli::run(command, cfg, out_dir);
}
