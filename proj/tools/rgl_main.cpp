// rgl: experiment runner. rgl <subcommand> [--config F] [--set k=v]... [--out DIR] [--seed S] [--workers N]
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rgl/config.hpp"
#include "rgl/numeric.hpp"
#include "rgl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"random-perturbation experiments: orbits, exponents, inducing partitions, towers, stationary measures"};
  std::string sub, config_path, out;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("subcommand", sub, "one of: orbit lyapunov hyp-times nuero gmy-build gmy-verify tower project "
                                    "stationary components stability quadratic all")
      ->required()
      ->check(CLI::IsMember(rgl::subcommands()));
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override, key=value (repeatable)")->allow_extra_args(false);
  auto* seed_opt = app.add_option("--seed", seed, "global seed");
  app.add_option("--out", out, "output directory (default: run.output_dir)");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  rgl::Config cfg = rgl::Config::defaults();
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& s : sets) cfg.set_override(s);
    if (*seed_opt) cfg.set("run.seed", std::to_string(seed));
    // precedence: --workers, then RGL_WORKERS, then run.workers
    if (*workers_opt) {
      cfg.set("run.workers", std::to_string(workers));
    } else if (const char* env = std::getenv("RGL_WORKERS")) {
      cfg.set("run.workers", env);
    }
    if (!out.empty()) cfg.set("run.output_dir", out);
    workers = static_cast<int>(cfg.integer("run.workers"));
    if (workers < 1) throw rgl::ConfigError("run.workers must be >= 1");
    cfg.u64("run.seed");
  } catch (const rgl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return rgl::run(sub, cfg, cfg.str("run.output_dir"), workers, std::cerr);
}
