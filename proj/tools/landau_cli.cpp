#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "landau/cli.hpp"
#include "landau/io.hpp"
#include "landau/parallel.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  long seed = -1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "run configuration (JSON)")->required()
      ->check(CLI::ExistingFile);
  app->add_option("-o,--out", c.out, "output directory (overrides config.out)");
  app->add_option("-t,--threads", c.threads, "worker threads (0: LANDAU_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--seed", c.seed, "recorded in config.json; the workflows are deterministic");
}

int run(const std::string& workflow, const Common& opt) {
  nlohmann::json j = landau::read_json(opt.config);
  if (!j.is_object()) throw landau::ConfigError("config root must be a JSON object");
  if (j.contains("workflow") && j["workflow"] != workflow)
    std::cerr << "note: config workflow '" << j["workflow"].get<std::string>()
              << "' replaced by subcommand '" << workflow << "'\n";
  j["workflow"] = workflow;
  if (!opt.out.empty()) j["out"] = opt.out;
  if (opt.threads > 0) j["threads"] = opt.threads;
  if (opt.seed >= 0) j["seed"] = opt.seed;
  landau::RunConfig cfg = landau::parse_config(j);
  cfg.threads = landau::resolve_threads(cfg.threads);
  landau::set_threads(cfg.threads);
  return landau::run_workflow(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and nonlinear Landau damping solver"};
  app.require_subcommand(1);
  Common opt;
  std::string chosen;
  for (const char* name : {"stability", "linear", "green", "nonlinear", "freestream"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, opt);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    return run(chosen, opt);
  } catch (const landau::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
