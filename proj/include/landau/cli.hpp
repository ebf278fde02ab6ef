#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/dispersion.hpp"
#include "landau/equilibria.hpp"
#include "landau/freestream.hpp"
#include "landau/green_function.hpp"
#include "landau/linear_dynamics.hpp"
#include "landau/nonlinear.hpp"

namespace landau {

enum class Workflow { stability, linear, green, nonlinear, freestream };

std::string workflow_name(Workflow w);
Workflow parse_workflow(const std::string& s);

struct RunConfig {
  Workflow workflow = Workflow::stability;
  EquilibriumSpec equilibrium;
  std::optional<PerturbationSpec> perturbation;

  // stability
  int n_modes = 8;
  double re_half = 10.0, im_max = 10.0;
  double im_min = 0.0;  // below 0 also reports damped roots (rational families: any depth)
  FindOptions find;

  // linear
  std::vector<int> modes;  // empty: modes of the perturbation
  double h_t = 0.02;
  double t_end = 0.0;      // 0: 30 / (dominant damping rate)
  LinearOptions linear;

  // freestream
  std::vector<double> times;  // empty: 0..t_end step 0.25
  double gamma_target = 0.0;  // 0: 0.9 A of the perturbation
  FreestreamOptions freestream;

  GreenConfig green;
  NonlinearConfig nonlinear;
  std::vector<double> physical_times;  // nonlinear reconstruction slices

  std::filesystem::path out = "out";
  int threads = 0;
  unsigned seed = 0;
};

// Schema check plus default materialization; throws ConfigError with the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// Each command writes into c.out (created if missing), including config.json.
// Return value is the process exit code: 0 stable/success, 2 unstable, 1 error.
int cmd_stability(const RunConfig& c);
int cmd_linear(const RunConfig& c);
int cmd_green(const RunConfig& c);
int cmd_nonlinear(const RunConfig& c);
int cmd_freestream(const RunConfig& c);
int run_workflow(const RunConfig& c);

}  // namespace landau
