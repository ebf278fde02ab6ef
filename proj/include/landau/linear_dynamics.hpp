#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "landau/equilibria.hpp"
#include "landau/numerics.hpp"
#include "landau/parallel.hpp"

namespace landau {

struct LinearOptions {
  double kernel_tol = 1e-13;
  double source_shift = 0.0;  // velocity contour shift for G_n; 0 means 0.9*A of the perturbation
  double fit_from = 0.25;     // fit window as fractions of the horizon
  double fit_to = 0.75;
  int nz = 64;
  Exec exec = Exec::parallel;
};

// G_n(t) = int g_n(v) e^{-invt} dv
cplx source_G_n(const PerturbationSpec& g0, int n, double t, const LinearOptions& opt = {});

// Samples of K(n tau) on the grid offsets tau = j h.
std::vector<cplx> mode_kernel(const EquilibriumSpec& spec, int n, const TimeGrid& grid,
                              const LinearOptions& opt = {});

// in b_n + int_0^t b_n(s) K(n(t-s)) ds = G_n
ModeSeries evolve_mode(const EquilibriumSpec& spec, const PerturbationSpec& g0, int n,
                       const TimeGrid& grid, const LinearOptions& opt = {});
ModeSeries fundamental_B_n(const EquilibriumSpec& spec, int n, const TimeGrid& grid,
                           const LinearOptions& opt = {});

struct LinearRun {
  EquilibriumSpec spec;
  PerturbationSpec g0;
  std::vector<int> modes;
  TimeGrid grid;
  std::map<int, ModeSeries> b;
  std::map<int, DecayFit> fits;
  SpaceTimeField E;
  DecayFit global_fit;
  bool growing = false;
};

LinearRun run_linear(const EquilibriumSpec& spec, const PerturbationSpec& g0,
                     std::vector<int> modes, const TimeGrid& grid, const LinearOptions& opt = {});
// E(x,t) = sum_n b_n(t) e^{inx}; attaches per-mode and sup_x|E| fits.
SpaceTimeField reconstruct_field(LinearRun& run, const LinearOptions& opt = {});

void to_json(nlohmann::json& j, const DecayFit& f);
nlohmann::json fits_json(const LinearRun& run);

}  // namespace landau
