#pragma once

#include <vector>

#include <json.hpp>

#include "landau/equilibria.hpp"
#include "landau/numerics.hpp"
#include "landau/parallel.hpp"

namespace landau {

struct FreestreamOptions {
  double shift = 0.0;  // constant per-mode w-contour shift; 0 means A - margin
  double tol = 1e-14;
  Exec exec = Exec::parallel;
};

double freestream_shift(const PerturbationSpec& g, const FreestreamOptions& opt = {});

// Fourier coefficient of H(., t) at mode n: int g_n(w) e^{-inwt} dw.
cplx freestream_mode(const PerturbationSpec& g, int n, double t, const FreestreamOptions& opt = {});
// H(z,t) = int g(z - wt, w) dw
double h_freestream(const PerturbationSpec& g, double z, double t,
                    const FreestreamOptions& opt = {});
// H and H_z on a uniform z-grid.
SpaceTimeField freestream_field(const PerturbationSpec& g, int nz, const std::vector<double>& t,
                                const FreestreamOptions& opt = {});

struct DecayBoundReport {
  bool pass = false;
  double gamma_target = 0.0;
  DecayFit fit;
  double C = 0.0;  // |H| <= C eps e^{-gamma t} on the sampled grid
  std::vector<double> t;
  std::vector<double> sup;
};

DecayBoundReport check_decay_bound(const PerturbationSpec& g, double gamma,
                                   const std::vector<double>& t, int nz = 32,
                                   const FreestreamOptions& opt = {});

void to_json(nlohmann::json& j, const DecayBoundReport& r);

}  // namespace landau
