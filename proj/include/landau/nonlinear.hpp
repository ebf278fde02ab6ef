#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/equilibria.hpp"
#include "landau/green_function.hpp"
#include "landau/numerics.hpp"
#include "landau/parallel.hpp"

namespace landau {

// E(z,t) = sum_n E_n(t) e^{inz} on t_j = j h, n = +-1..+-n_max.
struct FieldIterate {
  TimeGrid grid;
  double gamma = 0.0;
  int iteration = 0;
  std::map<int, std::vector<cplx>> modes;
  double norm = 0.0;
  DecayFit fit;

  static FieldIterate zero(const TimeGrid& grid, double gamma, int n_max);
  int n_max() const;
  bool is_zero() const;
  // 4-point Lagrange in t; beyond the horizon the per-mode exponential tail.
  cplx mode_at(int n, double s) const;
  double E(double z, double s) const;
  double Ez(double z, double s) const;
  SpaceTimeField field(int nz) const;
  ModeField as_mode_field() const;
};

// sup over the (z, t) sample grid of e^{gamma t}(|E| + |E_z|)
double weighted_norm(const FieldIterate& E, int nz = 32);
double weighted_norm_diff(const FieldIterate& a, const FieldIterate& b, int nz = 32);
// Envelope fit of sup_z(|E| + |E_z|) over the part of the grid above the noise floor.
DecayFit fit_iterate(const FieldIterate& E, int nz = 32);

struct CharOptions {
  double abs_tol = 1e-7;  // relative to the field norm
  double rel_tol = 1e-8;
  double cutoff = 1e-15;  // stop where the remaining field contribution is below this
};

// Characteristic through (z, v) at time t, in deviation variables.
// dZ1, dV1 are the straight-line integrals -int s E(z+vs,s) ds and int E(z+vs,s) ds.
struct CharEntry {
  double Z_inf = 0.0, V_inf = 0.0;
  double dZ1 = 0.0, dV1 = 0.0;
  double tail = 0.0;
  int steps = 0;
};

CharEntry integrate_characteristics(const FieldIterate& E, double t, double z, double v,
                                    const CharOptions& opt = {});

// Endpoints on the fan (t_i, z_j - w_k t_i, w_k): row-major (t, z, w).
struct CharEndpoints {
  std::vector<double> t, z, w;
  std::vector<CharEntry> entries;
  double tail = 0.0;
  const CharEntry& at(int it, int iz, int iw) const {
    return entries[(static_cast<size_t>(it) * z.size() + iz) * w.size() + iw];
  }
};

CharEndpoints compute_endpoints(const FieldIterate& E, const std::vector<double>& t,
                                const std::vector<double>& z, const std::vector<double>& w,
                                const CharOptions& opt = {}, Exec exec = Exec::parallel);

double source_psi(const PerturbationSpec& g, double z, double t);

// Lattice table of ghat_m(q h) = int g_m(w) e^{-i q h w} dw, zero beyond |q h| > xi_max.
class LTable {
 public:
  LTable(const PerturbationSpec& g, double h, double tol = 1e-16);
  cplx ghat(int m, long q) const;
  double h() const { return h_; }
  double xi_max() const { return xi_max_; }
  long q_max() const { return q_max_; }
  const std::vector<int>& g_modes() const { return g_modes_; }

 private:
  double h_, xi_max_;
  long q_max_;
  std::vector<int> g_modes_;
  std::map<int, std::vector<cplx>> table_;
};

// Modes of L on the iterate grid. t >= t_floor: (t-s)(s/t) and (1-s/t) weights;
// t < t_floor: the regular -s d/dz and d/dw form.
std::map<int, std::vector<cplx>> source_L_modes(const LTable& tab, const FieldIterate& E,
                                                double t_floor = 1e-2, int n_max = -1,
                                                Exec exec = Exec::parallel);
double source_L(const PerturbationSpec& g, const FieldIterate& E, double z, double t,
                double t_floor = 1e-2);

struct RtildeOptions {
  double dt = 0.25;      // coarse t spacing of the R~ samples
  double T_R = 0.0;      // 0: where (t+1)^2 e^{-2 gamma t} drops below tail_tol
  double tail_tol = 1e-6;
  int nz = 8;
  double dw = 0.1;
  double W = 0.0;        // 0: velocity cutoff from the equilibrium and g tails
  double w_tol = 1e-8;
  CharOptions chars;
};

double velocity_cutoff(const EquilibriumSpec& spec, const PerturbationSpec& g, double tol);

// Pointwise R~ integrand summed over a w fan.
double source_Rtilde(const EquilibriumSpec& spec, const PerturbationSpec& g,
                     const CharEndpoints& ends, int it, int iz);
double source_Rtilde(const EquilibriumSpec& spec, const PerturbationSpec& g,
                     const FieldIterate& E, double z, double t, const RtildeOptions& opt = {});

struct RtildeSamples {
  std::vector<double> t;          // coarse times
  std::map<int, std::vector<cplx>> modes;  // projections at the coarse times
  double mean = 0.0;              // largest |mode 0|
  double sup = 0.0;
  double T_R = 0.0;
  double tail = 0.0;              // bound on the dropped part beyond T_R
};
RtildeSamples source_Rtilde_samples(const EquilibriumSpec& spec, const PerturbationSpec& g,
                                    const FieldIterate& E, const RtildeOptions& opt,
                                    Exec exec = Exec::parallel);
// Lagrange interpolation of the coarse samples onto the iterate grid, zero beyond T_R.
std::map<int, std::vector<cplx>> interpolate_modes(const RtildeSamples& r, const TimeGrid& grid,
                                                   int n_max);

struct NonlinearConfig {
  double gamma = 0.0;     // 0: min(0.9 gamma_linear, 0.9 gamma_H)
  double T_max = 0.0;     // 0: 40/gamma
  double h = 0.01;
  int n_max = 3;          // field modes kept
  int nz = 32;            // norm and output grid
  int max_iter = 12;
  double tol = 1e-6;
  double t_floor = 1e-2;
  double mean_tol = 1e-8;
  double ball = 0.0;      // 0: twice the norm of T(0)
  RtildeOptions rtilde;
  GreenConfig green;
  Exec exec = Exec::parallel;
};

struct GammaChoice {
  double gamma = 0.0, gamma_linear = 0.0, gamma_H = 0.0;
};
GammaChoice choose_gamma(const EquilibriumSpec& spec, const PerturbationSpec& g,
                         Exec exec = Exec::parallel);

// Resolved state shared by every application of T.
struct NonlinearContext {
  EquilibriumSpec spec;
  PerturbationSpec g;
  NonlinearConfig cfg;  // gamma, T_max materialized
  TimeGrid grid;
  std::shared_ptr<GreenKernel> kernel;
  std::shared_ptr<ModeResponse> response;
  std::shared_ptr<LTable> ltab;
  std::map<int, std::vector<cplx>> psi;
};
NonlinearContext make_context(const EquilibriumSpec& spec, const PerturbationSpec& g,
                              NonlinearConfig cfg);

struct Sources {
  std::map<int, std::vector<cplx>> psi, L, R, h;
  double mean_dropped = 0.0;
  double R_tail = 0.0;
};
Sources assemble_sources(const NonlinearContext& ctx, const FieldIterate& E);

struct ApplyReport {
  double L_sup = 0.0, R_sup = 0.0, mean_dropped = 0.0, tail = 0.0;
};
FieldIterate apply_T(const NonlinearContext& ctx, const FieldIterate& E,
                     ApplyReport* report = nullptr);

struct FixedPointResult {
  FieldIterate E;
  std::vector<double> norms, updates, ratios;
  std::vector<ApplyReport> steps;
  bool converged = false;
  int iterations = 0;
  double ball = 0.0;
  std::vector<std::string> warnings;
};
FixedPointResult solve_fixed_point(const NonlinearContext& ctx);

struct PhysicalResult {
  std::vector<double> x, v, t;
  std::vector<double> f;  // row-major (t, x, v)
  SpaceTimeField rho;     // value: rho, dvalue: E_x from the iterate
  double gauss_residual = 0.0;
  DecayFit rho_fit, E_fit;
  double f_at(int it, int ix, int iv) const {
    return f[(static_cast<size_t>(it) * x.size() + ix) * v.size() + iv];
  }
};
PhysicalResult reconstruct_physical(const EquilibriumSpec& spec, const PerturbationSpec& g,
                                    const FieldIterate& E, const std::vector<double>& t,
                                    int nx = 16, double dv = 0.1, const CharOptions& opt = {},
                                    Exec exec = Exec::parallel);

void to_json(nlohmann::json& j, const NonlinearConfig& c);
void from_json(const nlohmann::json& j, NonlinearConfig& c);
void to_json(nlohmann::json& j, const FixedPointResult& r);

}  // namespace landau
