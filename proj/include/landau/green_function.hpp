#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include <json.hpp>

#include "landau/equilibria.hpp"
#include "landau/numerics.hpp"
#include "landau/parallel.hpp"

namespace landau {

struct GreenConfig {
  double nu0 = 0.0;          // zero-free depth; 0 means run the dispersion scan
  double gamma_prime = 0.0;  // depth of the Omega contour; 0 means 0.8*min(nu0, delta)
  double dx = 0.01;          // trapezoid step in u, Re eta = 20 sinh(u/20)
  double X = 1000.0;         // truncation |Re eta| <= X
  double beta = 1.0;         // pole of the subtracted 1/(eta + i beta)^4 tail
  double psi_tol = 1e-13;
  double kernel_tol = 1e-13;
  double series_tol = 1e-10;  // per-slice truncation target for the Q_z series
  double kappa_scale = 1.0;   // multiplies the |n t| cutoff (refinement knob)
  int N_cap = 20000;
  double theta_min = 1e-8;
  int nz = 8192;  // must exceed twice the largest per-slice mode count to avoid aliasing
  std::vector<double> t_slices;  // slices of the Q_z / Q table
  Exec exec = Exec::parallel;
};

// psi_+ and psi_- sampled on Im eta = y, Re eta on a sinh-stretched grid.
struct PsiLine {
  double y = 0.0;
  double delta = 0.0;
  std::vector<double> x, w;  // abscissae and trapezoid weights
  std::vector<cplx> plus, minus;
  std::vector<cplx> sub;     // subtracted tail m0^2/(eta + i beta)^4
};

// Per-mode coefficients c_n(t) = -2 pi i K(nt) [t<0] + Omega_n(t).
class GreenKernel {
 public:
  GreenKernel(const EquilibriumSpec& spec, GreenConfig cfg);

  const EquilibriumSpec& spec() const { return spec_; }
  const GreenConfig& config() const { return cfg_; }
  double gamma_prime() const { return gamma_prime_; }
  double nu0() const { return nu0_; }
  double mass() const { return m0_; }
  double theta_sampled() const { return theta_; }

  cplx K(double xi) const;
  cplx omega(int n, double t) const;
  cplx coefficient(int n, double t) const;
  // c_n(-j h), j = 0..count-1
  std::vector<cplx> coefficient_series(int n, double h, int count) const;
  // c_n(t) for n = s, 2s, .., count*s with s = +-1
  std::vector<cplx> coefficient_slice(int sign, double t, int count) const;
  // |n t| beyond which both parts of c_n are below the series tolerance
  double kappa_cut() const { return kappa_cut_; }

 private:
  void ensure_up() const;
  cplx omega_on(const PsiLine& line, int n, double t) const;

  EquilibriumSpec spec_;
  GreenConfig cfg_;
  double nu0_ = 0.0, gamma_prime_ = 0.0, m0_ = 1.0, theta_ = 0.0, kappa_cut_ = 0.0;
  PsiLine down_;
  mutable std::unique_ptr<PsiLine> up_;
};

cplx mode_coefficient(const GreenKernel& G, int n, double t);

struct GreenTable {
  EquilibriumSpec spec;
  GreenConfig cfg;
  std::vector<double> z;
  std::vector<double> t;
  std::vector<int> modes_used;  // series truncation per slice
  std::vector<double> tail_bound;
  std::vector<double> Qz, Qzz, Q;  // row-major (t, z)
  double gamma_prime = 0.0, nu0 = 0.0, a_fit = 0.0, theta = 0.0;
  std::shared_ptr<GreenKernel> kernel;  // null after load()

  double qz(int it, int iz) const { return Qz[static_cast<size_t>(it) * z.size() + iz]; }
  double qzz(int it, int iz) const { return Qzz[static_cast<size_t>(it) * z.size() + iz]; }
  double q(int it, int iz) const { return Q[static_cast<size_t>(it) * z.size() + iz]; }
};

std::vector<double> default_green_slices();
GreenTable build_Qz(const EquilibriumSpec& spec, GreenConfig cfg);
GreenTable build_Qz(std::shared_ptr<GreenKernel> kernel, std::vector<double> slices, int nz);

struct InvariantReport {
  double causality = 0.0;    // sup |Q_z| over t > 0 slices
  double mean = 0.0;         // sup over slices of |mean_z Q_z|
  double a_fit = 0.0;        // far-past rate from t <= -1
  DecayFit far_past;
};
InvariantReport green_invariants(const GreenTable& table);

struct SelfSimilarReport {
  std::vector<double> t;
  std::vector<double> literal;        // sup_{|z|<=pi} |Q_z - f_e(z/t)|
  std::vector<double> corrected;      // sup |Q_z + f_e(z/t)|
  std::vector<double> corrected_dz;   // sup |d/dz (Q_z + f_e(z/t))|
  std::vector<int> modes;
  bool literal_bounded = false;
  bool corrected_bounded = false;
};
SelfSimilarReport selfsimilar_residual(const GreenTable& table,
                                       const std::vector<double>& slices = {-1.0, -0.5, -0.1,
                                                                            -0.02});

// Per-mode source and field; values on t_j = t0 + j h with t0 = 0.
struct ModeField {
  TimeGrid grid;
  std::map<int, std::vector<cplx>> e;    // E_n
  std::map<int, std::vector<cplx>> ez;   // (E_z)_n = i n E_n
  double tail_bound = 0.0;
};

// Coefficient series a_n(tau) = c_n(tau)/((2 pi)^2 n) at tau = -j h, cached per mode.
class ModeResponse {
 public:
  ModeResponse(std::shared_ptr<const GreenKernel> G, double h, int count);
  const std::vector<cplx>& a(int n);
  double h() const { return h_; }
  int count() const { return count_; }
  const GreenKernel& kernel() const { return *G_; }

 private:
  std::shared_ptr<const GreenKernel> G_;
  double h_;
  int count_;
  std::map<int, std::vector<cplx>> cache_;
};

// E_z,n(t) = h_n(t) + 2 pi int_t^inf a_n(t-s) h_n(s) ds, E_n = E_z,n/(in).
ModeField solve_field_modes(ModeResponse& R, const std::map<int, std::vector<cplx>>& h,
                            const TimeGrid& grid, double gamma = 0.0, Exec exec = Exec::parallel);
ModeField solve_field(ModeResponse& R, const SpaceTimeField& h, int n_max, double gamma = 0.0,
                      Exec exec = Exec::parallel);
SpaceTimeField synthesize_field(const ModeField& f, int nz);

struct N10aReport {
  double residual = 0.0;
  double tail = 0.0;
  double t_checked = 0.0;
};
// sup over t_j <= t_check of |E_z,n - int_t^inf E_n(s) K(n(t-s)) ds - h_n|, summed over modes.
N10aReport residual_N10a(const EquilibriumSpec& spec, const ModeField& E,
                         const std::map<int, std::vector<cplx>>& h, double t_check, double tol,
                         Exec exec = Exec::parallel);
// Field-level form: decompose sampled E (value channel) and h into modes first.
N10aReport residual_N10a(const EquilibriumSpec& spec, const SpaceTimeField& E,
                         const SpaceTimeField& h, int n_max, double t_check, double tol,
                         Exec exec = Exec::parallel);

std::map<int, std::vector<cplx>> project_modes(const SpaceTimeField& f, int n_max, bool dvalue);

void save_table(const GreenTable& t, const std::filesystem::path& dir);
GreenTable load_table(const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const GreenConfig& c);
void from_json(const nlohmann::json& j, GreenConfig& c);

}  // namespace landau
