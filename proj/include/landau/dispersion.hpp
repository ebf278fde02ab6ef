#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "landau/equilibria.hpp"
#include "landau/parallel.hpp"

namespace landau {

struct PhiOptions {
  enum class Method { automatic, quadrature, residue };
  Method method = Method::automatic;
  double delta = 0.0;     // base contour offset; 0 means A/2
  double tol = 1e-13;     // absolute quadrature tolerance
  double half_length = 10.0;
};

double default_delta(const EquilibriumSpec& spec);

// K(xi) = int e^{-i xi v} f_e'(v) dv, contour shifted by -delta*sign(xi).
cplx kernel_K(const EquilibriumSpec& spec, double xi, const PhiOptions& opt = {});

// Upper-branch Landau function and its analytic continuation below the axis.
cplx landau_Phi(const EquilibriumSpec& spec, cplx eta, int n, const PhiOptions& opt = {});
// Real-line integral for Im eta < 0 (the branch that is the conjugate mirror of landau_Phi).
cplx landau_Phi_lower(const EquilibriumSpec& spec, cplx eta, int n, const PhiOptions& opt = {});
// Deepest Im eta below which landau_Phi cannot be evaluated (-inf for rational families).
double phi_depth_limit(const EquilibriumSpec& spec, const PhiOptions& opt = {});

// Q_n(z), continued through the Phi mapping; n > 0 uses the upper branch, n < 0 its mirror.
cplx landau_Q(const EquilibriumSpec& spec, cplx z, int n, const PhiOptions& opt = {});
// i(n + (1/n) int f_e(v)/(z/n + iv)^2 dv) evaluated literally on the real line.
cplx landau_Q_direct(const EquilibriumSpec& spec, cplx z, int n, double tol = 1e-12);

// psi_+(eta) = int_{R+i delta} f'(w)/(eta+w) dw, psi_-(eta) = int_{R-i delta} f'(w)/(eta-w) dw.
cplx psi_pm(const EquilibriumSpec& spec, cplx eta, int sign, double delta, double tol = 1e-12);

struct SearchRegion {
  double re_min = -10.0, re_max = 10.0;
  double im_min = 0.0, im_max = 10.0;
  std::vector<int> modes;

  static SearchRegion symmetric(int n_modes, double re_half = 10.0, double im_min = 0.0,
                                double im_max = 10.0);
  void check() const;
};

struct DispersionRoot {
  cplx eta;
  double residual = 0.0;
};

struct ModeReport {
  int n = 0;
  int winding = 0;        // argument-principle count of zeros minus poles
  int poles_inside = 0;   // double poles of the continued Phi (rational families)
  int zeros = 0;          // winding + 2*poles_inside
  std::vector<DispersionRoot> roots;
  double theta = 0.0;     // grid minimum of |1 - psi_{sign n}/(|n| n)| for this n
  int boundary_points = 0;
};

struct FindOptions {
  PhiOptions phi;
  int edge_points = 64;
  int max_subdiv = 40;
  double nu_step = 0.05;
  bool scan_nu0 = true;
  int theta_nx = 161, theta_ny = 41;
  double newton_tol = 1e-10;
  int newton_iter = 50;
  double accept_residual = 1e-8;
  Exec exec = Exec::parallel;
};

struct DispersionReport {
  SearchRegion region;
  std::vector<ModeReport> modes;
  std::string verdict;  // stable | unstable | inconclusive
  double theta = 0.0;   // minimum over tested modes and the sampled region
  double nu0 = 0.0;     // deepest tested depth with zero winding for every mode
  std::vector<double> nu_tested;
  double delta = 0.0;
  double V_max = 0.0;
  double region_shift = 0.0;  // auto-perturbation applied to keep roots off the boundary
  std::vector<std::string> notes;
};

// Counts zeros of Phi(.;n) inside the rectangle and Newton-refines them.
ModeReport analyze_mode(const EquilibriumSpec& spec, int n, SearchRegion region,
                        const FindOptions& opt = {});
DispersionReport find_roots(const EquilibriumSpec& spec, const SearchRegion& region,
                            const FindOptions& opt = {});

// Root of Phi(.;n) with the largest imaginary part inside the rectangle, if any.
bool dominant_root(const EquilibriumSpec& spec, int n, const SearchRegion& region, cplx& eta,
                   const FindOptions& opt = {});

void to_json(nlohmann::json& j, const DispersionReport& r);

}  // namespace landau
