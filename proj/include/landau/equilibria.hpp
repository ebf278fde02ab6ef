#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "landau/core.hpp"

namespace landau {

// Partial-fraction data: f(v) = sum_k r_k / (v - p_k).
struct PoleSet {
  std::vector<cplx> poles;
  std::vector<cplx> residues;
};

// An analytic velocity function. Built-in shapes carry closed-form derivatives;
// rational data is given by its poles so strip analyticity is checkable.
struct VelocityProfile {
  enum class Kind { gaussian, lorentzian, quartic_gaussian, rational };
  Kind kind = Kind::gaussian;
  double width = 1.0;        // gaussian: exp(-(v/w)^2)/(w sqrt(pi))
  double a = 1.0;            // quartic_gaussian: 4a^{5/2}/(3 sqrt(pi)) v^4 exp(-a v^2)
  double scale = 1.0 / pi;   // lorentzian: scale/(1+v^2)
  PoleSet rational;

  static VelocityProfile gaussian(double width = 1.0);
  static VelocityProfile lorentzian(double scale = 1.0 / pi);
  static VelocityProfile quartic_gaussian(double a);
  static VelocityProfile from_poles(PoleSet ps);

  cplx value(cplx v) const;
  cplx deriv(cplx v) const;
  // v -> conj(f(conj v))
  VelocityProfile conjugate() const;
  bool entire() const { return kind == Kind::gaussian || kind == Kind::quartic_gaussian; }
  // Poles of value() with residues; empty for entire profiles.
  PoleSet poles() const;
  // Distance from the real axis to the nearest singularity (inf if entire).
  double singular_distance() const;
  std::string name() const;
};

enum class Family { maxwellian, lorentzian, quartic_gaussian, rational };

std::string family_name(Family f);
Family parse_family(const std::string& s);

struct EquilibriumSpec {
  Family family = Family::maxwellian;
  VelocityProfile profile = VelocityProfile::gaussian();
  double A = 0.5;
  double alpha = 3.0;
  double B = 0.0;  // strip bound; filled by validate or the constructor scan

  static EquilibriumSpec maxwellian(double A = 0.5, double alpha = 3.0);
  static EquilibriumSpec lorentzian(double scale = 1.0 / pi, double A = 0.5, double alpha = 1.5);
  static EquilibriumSpec quartic_gaussian(double a, double A = 0.5, double alpha = 3.0);
  static EquilibriumSpec rational(PoleSet ps, double A, double alpha);

  // Throws ConfigError on alpha <= 1, alpha == 2, A <= 0, or a singularity in the strip.
  void check() const;
  // Velocity truncation so the tail mass of |f_e| is below tol.
  double v_max(double tol) const;
};

cplx eval_fe(const EquilibriumSpec& spec, cplx v);
cplx eval_fe_deriv(const EquilibriumSpec& spec, cplx v);

struct PerturbationMode {
  int n = 1;
  VelocityProfile profile = VelocityProfile::gaussian();
  cplx coef{1.0, 0.0};
};

struct PerturbationSpec {
  double eps = 0.0;
  double A = 0.5;
  double alpha = 3.0;
  std::vector<PerturbationMode> modes;  // already expanded into +-n pairs

  // Adds (n, p, c/2) and (-n, conj p, conj(c)/2) so g is real: a cosine in x for real c.
  void add_cosine(int n, const VelocityProfile& p, cplx c = 1.0);
  void check() const;
  int max_mode() const;
  bool empty() const { return modes.empty() || eps == 0.0; }

  static PerturbationSpec cosine(double eps, int n, const VelocityProfile& p, double A = 0.5,
                                 double alpha = 3.0);
};

cplx eval_g(const PerturbationSpec& g, double x, cplx v);
cplx eval_g_dz(const PerturbationSpec& g, double x, cplx v);
cplx eval_g_dv(const PerturbationSpec& g, double x, cplx v);

// Complex amplitude of mode n: the v-profile multiplying e^{inx}, times eps.
cplx eval_g_mode(const PerturbationSpec& g, int n, cplx v);
// int p(v) e^{-ikv} dv on the line Im v = -sign(k)*shift (shift < strip of p).
cplx profile_transform(const VelocityProfile& p, double k, double shift, double tol = 1e-13);
// int g_n(v) e^{-ikv} dv summed over the entries of mode n, eps included.
cplx mode_transform(const PerturbationSpec& g, int n, double k, double shift, double tol = 1e-13);
cplx eval_g_mode_dv(const PerturbationSpec& g, int n, cplx v);

struct ValidationReport {
  bool pass = true;
  double B_scan = 0.0;
  double normalization = 0.0;
  bool positive = true;
  bool alpha_ok = true;
  bool mean_zero = true;
  double V_max = 0.0;
  int strip_points = 0;
  std::vector<std::string> notes;
};

ValidationReport validate_assumptions(const EquilibriumSpec& spec, int grid = 100);
ValidationReport validate_assumptions(const PerturbationSpec& spec, int grid = 100);

void to_json(nlohmann::json& j, const VelocityProfile& p);
void from_json(const nlohmann::json& j, VelocityProfile& p);
void to_json(nlohmann::json& j, const EquilibriumSpec& s);
void from_json(const nlohmann::json& j, EquilibriumSpec& s);
void to_json(nlohmann::json& j, const PerturbationSpec& s);
void from_json(const nlohmann::json& j, PerturbationSpec& s);
void to_json(nlohmann::json& j, const ValidationReport& r);

}  // namespace landau
