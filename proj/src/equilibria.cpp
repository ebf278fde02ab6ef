#include "landau/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "landau/numerics.hpp"

namespace landau {

namespace {

void strip_check(double A, cplx v, const char* who) {
  if (std::abs(v.imag()) > A * (1.0 + 1e-12))
    throw StripViolation(std::string(who) + ": |Im v| = " + std::to_string(std::abs(v.imag())) +
                         " exceeds strip half-width A = " + std::to_string(A));
}

cplx conj_c(cplx z) { return std::conj(z); }

}  // namespace

VelocityProfile VelocityProfile::gaussian(double width) {
  if (!(width > 0)) throw ConfigError("gaussian profile: width must be positive");
  VelocityProfile p;
  p.kind = Kind::gaussian;
  p.width = width;
  return p;
}

VelocityProfile VelocityProfile::lorentzian(double scale) {
  VelocityProfile p;
  p.kind = Kind::lorentzian;
  p.scale = scale;
  return p;
}

VelocityProfile VelocityProfile::quartic_gaussian(double a) {
  if (!(a > 0)) throw ConfigError("quartic-gaussian: a must be positive");
  VelocityProfile p;
  p.kind = Kind::quartic_gaussian;
  p.a = a;
  return p;
}

VelocityProfile VelocityProfile::from_poles(PoleSet ps) {
  if (ps.poles.size() != ps.residues.size() || ps.poles.empty())
    throw ConfigError("rational profile: poles and residues must be non-empty and equal length");
  for (cplx p : ps.poles)
    if (p.imag() == 0.0) throw ConfigError("rational profile: pole on the real axis");
  VelocityProfile p;
  p.kind = Kind::rational;
  p.rational = std::move(ps);
  return p;
}

cplx VelocityProfile::value(cplx v) const {
  switch (kind) {
    case Kind::gaussian: {
      cplx u = v / width;
      return std::exp(-u * u) / (width * sqrt_pi);
    }
    case Kind::lorentzian:
      return scale / (1.0 + v * v);
    case Kind::quartic_gaussian: {
      const double c = 4.0 * std::pow(a, 2.5) / (3.0 * sqrt_pi);
      cplx v2 = v * v;
      return c * v2 * v2 * std::exp(-a * v2);
    }
    case Kind::rational: {
      cplx s{};
      for (size_t k = 0; k < rational.poles.size(); ++k)
        s += rational.residues[k] / (v - rational.poles[k]);
      return s;
    }
  }
  return {};
}

cplx VelocityProfile::deriv(cplx v) const {
  switch (kind) {
    case Kind::gaussian: {
      cplx u = v / width;
      return -2.0 * u * std::exp(-u * u) / (width * width * sqrt_pi);
    }
    case Kind::lorentzian: {
      cplx d = 1.0 + v * v;
      return -2.0 * scale * v / (d * d);
    }
    case Kind::quartic_gaussian: {
      const double c = 4.0 * std::pow(a, 2.5) / (3.0 * sqrt_pi);
      cplx v2 = v * v;
      return c * v2 * v * (4.0 - 2.0 * a * v2) * std::exp(-a * v2);
    }
    case Kind::rational: {
      cplx s{};
      for (size_t k = 0; k < rational.poles.size(); ++k) {
        cplx d = v - rational.poles[k];
        s -= rational.residues[k] / (d * d);
      }
      return s;
    }
  }
  return {};
}

VelocityProfile VelocityProfile::conjugate() const {
  VelocityProfile p = *this;
  if (kind == Kind::rational) {
    for (auto& z : p.rational.poles) z = conj_c(z);
    for (auto& r : p.rational.residues) r = conj_c(r);
  }
  return p;
}

PoleSet VelocityProfile::poles() const {
  if (kind == Kind::lorentzian) return {{I, -I}, {-0.5 * I * scale, 0.5 * I * scale}};
  if (kind == Kind::rational) return rational;
  return {};
}

double VelocityProfile::singular_distance() const {
  if (entire()) return std::numeric_limits<double>::infinity();
  double d = std::numeric_limits<double>::infinity();
  for (cplx p : poles().poles) d = std::min(d, std::abs(p.imag()));
  return d;
}

std::string VelocityProfile::name() const {
  switch (kind) {
    case Kind::gaussian: return "gaussian";
    case Kind::lorentzian: return "lorentzian";
    case Kind::quartic_gaussian: return "quartic-gaussian";
    case Kind::rational: return "rational";
  }
  return "?";
}

std::string family_name(Family f) {
  switch (f) {
    case Family::maxwellian: return "maxwellian";
    case Family::lorentzian: return "lorentzian";
    case Family::quartic_gaussian: return "quartic-gaussian";
    case Family::rational: return "user-tabulated-rational";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "maxwellian") return Family::maxwellian;
  if (s == "lorentzian") return Family::lorentzian;
  if (s == "quartic-gaussian" || s == "quartic_gaussian") return Family::quartic_gaussian;
  if (s == "user-tabulated-rational" || s == "rational") return Family::rational;
  throw ConfigError("unknown equilibrium family '" + s + "'");
}

namespace {

double strip_scan(const VelocityProfile& p, double A, double alpha, int grid, int* points) {
  // Real part on a sinh-stretched grid out to |v| = 1e3, imaginary part uniform.
  const int nx = std::max(grid, 8), ny = std::max(grid / 4, 5);
  const double span = std::asinh(1e3);
  double best = 0.0;
  for (int i = 0; i < nx; ++i) {
    double x = std::sinh(span * (2.0 * i / (nx - 1) - 1.0));
    for (int j = 0; j < ny; ++j) {
      double y = A * (2.0 * j / (ny - 1) - 1.0);
      cplx v(x, y);
      best = std::max(best, (1.0 + std::pow(std::abs(v), alpha)) * std::abs(p.value(v)));
    }
  }
  if (points) *points = nx * ny;
  return best;
}

void check_alpha(double alpha) {
  if (!(alpha > 1.0)) throw ConfigError("decay exponent alpha must exceed 1");
  if (std::abs(alpha - 2.0) < 1e-12) throw ConfigError("decay exponent alpha = 2 is excluded");
}

}  // namespace

void EquilibriumSpec::check() const {
  check_alpha(alpha);
  if (!(A > 0)) throw ConfigError("strip half-width A must be positive");
  if (profile.singular_distance() <= A)
    throw ConfigError("equilibrium has a singularity inside the strip |Im v| <= A");
}

namespace {
EquilibriumSpec finish(EquilibriumSpec s) {
  s.check();
  s.B = strip_scan(s.profile, s.A, s.alpha, 100, nullptr);
  return s;
}
}  // namespace

EquilibriumSpec EquilibriumSpec::maxwellian(double A, double alpha) {
  EquilibriumSpec s;
  s.family = Family::maxwellian;
  s.profile = VelocityProfile::gaussian(1.0);
  s.A = A;
  s.alpha = alpha;
  return finish(s);
}

EquilibriumSpec EquilibriumSpec::lorentzian(double scale, double A, double alpha) {
  EquilibriumSpec s;
  s.family = Family::lorentzian;
  s.profile = VelocityProfile::lorentzian(scale);
  s.A = A;
  s.alpha = alpha;
  return finish(s);
}

EquilibriumSpec EquilibriumSpec::quartic_gaussian(double a, double A, double alpha) {
  EquilibriumSpec s;
  s.family = Family::quartic_gaussian;
  s.profile = VelocityProfile::quartic_gaussian(a);
  s.A = A;
  s.alpha = alpha;
  return finish(s);
}

EquilibriumSpec EquilibriumSpec::rational(PoleSet ps, double A, double alpha) {
  EquilibriumSpec s;
  s.family = Family::rational;
  s.profile = VelocityProfile::from_poles(std::move(ps));
  s.A = A;
  s.alpha = alpha;
  return finish(s);
}

double EquilibriumSpec::v_max(double tol) const {
  // tail(V) = mass of |f_e| outside [-V, V]
  auto tail = [&](double V) -> double {
    switch (profile.kind) {
      case VelocityProfile::Kind::gaussian:
        return std::erfc(V / profile.width);
      case VelocityProfile::Kind::quartic_gaussian:
        return 4.0 / (3.0 * sqrt_pi) * boost::math::tgamma(2.5, profile.a * V * V);
      default: {
        double b = B > 0 ? B : 1.0;
        return 2.0 * b * std::pow(V, 1.0 - alpha) / (alpha - 1.0);
      }
    }
  };
  double lo = 1.0, hi = 2.0;
  while (tail(hi) > tol && hi < 1e12) hi *= 2.0;
  if (tail(lo) <= tol) return lo;
  for (int it = 0; it < 100 && hi - lo > 1e-6 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (tail(mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

cplx eval_fe(const EquilibriumSpec& spec, cplx v) {
  strip_check(spec.A, v, "eval_fe");
  return spec.profile.value(v);
}

cplx eval_fe_deriv(const EquilibriumSpec& spec, cplx v) {
  strip_check(spec.A, v, "eval_fe_deriv");
  return spec.profile.deriv(v);
}

void PerturbationSpec::add_cosine(int n, const VelocityProfile& p, cplx c) {
  if (n <= 0) throw ConfigError("perturbation: cosine pairing expects a positive wavenumber");
  modes.push_back({n, p, 0.5 * c});
  modes.push_back({-n, p.conjugate(), 0.5 * std::conj(c)});
}

void PerturbationSpec::check() const {
  check_alpha(alpha);
  if (!(A > 0)) throw ConfigError("perturbation: A must be positive");
  for (const auto& m : modes) {
    if (m.n == 0) throw MeanViolation("perturbation: mode n = 0 violates the zero x-mean");
    if (m.profile.singular_distance() < A)
      throw ConfigError("perturbation: profile singular inside the strip");
  }
}

int PerturbationSpec::max_mode() const {
  int m = 0;
  for (const auto& md : modes) m = std::max(m, std::abs(md.n));
  return m;
}

PerturbationSpec PerturbationSpec::cosine(double eps, int n, const VelocityProfile& p, double A,
                                          double alpha) {
  PerturbationSpec g;
  g.eps = eps;
  g.A = A;
  g.alpha = alpha;
  g.add_cosine(n, p);
  g.check();
  return g;
}

cplx eval_g_mode(const PerturbationSpec& g, int n, cplx v) {
  cplx s{};
  for (const auto& m : g.modes)
    if (m.n == n) s += m.coef * m.profile.value(v);
  return g.eps * s;
}

cplx eval_g_mode_dv(const PerturbationSpec& g, int n, cplx v) {
  cplx s{};
  for (const auto& m : g.modes)
    if (m.n == n) s += m.coef * m.profile.deriv(v);
  return g.eps * s;
}

cplx profile_transform(const VelocityProfile& p, double k, double shift, double tol) {
  if (!p.entire()) {
    // close in the half-plane where e^{-ikv} decays; k = 0 closes upward (f = O(v^-2))
    const PoleSet ps = p.poles();
    cplx s{};
    for (size_t i = 0; i < ps.poles.size(); ++i) {
      const cplx q = ps.poles[i];
      if (k > 0 ? q.imag() < 0 : q.imag() > 0) s += ps.residues[i] * std::exp(cplx(0.0, -k) * q);
    }
    return (k > 0 ? -2.0 : 2.0) * pi * I * s;
  }
  const double off = k > 0 ? -shift : (k < 0 ? shift : 0.0);
  Contour c = off == 0.0 ? Contour::real() : Contour::shifted(off);
  return integrate_line_t([&](cplx v) { return std::exp(cplx(0.0, -k) * v) * p.value(v); }, c, tol)
      .value;
}

cplx mode_transform(const PerturbationSpec& g, int n, double k, double shift, double tol) {
  cplx s{};
  for (const auto& m : g.modes)
    if (m.n == n) s += m.coef * profile_transform(m.profile, k, shift, tol);
  return g.eps * s;
}

cplx eval_g(const PerturbationSpec& g, double x, cplx v) {
  strip_check(g.A, v, "eval_g");
  cplx s{};
  for (const auto& m : g.modes) s += m.coef * m.profile.value(v) * std::polar(1.0, m.n * x);
  return g.eps * s;
}

cplx eval_g_dz(const PerturbationSpec& g, double x, cplx v) {
  strip_check(g.A, v, "eval_g_dz");
  cplx s{};
  for (const auto& m : g.modes)
    s += cplx(0.0, m.n) * m.coef * m.profile.value(v) * std::polar(1.0, m.n * x);
  return g.eps * s;
}

cplx eval_g_dv(const PerturbationSpec& g, double x, cplx v) {
  strip_check(g.A, v, "eval_g_dv");
  cplx s{};
  for (const auto& m : g.modes) s += m.coef * m.profile.deriv(v) * std::polar(1.0, m.n * x);
  return g.eps * s;
}

ValidationReport validate_assumptions(const EquilibriumSpec& spec, int grid) {
  ValidationReport r;
  spec.check();  // alpha <= 1, alpha == 2 are rejected outright
  r.B_scan = strip_scan(spec.profile, spec.A, spec.alpha, grid, &r.strip_points);
  auto q = integrate_line_t([&](cplx w) { return spec.profile.value(w); }, Contour::real(10.0),
                            1e-12);
  r.normalization = q.value.real();
  if (std::abs(r.normalization - 1.0) > 1e-8) {
    r.pass = false;
    r.notes.push_back("normalization off by " + std::to_string(r.normalization - 1.0));
  }
  for (int i = 0; i <= 4000; ++i) {
    double v = -50.0 + 100.0 * i / 4000.0;
    cplx f = spec.profile.value(v);
    if (f.real() < -1e-14 || std::abs(f.imag()) > 1e-12 * (1.0 + std::abs(f))) r.positive = false;
  }
  if (!r.positive) {
    r.pass = false;
    r.notes.push_back("f_e is not real and non-negative on the real axis");
  }
  r.V_max = spec.v_max(1e-10);
  return r;
}

ValidationReport validate_assumptions(const PerturbationSpec& g, int grid) {
  ValidationReport r;
  g.check();
  for (const auto& m : g.modes) {
    int pts = 0;
    r.B_scan = std::max(r.B_scan, strip_scan(m.profile, g.A, g.alpha, grid, &pts));
    r.strip_points += pts;
  }
  if (r.B_scan > 1.0 + 1e-12) {
    r.pass = false;
    r.notes.push_back("profile bound (1+|v|^alpha)|p| = " + std::to_string(r.B_scan) + " > 1");
  }
  for (const auto& m : g.modes) {
    bool paired = false;
    for (const auto& o : g.modes) {
      if (o.n != -m.n) continue;
      bool same = std::abs(o.coef - std::conj(m.coef)) < 1e-14;
      for (double v : {-1.3, 0.0, 0.7, 2.1})
        same = same && std::abs(o.profile.value(v) - std::conj(m.profile.value(v))) <
                           1e-14 * (1.0 + std::abs(m.profile.value(v)));
      paired = paired || same;
    }
    if (!paired) {
      r.pass = false;
      r.notes.push_back("mode " + std::to_string(m.n) + " lacks a conjugate partner");
    }
  }
  r.mean_zero = true;  // enforced by check(): no n = 0 entry
  return r;
}

void to_json(nlohmann::json& j, const VelocityProfile& p) {
  j = nlohmann::json{{"profile", p.name()}};
  switch (p.kind) {
    case VelocityProfile::Kind::gaussian: j["params"] = {{"width", p.width}}; break;
    case VelocityProfile::Kind::lorentzian: j["params"] = {{"scale", p.scale}}; break;
    case VelocityProfile::Kind::quartic_gaussian: j["params"] = {{"a", p.a}}; break;
    case VelocityProfile::Kind::rational: {
      nlohmann::json poles = nlohmann::json::array(), res = nlohmann::json::array();
      for (size_t k = 0; k < p.rational.poles.size(); ++k) {
        poles.push_back({p.rational.poles[k].real(), p.rational.poles[k].imag()});
        res.push_back({p.rational.residues[k].real(), p.rational.residues[k].imag()});
      }
      j["params"] = {{"poles", poles}, {"residues", res}};
      break;
    }
  }
}

namespace {

cplx read_cplx(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or [re, im] pair, got " + j.dump());
}

VelocityProfile profile_from(const std::string& name, const nlohmann::json& params) {
  auto num = [&](const char* key, double def) {
    return params.contains(key) ? params.at(key).get<double>() : def;
  };
  if (name == "gaussian" || name == "maxwellian")
    return VelocityProfile::gaussian(num("width", 1.0));
  if (name == "lorentzian") return VelocityProfile::lorentzian(num("scale", 1.0 / pi));
  if (name == "quartic-gaussian" || name == "quartic_gaussian")
    return VelocityProfile::quartic_gaussian(num("a", 1.0));
  if (name == "rational" || name == "user-tabulated-rational") {
    PoleSet ps;
    if (!params.contains("poles") || !params.contains("residues"))
      throw ConfigError("rational profile requires params.poles and params.residues");
    for (const auto& p : params.at("poles")) ps.poles.push_back(read_cplx(p));
    for (const auto& r : params.at("residues")) ps.residues.push_back(read_cplx(r));
    return VelocityProfile::from_poles(std::move(ps));
  }
  throw ConfigError("unknown velocity profile '" + name + "'");
}

}  // namespace

void from_json(const nlohmann::json& j, VelocityProfile& p) {
  p = profile_from(j.at("profile").get<std::string>(),
                   j.contains("params") ? j.at("params") : nlohmann::json::object());
}

void to_json(nlohmann::json& j, const EquilibriumSpec& s) {
  nlohmann::json pj;
  to_json(pj, s.profile);
  j = nlohmann::json{{"family", family_name(s.family)},
                     {"params", pj["params"]},
                     {"A", s.A},
                     {"alpha", s.alpha},
                     {"B", s.B}};
}

void from_json(const nlohmann::json& j, EquilibriumSpec& s) {
  if (!j.is_object()) throw ConfigError("equilibrium must be a JSON object");
  if (!j.contains("family")) throw ConfigError("equilibrium.family is required");
  Family fam = parse_family(j.at("family").get<std::string>());
  nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
  double A = j.contains("A") ? j.at("A").get<double>() : 0.5;
  switch (fam) {
    case Family::maxwellian:
      s = EquilibriumSpec::maxwellian(A, j.value("alpha", 3.0));
      break;
    case Family::lorentzian:
      s = EquilibriumSpec::lorentzian(params.value("scale", 1.0 / pi), A, j.value("alpha", 1.5));
      break;
    case Family::quartic_gaussian:
      s = EquilibriumSpec::quartic_gaussian(params.value("a", 1.0), A, j.value("alpha", 3.0));
      break;
    case Family::rational: {
      VelocityProfile p = profile_from("rational", params);
      s = EquilibriumSpec::rational(p.rational, A, j.value("alpha", 1.5));
      break;
    }
  }
}

void to_json(nlohmann::json& j, const PerturbationSpec& g) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : g.modes) {
    nlohmann::json mj;
    to_json(mj, m.profile);
    mj["n"] = m.n;
    mj["coef"] = {m.coef.real(), m.coef.imag()};
    modes.push_back(mj);
  }
  j = nlohmann::json{{"eps", g.eps},
                     {"A", g.A},
                     {"alpha", g.alpha},
                     {"pairing", "explicit"},
                     {"modes", modes}};
}

void from_json(const nlohmann::json& j, PerturbationSpec& g) {
  if (!j.is_object()) throw ConfigError("perturbation must be a JSON object");
  g = PerturbationSpec{};
  g.eps = j.value("eps", 0.0);
  g.A = j.value("A", 0.5);
  g.alpha = j.value("alpha", 3.0);
  const std::string pairing = j.value("pairing", std::string("cosine"));
  if (pairing != "cosine" && pairing != "explicit")
    throw ConfigError("perturbation.pairing must be 'cosine' or 'explicit'");
  if (j.contains("modes")) {
    for (const auto& mj : j.at("modes")) {
      if (!mj.contains("n")) throw ConfigError("perturbation mode needs 'n'");
      int n = mj.at("n").get<int>();
      if (n == 0) throw MeanViolation("perturbation: mode n = 0 violates the zero x-mean");
      VelocityProfile p = profile_from(mj.value("profile", std::string("gaussian")),
                                       mj.contains("params") ? mj.at("params")
                                                             : nlohmann::json::object());
      cplx c = mj.contains("coef") ? read_cplx(mj.at("coef")) : cplx(1.0);
      if (pairing == "cosine")
        g.add_cosine(n, p, c);
      else
        g.modes.push_back({n, p, c});
    }
  }
  g.check();
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = nlohmann::json{{"pass", r.pass},          {"B_scan", r.B_scan},
                     {"normalization", r.normalization}, {"positive", r.positive},
                     {"alpha_ok", r.alpha_ok},  {"mean_zero", r.mean_zero},
                     {"V_max", r.V_max},        {"strip_points", r.strip_points},
                     {"notes", r.notes}};
}

}  // namespace landau
