#include "landau/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "landau/numerics.hpp"

namespace landau {

namespace {

bool is_rational(const EquilibriumSpec& s) { return !s.profile.entire(); }

double base_delta(const EquilibriumSpec& s, const PhiOptions& o) {
  return o.delta > 0 ? o.delta : default_delta(s);
}

// Keeps the continued contour at least this far below eta.
double contour_gap(const EquilibriumSpec& s, const PhiOptions& o) { return 0.5 * base_delta(s, o); }

bool use_residues(const EquilibriumSpec& s, const PhiOptions& o) {
  if (o.method == PhiOptions::Method::residue) {
    if (!is_rational(s)) throw ConfigError("residue evaluation requires a rational family");
    return true;
  }
  return o.method == PhiOptions::Method::automatic && is_rational(s);
}

}  // namespace

double default_delta(const EquilibriumSpec& spec) { return 0.5 * spec.A; }

double phi_depth_limit(const EquilibriumSpec& spec, const PhiOptions& opt) {
  if (is_rational(spec)) return -std::numeric_limits<double>::infinity();
  return -(spec.A - contour_gap(spec, opt));
}

cplx kernel_K(const EquilibriumSpec& spec, double xi, const PhiOptions& opt) {
  // pole profiles: K = i xi f^(xi) by residues
  if (!spec.profile.entire() && opt.method != PhiOptions::Method::quadrature)
    return I * xi * profile_transform(spec.profile, xi, 0.0);
  if (xi == 0.0) {
    // int f_e' = 0 exactly for every admissible f_e
    auto q = integrate_line_t([&](cplx w) { return spec.profile.deriv(w); },
                              Contour::real(opt.half_length), opt.tol);
    return q.value;
  }
  const double d = base_delta(spec, opt);
  const double off = xi > 0 ? -d : d;
  auto q = integrate_line_t(
      [&](cplx w) { return std::exp(cplx(0.0, -xi) * w) * spec.profile.deriv(w); },
      Contour::shifted(off, opt.half_length), opt.tol);
  return q.value;
}

namespace {

// int over R - i*dp of f'(w)/(w - eta), minus residues of poles the contour crossed.
cplx phi_integral_upper(const EquilibriumSpec& spec, cplx eta, const PhiOptions& opt) {
  const double d = base_delta(spec, opt), gap = contour_gap(spec, opt);
  double dp = std::max(d, -eta.imag() + gap);
  PoleSet ps = spec.profile.poles();
  if (!is_rational(spec)) {
    if (dp > spec.A * (1.0 + 1e-12))
      throw StripViolation("landau_Phi: Im eta = " + std::to_string(eta.imag()) +
                           " is below the continuation limit " +
                           std::to_string(phi_depth_limit(spec, opt)));
  } else {
    for (int guard = 0; guard < 8; ++guard) {
      bool close = false;
      for (cplx p : ps.poles)
        if (p.imag() < 0 && std::abs(dp + p.imag()) < 0.5 * gap) close = true;
      if (!close) break;
      dp += gap;
    }
  }
  auto q = integrate_line_t([&](cplx w) { return spec.profile.deriv(w) / (w - eta); },
                            Contour::shifted(-dp, opt.half_length), opt.tol);
  cplx v = q.value;
  for (size_t k = 0; k < ps.poles.size(); ++k) {
    cplx p = ps.poles[k];
    if (p.imag() < 0 && -p.imag() < dp) v -= 2.0 * pi * I * ps.residues[k] / ((p - eta) * (p - eta));
  }
  return v;
}

cplx phi_residue_upper(const EquilibriumSpec& spec, cplx eta) {
  PoleSet ps = spec.profile.poles();
  cplx v{};
  for (size_t k = 0; k < ps.poles.size(); ++k) {
    cplx p = ps.poles[k];
    if (p.imag() < 0) v -= 2.0 * pi * I * ps.residues[k] / ((p - eta) * (p - eta));
  }
  return v;
}

}  // namespace

cplx landau_Phi(const EquilibriumSpec& spec, cplx eta, int n, const PhiOptions& opt) {
  if (n == 0) throw ConfigError("landau_Phi: n must be nonzero");
  const double n2 = static_cast<double>(n) * n;
  if (use_residues(spec, opt)) {
    for (cplx p : spec.profile.poles().poles)
      if (p.imag() < 0 && std::abs(eta - p) < 1e-12)
        throw PoleOnContour("landau_Phi: eta at a pole of the continuation");
    return phi_residue_upper(spec, eta) - n2;
  }
  return phi_integral_upper(spec, eta, opt) - n2;
}

cplx landau_Phi_lower(const EquilibriumSpec& spec, cplx eta, int n, const PhiOptions& opt) {
  // f_e is real on the real axis, so the lower branch is the reflection of the upper one.
  return std::conj(landau_Phi(spec, std::conj(eta), n, opt));
}

cplx landau_Q(const EquilibriumSpec& spec, cplx z, int n, const PhiOptions& opt) {
  if (n == 0) throw ConfigError("landau_Q: n must be nonzero");
  if (n < 0) return std::conj(landau_Q(spec, std::conj(z), -n, opt));
  return -(I / static_cast<double>(n)) * landau_Phi(spec, I * z / static_cast<double>(n), n, opt);
}

cplx landau_Q_direct(const EquilibriumSpec& spec, cplx z, int n, double tol) {
  if (n == 0) throw ConfigError("landau_Q_direct: n must be nonzero");
  const double dn = n;
  if (std::abs(z.real()) < 1e-6)
    throw PoleOnContour("landau_Q_direct: z on the imaginary axis");
  auto q = integrate_line_t(
      [&](cplx v) {
        cplx d = z / dn + I * v;
        return spec.profile.value(v) / (d * d);
      },
      Contour::real(), tol);
  return I * (dn + q.value / dn);
}

cplx psi_pm(const EquilibriumSpec& spec, cplx eta, int sign, double delta, double tol) {
  if (sign != 1 && sign != -1) throw ConfigError("psi_pm: sign must be +1 or -1");
  if (!(delta > 0)) throw ConfigError("psi_pm: delta must be positive");
  if (delta > spec.A * (1.0 + 1e-12))
    throw StripViolation("psi_pm: contour offset exceeds the strip half-width");
  if (eta.imag() + delta < 1e-6)
    throw PoleOnContour("psi_pm: eta within 1e-6 of (or beyond) the contour");
  if (sign > 0) {
    auto q = integrate_line_t([&](cplx w) { return spec.profile.deriv(w) / (eta + w); },
                              Contour::shifted(delta), tol);
    return q.value;
  }
  auto q = integrate_line_t([&](cplx w) { return spec.profile.deriv(w) / (eta - w); },
                            Contour::shifted(-delta), tol);
  return q.value;
}

SearchRegion SearchRegion::symmetric(int n_modes, double re_half, double im_min, double im_max) {
  SearchRegion r;
  r.re_min = -re_half;
  r.re_max = re_half;
  r.im_min = im_min;
  r.im_max = im_max;
  for (int n = 1; n <= n_modes; ++n) {
    r.modes.push_back(n);
    r.modes.push_back(-n);
  }
  return r;
}

void SearchRegion::check() const {
  if (!(re_max > re_min) || !(im_max > im_min))
    throw ConfigError("search region: empty rectangle");
  if (!(im_max > 0)) throw ConfigError("search region: im_max must be positive");
  for (int n : modes)
    if (n == 0) throw ConfigError("search region: mode 0 is not a dispersion mode");
}

namespace {

struct Rect {
  double x0, x1, y0, y1;
};

struct BoundaryTrouble : std::exception {};

// Argument-principle winding of F along the rectangle boundary.
int winding(const std::function<cplx(cplx)>& F, const Rect& r, int edge_points, int max_subdiv,
            int* evals) {
  const cplx c[5] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}, {r.x0, r.y0}};
  double total = 0.0;
  int count = 0;
  std::function<void(cplx, cplx, cplx, cplx, int)> seg = [&](cplx a, cplx b, cplx fa, cplx fb,
                                                            int depth) {
    double d = std::arg(fb / fa);
    if (std::abs(d) <= pi / 3) {
      total += d;
      return;
    }
    if (depth >= max_subdiv)
      throw WindingAmbiguity("argument increment " + std::to_string(d) +
                             " exceeds pi/3 after maximum subdivision near eta = (" +
                             std::to_string(a.real()) + ", " + std::to_string(a.imag()) + ")");
    cplx m = 0.5 * (a + b);
    cplx fm = F(m);
    ++count;
    if (std::abs(fm) == 0.0) throw BoundaryTrouble{};
    seg(a, m, fa, fm, depth + 1);
    seg(m, b, fm, fb, depth + 1);
  };
  for (int e = 0; e < 4; ++e) {
    cplx prev_pt = c[e];
    cplx prev = F(prev_pt);
    ++count;
    for (int k = 1; k <= edge_points; ++k) {
      cplx pt = c[e] + (c[e + 1] - c[e]) * (static_cast<double>(k) / edge_points);
      cplx fv = F(pt);
      ++count;
      if (std::abs(fv) == 0.0 || std::abs(prev) == 0.0) throw BoundaryTrouble{};
      seg(prev_pt, pt, prev, fv, 0);
      prev_pt = pt;
      prev = fv;
    }
  }
  if (evals) *evals += count;
  double w = total / (2.0 * pi);
  double rw = std::round(w);
  if (std::abs(w - rw) > 0.05)
    throw WindingAmbiguity("non-integer winding " + std::to_string(w));
  return static_cast<int>(rw);
}

int poles_in(const EquilibriumSpec& spec, const Rect& r) {
  if (!is_rational(spec)) return 0;
  int k = 0;
  for (cplx p : spec.profile.poles().poles)
    if (p.imag() < 0 && p.real() > r.x0 && p.real() < r.x1 && p.imag() > r.y0 && p.imag() < r.y1)
      ++k;
  return k;
}

bool pole_near_edge(const EquilibriumSpec& spec, const Rect& r, double tol) {
  if (!is_rational(spec)) return false;
  for (cplx p : spec.profile.poles().poles) {
    if (p.imag() >= 0) continue;
    bool in_x = p.real() >= r.x0 - tol && p.real() <= r.x1 + tol;
    bool in_y = p.imag() >= r.y0 - tol && p.imag() <= r.y1 + tol;
    if (in_x && (std::abs(p.imag() - r.y0) < tol || std::abs(p.imag() - r.y1) < tol)) return true;
    if (in_y && (std::abs(p.real() - r.x0) < tol || std::abs(p.real() - r.x1) < tol)) return true;
  }
  return false;
}

cplx derivative(const std::function<cplx(cplx)>& F, cplx z) {
  const double h = 1e-4 * std::max(1.0, std::abs(z));
  cplx dr = F(z + h) - F(z - h);
  cplx di = F(z + I * h) - F(z - I * h);
  return (dr - I * di) / (4.0 * h);
}

struct ModeSearch {
  const EquilibriumSpec& spec;
  const FindOptions& opt;
  std::function<cplx(cplx)> F;
  int evals = 0;

  int zeros(const Rect& r, int* wind = nullptr) {
    int w = winding(F, r, opt.edge_points, opt.max_subdiv, &evals);
    if (wind) *wind = w;
    return w + 2 * poles_in(spec, r);
  }

  bool newton(cplx z0, const Rect& r, DispersionRoot& out) {
    cplx z = z0;
    try {
      for (int it = 0; it < opt.newton_iter; ++it) {
        cplx fz = F(z);
        if (std::abs(fz) < opt.newton_tol) break;
        cplx d = derivative(F, z);
        if (std::abs(d) == 0.0) return false;
        cplx step = fz / d;
        // damp wild steps so iterates stay near the cell
        double lim = 2.0 * std::max(r.x1 - r.x0, r.y1 - r.y0);
        if (std::abs(step) > lim) step *= lim / std::abs(step);
        z -= step;
      }
      out.eta = z;
      out.residual = std::abs(F(z));
    } catch (const Error&) {
      return false;
    }
    const double m = 1e-9;
    return out.residual < opt.accept_residual && z.real() >= r.x0 - m && z.real() <= r.x1 + m &&
           z.imag() >= r.y0 - m && z.imag() <= r.y1 + m;
  }

  void locate(const Rect& r, int count, int depth, std::vector<DispersionRoot>& roots) {
    if (count <= 0) return;
    const double size = std::max(r.x1 - r.x0, r.y1 - r.y0);
    if (count == 1 || size < 1e-3 || depth > 20) {
      DispersionRoot rt;
      if (newton(cplx(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)), r, rt)) {
        roots.push_back(rt);
        if (count == 1) return;
      }
      if (size < 1e-3 || depth > 20) return;
    }
    // Off-centre split keeps symmetric roots and poles away from cell edges.
    for (double frac : {0.5137, 0.4621, 0.5419}) {
      double xm = r.x0 + frac * (r.x1 - r.x0), ym = r.y0 + frac * (r.y1 - r.y0);
      Rect sub[4] = {{r.x0, xm, r.y0, ym}, {xm, r.x1, r.y0, ym}, {xm, r.x1, ym, r.y1},
                     {r.x0, xm, ym, r.y1}};
      bool bad = false;
      int counts[4];
      try {
        for (int k = 0; k < 4; ++k) {
          if (pole_near_edge(spec, sub[k], 1e-3 * size)) throw BoundaryTrouble{};
          counts[k] = zeros(sub[k]);
        }
      } catch (const BoundaryTrouble&) {
        bad = true;
      } catch (const WindingAmbiguity&) {
        bad = true;
      }
      if (bad) continue;
      for (int k = 0; k < 4; ++k) locate(sub[k], counts[k], depth + 1, roots);
      return;
    }
  }
};

void dedupe(std::vector<DispersionRoot>& roots) {
  std::vector<DispersionRoot> out;
  for (const auto& r : roots) {
    bool dup = false;
    for (const auto& o : out) dup = dup || std::abs(o.eta - r.eta) < 1e-7;
    if (!dup) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const DispersionRoot& a, const DispersionRoot& b) {
    if (a.eta.imag() != b.eta.imag()) return a.eta.imag() > b.eta.imag();
    return a.eta.real() < b.eta.real();
  });
  roots = out;
}

}  // namespace

ModeReport analyze_mode(const EquilibriumSpec& spec, int n, SearchRegion region,
                        const FindOptions& opt) {
  region.check();
  if (region.im_min < phi_depth_limit(spec, opt.phi))
    throw ConfigError("search region reaches Im eta = " + std::to_string(region.im_min) +
                      ", below the continuation limit " +
                      std::to_string(phi_depth_limit(spec, opt.phi)));
  ModeSearch ms{spec, opt, [&spec, n, &opt](cplx eta) { return landau_Phi(spec, eta, n, opt.phi); }};
  ModeReport mr;
  mr.n = n;
  Rect r{region.re_min, region.re_max, region.im_min, region.im_max};
  // Auto-perturb the rectangle if a zero or pole sits on its boundary.
  for (int attempt = 0;; ++attempt) {
    try {
      if (pole_near_edge(spec, r, 1e-3)) throw BoundaryTrouble{};
      mr.zeros = ms.zeros(r, &mr.winding);
      break;
    } catch (const BoundaryTrouble&) {
    } catch (const WindingAmbiguity&) {
      if (attempt >= 3) throw;
    }
    if (attempt >= 3) throw WindingAmbiguity("boundary still degenerate after perturbation");
    const double s = 3e-3 * (attempt + 1);
    double y0 = r.y0 - s;
    if (y0 < phi_depth_limit(spec, opt.phi)) y0 = r.y0 + s;
    r = {r.x0 - s, r.x1 + s, y0, r.y1 + s};
  }
  mr.poles_inside = poles_in(spec, r);
  ms.locate(r, mr.zeros, 0, mr.roots);
  dedupe(mr.roots);
  // Roots closer than 1e-3 to the boundary make the count fragile: retry on a shifted box.
  for (const auto& rt : mr.roots) {
    double d = std::min({rt.eta.real() - r.x0, r.x1 - rt.eta.real(), rt.eta.imag() - r.y0,
                         r.y1 - rt.eta.imag()});
    if (d < 1e-3) {
      Rect r2{r.x0 - 5e-3, r.x1 + 5e-3, r.y0 - 5e-3, r.y1 + 5e-3};
      if (r2.y0 < phi_depth_limit(spec, opt.phi)) r2.y0 = r.y0 + 5e-3;
      mr.zeros = ms.zeros(r2, &mr.winding);
      mr.poles_inside = poles_in(spec, r2);
      mr.roots.clear();
      ms.locate(r2, mr.zeros, 0, mr.roots);
      dedupe(mr.roots);
      break;
    }
  }
  mr.boundary_points = ms.evals;
  return mr;
}

namespace {

// Zero count of Phi(.;n) (all n share |n|) in [re] x [-nu, im_max].
bool zero_free_to_depth(const EquilibriumSpec& spec, const SearchRegion& region,
                        const std::vector<int>& abs_modes, double nu, const FindOptions& opt) {
  SearchRegion sub = region;
  sub.im_min = -nu;
  bool ok = true;
  std::vector<int> z(abs_modes.size(), 0);
  parallel_for(static_cast<long>(abs_modes.size()), opt.exec, [&](long i) {
    FindOptions o = opt;
    ModeSearch ms{spec, o, [&](cplx eta) { return landau_Phi(spec, eta, abs_modes[i], opt.phi); }};
    Rect r{sub.re_min, sub.re_max, sub.im_min, sub.im_max};
    try {
      z[i] = ms.zeros(r);
    } catch (const BoundaryTrouble&) {
      z[i] = 1;
    } catch (const WindingAmbiguity&) {
      z[i] = 1;
    }
  });
  for (int v : z) ok = ok && v == 0;
  return ok;
}

}  // namespace

DispersionReport find_roots(const EquilibriumSpec& spec, const SearchRegion& region,
                            const FindOptions& opt) {
  region.check();
  DispersionReport rep;
  rep.region = region;
  rep.delta = base_delta(spec, opt.phi);
  rep.V_max = spec.v_max(1e-10);

  std::vector<int> abs_modes;
  {
    std::set<int> s;
    for (int n : region.modes) s.insert(std::abs(n));
    abs_modes.assign(s.begin(), s.end());
  }
  // Phi depends on n only through n^2, so one search per |n| serves both signs.
  std::vector<ModeReport> per_abs(abs_modes.size());
  std::vector<int> upper_zeros(abs_modes.size(), 0);
  SearchRegion upper = region;
  upper.im_min = std::max(region.im_min, 0.0);
  parallel_for(static_cast<long>(abs_modes.size()), opt.exec, [&](long i) {
    per_abs[i] = analyze_mode(spec, abs_modes[i], region, opt);
    if (region.im_min < 0.0) {
      ModeReport up = analyze_mode(spec, abs_modes[i], upper, opt);
      upper_zeros[i] = up.zeros;
    } else {
      upper_zeros[i] = per_abs[i].zeros;
    }
  });

  // nu0: deepest depth (0.05 steps) with no zeros in [re] x [-nu0, im_max].
  // Pointless once the upper half-plane has zeros.
  bool upper_found = false;
  for (int z : upper_zeros) upper_found = upper_found || z > 0;
  const double gap = contour_gap(spec, opt.phi);
  const double nu_cap = spec.A - gap;
  rep.nu0 = 0.0;
  if (opt.scan_nu0 && !upper_found) {
    int k_max = static_cast<int>(std::floor(nu_cap / opt.nu_step + 1e-9));
    for (int k = k_max; k >= 1; --k) {
      double nu = k * opt.nu_step;
      rep.nu_tested.push_back(nu);
      if (zero_free_to_depth(spec, region, abs_modes, nu, opt)) {
        rep.nu0 = nu;
        break;
      }
    }
  }

  // theta: grid minimum of |1 - psi_{sign n}(eta)/(|n| n)| over [re] x [-nu0, im_max].
  const double dpsi = std::min(rep.nu0 + gap, spec.A);
  const int nx = opt.theta_nx, ny = opt.theta_ny;
  const double y0 = -rep.nu0 + 1e-3 * (rep.nu0 > 0 ? 1.0 : 0.0);
  std::vector<cplx> psi_p(static_cast<size_t>(nx) * ny), psi_m(psi_p.size());
  parallel_for(static_cast<long>(psi_p.size()), opt.exec, [&](long idx) {
    int ix = static_cast<int>(idx % nx), iy = static_cast<int>(idx / nx);
    double x = region.re_min + (region.re_max - region.re_min) * ix / (nx - 1);
    double y = y0 + (region.im_max - y0) * iy / (ny - 1);
    cplx eta(x, y);
    psi_p[idx] = psi_pm(spec, eta, +1, dpsi);
    psi_m[idx] = psi_pm(spec, eta, -1, dpsi);
  });

  rep.theta = std::numeric_limits<double>::infinity();
  for (int n : region.modes) {
    size_t i = std::find(abs_modes.begin(), abs_modes.end(), std::abs(n)) - abs_modes.begin();
    ModeReport mr = per_abs[i];
    mr.n = n;
    const double denom = static_cast<double>(std::abs(n)) * n;
    const auto& psi = n > 0 ? psi_p : psi_m;
    double th = std::numeric_limits<double>::infinity();
    for (cplx p : psi) th = std::min(th, std::abs(1.0 - p / denom));
    mr.theta = th;
    rep.theta = std::min(rep.theta, th);
    rep.modes.push_back(mr);
  }

  bool any_upper = false, confirmed_upper = false;
  for (size_t i = 0; i < abs_modes.size(); ++i) {
    if (upper_zeros[i] > 0) any_upper = true;
    for (const auto& rt : per_abs[i].roots)
      if (rt.eta.imag() > 0) confirmed_upper = true;
  }
  if (any_upper && !confirmed_upper && region.im_min < 0) {
    // roots of the upper count may lie in the lower part of the searched box
    for (size_t i = 0; i < abs_modes.size() && !confirmed_upper; ++i) {
      ModeReport up = analyze_mode(spec, abs_modes[i], upper, opt);
      for (const auto& rt : up.roots) confirmed_upper = confirmed_upper || rt.eta.imag() > 0;
    }
  }
  if (!any_upper && rep.theta > 0)
    rep.verdict = "stable";
  else if (any_upper && confirmed_upper)
    rep.verdict = "unstable";
  else
    rep.verdict = "inconclusive";
  rep.notes.push_back("theta is the minimum over the tested modes and the sampled region only");
  if (upper_found)
    rep.notes.push_back("zero-free depth not scanned: zeros in the upper half-plane");
  else if (rep.nu0 == 0.0 && opt.scan_nu0)
    rep.notes.push_back("no zero-free depth found among the tested candidates");
  return rep;
}

bool dominant_root(const EquilibriumSpec& spec, int n, const SearchRegion& region, cplx& eta,
                   const FindOptions& opt) {
  ModeReport mr = analyze_mode(spec, n, region, opt);
  if (mr.roots.empty()) return false;
  eta = mr.roots.front().eta;  // sorted by descending imaginary part
  return true;
}

void to_json(nlohmann::json& j, const DispersionReport& r) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : r.modes) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& rt : m.roots) roots.push_back({rt.eta.real(), rt.eta.imag(), rt.residual});
    modes.push_back({{"n", m.n},
                     {"winding", m.winding},
                     {"poles_inside", m.poles_inside},
                     {"zeros", m.zeros},
                     {"roots", roots},
                     {"theta", m.theta}});
  }
  j = nlohmann::json{
      {"region",
       {{"re", {r.region.re_min, r.region.re_max}}, {"im", {r.region.im_min, r.region.im_max}}}},
      {"modes", modes},
      {"verdict", r.verdict},
      {"theta", r.theta},
      {"nu0", r.nu0},
      {"nu_tested", r.nu_tested},
      {"delta", r.delta},
      {"V_max", r.V_max},
      {"notes", r.notes}};
}

}  // namespace landau
