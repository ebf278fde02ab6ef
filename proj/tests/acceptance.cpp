// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "landau/dispersion.hpp"
#include "landau/freestream.hpp"
#include "landau/green_function.hpp"
#include "landau/linear_dynamics.hpp"
#include "landau/nonlinear.hpp"

using namespace landau;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Fit window shared by two amplitude series: [t_from, last t where ref >= 1e-8 of its peak].
std::pair<double, double> common_window(const std::vector<double>& t, const std::vector<double>& ref,
                                        double t_from) {
  const double peak = *std::max_element(ref.begin(), ref.end());
  size_t last = 0;
  for (size_t i = 0; i < t.size(); ++i)
    if (ref[i] >= 1e-8 * peak) last = i;
  return {t_from, t[last]};
}

std::vector<double> mode_amplitude(const std::map<int, std::vector<cplx>>& modes, size_t n) {
  std::vector<double> a(n, 0.0);
  for (const auto& [k, v] : modes)
    for (size_t j = 0; j < n; ++j) a[j] += std::abs(v[j]);
  return a;
}

PerturbationSpec gaussian_mode1(double eps) {
  return PerturbationSpec::cosine(eps, 1, VelocityProfile::gaussian(), 1.0);
}

Outcome lorentzian_roots() {
  auto t0 = std::chrono::steady_clock::now();
  // f_e = 1/(1+v^2): the normalization for which the stated zeros hold
  EquilibriumSpec s = EquilibriumSpec::lorentzian(1.0);
  DispersionReport rep = find_roots(s, SearchRegion::symmetric(1, 10, -2, 10));
  double worst = 0;
  int matched = 0;
  for (const auto& m : rep.modes) {
    const double n = m.n, an = std::abs(m.n);
    std::vector<cplx> want{cplx(-an, std::sqrt(pi) / n), cplx(-an, -std::sqrt(pi) / n)};
    for (const cplx& w : want) {
      double best = 1e300;
      for (const auto& r : m.roots) {
        // eta = i z / |n| for the |n| search, z conjugated for n < 0
        cplx z = -I * an * r.eta;
        if (m.n < 0) z = std::conj(z);
        best = std::min(best, std::abs(z - w));
      }
      worst = std::max(worst, best);
      matched += best < 1e-6;
    }
  }
  const double dt = seconds_since(t0);
  // the 1/pi-normalized profile has no zeros there
  EquilibriumSpec c = EquilibriumSpec::lorentzian(1.0 / pi);
  const double off = std::abs(landau_Q(c, cplx(-1.0, std::sqrt(pi)), 1));
  return {matched == 4 && worst < 1e-6 && dt < 10.0,
          fmt("f_e=1/(1+v^2): 4 zeros of Q_{+-1}, max |z - z*| = %.2e, %.2fs "
              "(with f_e=(1/pi)/(1+v^2): |Q_1(z*)| = %.3f)",
              worst, dt, off)};
}

Outcome maxwellian_stability() {
  auto t0 = std::chrono::steady_clock::now();
  DispersionReport rep = find_roots(EquilibriumSpec::maxwellian(1.0), SearchRegion::symmetric(8));
  const double dt = seconds_since(t0);
  int nonzero = 0;
  for (const auto& m : rep.modes) nonzero += m.winding != 0;
  return {nonzero == 0 && rep.modes.size() == 16 && rep.theta > 0 && dt < 30.0,
          fmt("n=+-1..+-8 windings all 0 (%d nonzero), theta = %.4f, nu0 = %.2f, %.2fs", nonzero,
              rep.theta, rep.nu0, dt)};
}

Outcome quartic_instability() {
  std::string found;
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    EquilibriumSpec s = EquilibriumSpec::quartic_gaussian(a);
    DispersionReport rep = find_roots(s, SearchRegion::symmetric(1));
    for (const auto& m : rep.modes) {
      for (const auto& r : m.roots) {
        if (m.winding >= 1 && r.eta.imag() > 0 && found.empty())
          found = fmt("a=%g n=%d winding %d root eta = %.6f%+.6fi |Phi| = %.1e", a, m.n, m.winding,
                      r.eta.real(), r.eta.imag(), std::abs(landau_Phi(s, r.eta, std::abs(m.n))));
      }
    }
  }
  return {!found.empty(), found.empty() ? "no unstable configuration" : found};
}

Outcome kernel_closed_forms() {
  EquilibriumSpec m = EquilibriumSpec::maxwellian(1.0);
  EquilibriumSpec l = EquilibriumSpec::lorentzian(1.0 / pi);
  double em = 0, el = 0;
  for (double xi : {0.5, 1.0, 2.0, 4.0}) {
    em = std::max(em, std::abs(kernel_K(m, xi) - I * xi * std::exp(-xi * xi / 4)));
    el = std::max(el, std::abs(kernel_K(l, xi) - I * xi * pi * std::exp(-std::abs(xi)) / pi));
  }
  return {em < 1e-9 && el < 1e-9, fmt("max error maxwellian %.1e, lorentzian %.1e", em, el)};
}

Outcome linear_decay() {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  auto g = gaussian_mode1(1e-3);
  SearchRegion reg;
  reg.im_min = phi_depth_limit(s) + 0.01;
  cplx eta;
  if (!dominant_root(s, 1, reg, eta)) return {false, "no dominant root"};
  const double rate = -eta.imag();
  double fit[2];
  int k = 0;
  for (double h : {0.02, 0.01}) {
    LinearRun run = run_linear(s, g, {1}, TimeGrid::from_range(0.0, 30.0, h));
    fit[k++] = run.fits.at(1).gamma;
  }
  const double rel = std::abs(fit[0] - rate) / rate, moved = std::abs(fit[1] - fit[0]) / fit[0];
  return {rel < 0.05 && moved < 0.01,
          fmt("root rate %.6f, fit %.6f (rel %.2e), halving h_t moves fit by %.2e", rate, fit[0],
              rel, moved)};
}

Outcome green_structure() {
  GreenTable T = build_Qz(EquilibriumSpec::maxwellian(1.0), GreenConfig{});
  InvariantReport inv = green_invariants(T);
  SelfSimilarReport ss = selfsimilar_residual(T);
  double lit = 0, cor = 0;
  for (double v : ss.literal) lit = std::max(lit, v);
  for (double v : ss.corrected) cor = std::max(cor, v);
  const bool pass = inv.causality < T.cfg.series_tol && inv.mean < 1e-8 && ss.literal_bounded &&
                    inv.a_fit > 0;
  return {pass, fmt("sup_{t>0}|Q_z| = %.1e (tol %.0e), mean %.1e, sup|Q_z - f_e(z/t)| = %.3f "
                    "(bounded %d; sup|Q_z + f_e(z/t)| = %.3f), a = %.4f",
                    inv.causality, T.cfg.series_tol, inv.mean, lit, int(ss.literal_bounded), cor,
                    inv.a_fit)};
}

Outcome green_solve() {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  const double eps = 1e-3;
  auto g = gaussian_mode1(eps);
  GammaChoice gc = choose_gamma(s, g);
  const double h = 0.01;
  TimeGrid grid{0.0, h, static_cast<int>(std::floor(40.0 / gc.gamma / h)) + 1};
  auto G = std::make_shared<GreenKernel>(s, GreenConfig{});
  ModeResponse R(G, h, grid.n);
  std::map<int, std::vector<cplx>> src;
  for (int n : {1, -1})
    for (int j = 0; j < grid.n; ++j) src[n].push_back(freestream_mode(g, n, grid.t(j)));
  ModeField E = solve_field_modes(R, src, grid, gc.gamma);
  N10aReport res = residual_N10a(s, E, src, 10.0, 1e-4 * eps);
  std::vector<double> t(grid.n);
  for (int j = 0; j < grid.n; ++j) t[j] = grid.t(j);
  auto ah = mode_amplitude(src, grid.n), ae = mode_amplitude(E.e, grid.n);
  auto [ta, tb] = common_window(t, ah, 1.0);
  DecayFit fh = fit_decay(t, ah, ta, tb), fe = fit_decay(t, ae, ta, tb);
  const double target = 0.95 * std::min(fh.gamma, gc.gamma);
  return {res.residual < 1e-4 * eps && fe.gamma >= target,
          fmt("residual/eps = %.2e, fit E %.4f >= 0.95 min(fit h %.4f, gamma %.4f) on [%g, %g]",
              res.residual / eps, fe.gamma, fh.gamma, gc.gamma, ta, tb)};
}

Outcome freestream_forms() {
  auto g = PerturbationSpec::cosine(1.0, 1, VelocityProfile::gaussian(), 1.0);
  double err = 0;
  for (double t = 0; t <= 10.0 + 1e-12; t += 0.25)
    for (double z : uniform_z_grid(16))
      err = std::max(err, std::abs(h_freestream(g, z, t) - std::cos(z) * std::exp(-t * t / 4)));
  auto gl = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::lorentzian(1.0 / pi), 1.0);
  std::vector<double> ts;
  for (int k = 0; k <= 80; ++k) ts.push_back(0.25 * k);
  DecayBoundReport d = check_decay_bound(gl, 0.9, ts);
  return {err < 1e-8 && std::abs(d.fit.gamma - 1.0) <= 0.02,
          fmt("gaussian max error %.1e (eps = 1), lorentzian fitted rate %.5f", err, d.fit.gamma)};
}

struct NonlinearRuns {
  std::vector<double> eps;
  std::vector<FixedPointResult> res;
  std::vector<double> n10a;
  std::unique_ptr<NonlinearContext> ctx;  // eps = 1e-3
  double seconds = 0;
};

NonlinearRuns& nonlinear_runs() {
  static NonlinearRuns R = [] {
    NonlinearRuns r;
    auto t0 = std::chrono::steady_clock::now();
    EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
    for (double eps : {5e-4, 1e-3, 2e-3}) {
      auto ctx = std::make_unique<NonlinearContext>(make_context(s, gaussian_mode1(eps), {}));
      FixedPointResult fp = solve_fixed_point(*ctx);
      Sources src = assemble_sources(*ctx, fp.E);
      N10aReport n = residual_N10a(s, fp.E.as_mode_field(), src.h, 0.5 * ctx->grid.t_end(),
                                   1e-4 * eps);
      r.eps.push_back(eps);
      r.res.push_back(std::move(fp));
      r.n10a.push_back(n.residual);
      if (eps == 1e-3) r.ctx = std::move(ctx);
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return R;
}

Outcome nonlinear_fixed_point() {
  NonlinearRuns& r = nonlinear_runs();
  const FixedPointResult& fp = r.res[1];
  double worst_ratio = 0;
  for (double q : fp.ratios) worst_ratio = std::max(worst_ratio, q);
  double lo = 1e300, hi = 0;
  for (size_t i = 0; i < r.eps.size(); ++i) {
    const double q = r.res[i].E.norm / r.eps[i];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const double spread = hi / lo - 1.0;
  const double last_update = fp.updates.back() / fp.E.norm;
  const bool pass = fp.converged && fp.iterations <= 12 && last_update < 1e-6 &&
                    worst_ratio <= 0.5 && spread < 0.1 && r.n10a[1] < 1e-4 * 1e-3 &&
                    r.seconds < 600;
  return {pass, fmt("%d iterations, last update %.1e, max ratio %.2e, |E|/eps spread %.2e, "
                    "residual/eps %.2e, %.0fs for three amplitudes",
                    fp.iterations, last_update, worst_ratio, spread, r.n10a[1] / 1e-3, r.seconds)};
}

Outcome physical_reconstruction() {
  NonlinearRuns& r = nonlinear_runs();
  std::vector<double> t;
  for (int k = 0; k <= 30; ++k) t.push_back(0.5 * k);
  PhysicalResult ph = reconstruct_physical(r.ctx->spec, r.ctx->g, r.res[1].E, t);
  const double eps = 1e-3;
  const double rel = std::abs(ph.rho_fit.gamma - ph.E_fit.gamma) / std::abs(ph.E_fit.gamma);
  return {ph.gauss_residual < 1e-4 * eps && rel < 0.1 && ph.E_fit.points > 0,
          fmt("sup|rho - E_x|/eps = %.2e, rates rho %.4f E %.4f on [%g, %g] (rel %.2e)",
              ph.gauss_residual / eps, ph.rho_fit.gamma, ph.E_fit.gamma, ph.E_fit.t_a,
              ph.E_fit.t_b, rel)};
}

Outcome vanishing_field() {
  NonlinearRuns& r = nonlinear_runs();
  const NonlinearContext& ctx = *r.ctx;
  FieldIterate Z = FieldIterate::zero(ctx.grid, ctx.cfg.gamma, ctx.cfg.n_max);
  Sources s = assemble_sources(ctx, Z);
  double L = 0, R = 0;
  for (const auto& [n, v] : s.L)
    for (cplx c : v) L = std::max(L, std::abs(c));
  for (const auto& [n, v] : s.R)
    for (cplx c : v) R = std::max(R, std::abs(c));
  FieldIterate T0 = apply_T(ctx, Z);
  ModeField lin = solve_field_modes(*ctx.response, ctx.psi, ctx.grid, ctx.cfg.gamma);
  bool same = lin.e.size() == T0.modes.size();
  for (const auto& [n, v] : lin.e) same = same && T0.modes.count(n) && T0.modes.at(n) == v;
  return {L == 0.0 && R == 0.0 && same,
          fmt("sup|L| = %g, sup|R~| = %g, T(0) == linear solve bitwise: %s", L, R,
              same ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"lorentzian dispersion roots", lorentzian_roots},
      {"maxwellian stability", maxwellian_stability},
      {"quartic-gaussian instability", quartic_instability},
      {"kernel closed forms", kernel_closed_forms},
      {"linear decay cross-check", linear_decay},
      {"fundamental solution structure", green_structure},
      {"green solve correctness", green_solve},
      {"freestream closed forms", freestream_forms},
      {"nonlinear fixed point", nonlinear_fixed_point},
      {"physical reconstruction", physical_reconstruction},
      {"vanishing-field exactness", vanishing_field},
  };
  int failed = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
