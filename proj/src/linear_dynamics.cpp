#include "landau/linear_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "landau/dispersion.hpp"

namespace landau {

namespace {
double shift_for(const PerturbationSpec& g0, const LinearOptions& opt) {
  return opt.source_shift > 0 ? opt.source_shift : 0.9 * g0.A;
}
}  // namespace

cplx source_G_n(const PerturbationSpec& g0, int n, double t, const LinearOptions& opt) {
  if (n == 0) throw ConfigError("source_G_n: n must be nonzero");
  if (g0.empty()) return {};
  return mode_transform(g0, n, n * t, shift_for(g0, opt), opt.kernel_tol);
}

std::vector<cplx> mode_kernel(const EquilibriumSpec& spec, int n, const TimeGrid& grid,
                              const LinearOptions& opt) {
  std::vector<cplx> k(grid.n);
  PhiOptions po;
  po.tol = opt.kernel_tol;
  parallel_for(grid.n, opt.exec, [&](long j) { k[j] = kernel_K(spec, n * j * grid.h, po); });
  return k;
}

ModeSeries evolve_mode(const EquilibriumSpec& spec, const PerturbationSpec& g0, int n,
                       const TimeGrid& grid, const LinearOptions& opt) {
  if (n == 0) throw ConfigError("evolve_mode: n must be nonzero");
  std::vector<cplx> G(grid.n);
  parallel_for(grid.n, opt.exec, [&](long j) { G[j] = source_G_n(g0, n, grid.t(j), opt); });
  ModeSeries out = volterra_solve_sampled(mode_kernel(spec, n, grid, opt), G, cplx(0.0, n), grid);
  out.n = n;
  return out;
}

ModeSeries fundamental_B_n(const EquilibriumSpec& spec, int n, const TimeGrid& grid,
                           const LinearOptions& opt) {
  if (n == 0) throw ConfigError("fundamental_B_n: n must be nonzero");
  std::vector<cplx> k = mode_kernel(spec, n, grid, opt);
  ModeSeries B = volterra_resolvent([&](double tau) {
    return k[static_cast<size_t>(std::lround(tau / grid.h))];
  }, cplx(0.0, n), grid);
  B.n = n;
  return B;
}

LinearRun run_linear(const EquilibriumSpec& spec, const PerturbationSpec& g0,
                     std::vector<int> modes, const TimeGrid& grid, const LinearOptions& opt) {
  LinearRun run;
  run.spec = spec;
  run.g0 = g0;
  run.grid = grid;
  if (modes.empty()) {
    std::set<int> s;
    for (const auto& m : g0.modes) s.insert(m.n);
    modes.assign(s.begin(), s.end());
  }
  run.modes = modes;
  std::vector<ModeSeries> out(modes.size());
  for (size_t i = 0; i < modes.size(); ++i) out[i] = evolve_mode(spec, g0, modes[i], grid, opt);
  for (size_t i = 0; i < modes.size(); ++i) run.b[modes[i]] = std::move(out[i]);
  reconstruct_field(run, opt);
  return run;
}

SpaceTimeField reconstruct_field(LinearRun& run, const LinearOptions& opt) {
  const TimeGrid& g = run.grid;
  std::vector<double> t(g.n);
  for (int j = 0; j < g.n; ++j) t[j] = g.t(j);
  SpaceTimeField E = SpaceTimeField::zeros(opt.nz, t);
  parallel_for(g.n, opt.exec, [&](long j) {
    std::map<int, cplx> c;
    for (const auto& [n, s] : run.b) c[n] = s.values[j];
    Synthesis syn = fourier_synthesize(c, E.z);
    for (int iz = 0; iz < E.nz(); ++iz) {
      E.v(j, iz) = syn.value[iz].real();
      E.dv(j, iz) = syn.dvalue[iz].real();
    }
  });
  const double ta = g.t0 + opt.fit_from * (g.t_end() - g.t0);
  const double tb = g.t0 + opt.fit_to * (g.t_end() - g.t0);
  run.fits.clear();
  run.growing = false;
  bool nonzero = false;
  for (const auto& [n, s] : run.b) {
    bool any = std::any_of(s.values.begin(), s.values.end(), [](cplx v) { return v != 0.0; });
    nonzero = nonzero || any;
    if (!any) continue;
    DecayFit f = fit_decay(s, ta, tb);
    run.fits[n] = f;
    if (f.gamma < 0) run.growing = true;
  }
  if (nonzero) {
    std::vector<double> sup(g.n, 0.0);
    for (int j = 0; j < g.n; ++j)
      for (int iz = 0; iz < E.nz(); ++iz) sup[j] = std::max(sup[j], std::abs(E.v(j, iz)));
    run.global_fit = fit_decay(t, sup, ta, tb);
  } else {
    run.global_fit = DecayFit{};
  }
  run.E = E;
  return run.E;
}

void to_json(nlohmann::json& j, const DecayFit& f) {
  j = nlohmann::json{{"C", f.C},           {"gamma", f.gamma},       {"residual", f.residual},
                     {"t_a", f.t_a},       {"t_b", f.t_b},           {"points", f.points},
                     {"envelope", f.envelope}};
}

nlohmann::json fits_json(const LinearRun& run) {
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& [n, f] : run.fits) {
    nlohmann::json fj;
    to_json(fj, f);
    fj["growing"] = f.gamma < 0;
    modes[std::to_string(n)] = fj;
  }
  nlohmann::json gj;
  to_json(gj, run.global_fit);
  return nlohmann::json{{"modes", modes}, {"sup_E", gj}, {"growing", run.growing},
                        {"grid", {{"t0", run.grid.t0}, {"h", run.grid.h}, {"n", run.grid.n}}}};
}

}  // namespace landau
