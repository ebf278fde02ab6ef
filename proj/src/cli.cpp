#include "landau/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "landau/io.hpp"

namespace landau {

namespace fs = std::filesystem;
using nlohmann::json;

std::string workflow_name(Workflow w) {
  switch (w) {
    case Workflow::stability: return "stability";
    case Workflow::linear: return "linear";
    case Workflow::green: return "green";
    case Workflow::nonlinear: return "nonlinear";
    case Workflow::freestream: return "freestream";
  }
  return "?";
}

Workflow parse_workflow(const std::string& s) {
  for (Workflow w : {Workflow::stability, Workflow::linear, Workflow::green, Workflow::nonlinear,
                     Workflow::freestream})
    if (workflow_name(w) == s) return w;
  throw ConfigError("unknown workflow '" + s + "'");
}

namespace {

void allow_keys(const json& j, const std::string& where, std::set<std::string> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

std::string method_name(PhiOptions::Method m) {
  switch (m) {
    case PhiOptions::Method::quadrature: return "quadrature";
    case PhiOptions::Method::residue: return "residue";
    default: return "automatic";
  }
}

PhiOptions::Method parse_method(const std::string& s) {
  if (s == "automatic") return PhiOptions::Method::automatic;
  if (s == "quadrature") return PhiOptions::Method::quadrature;
  if (s == "residue") return PhiOptions::Method::residue;
  throw ConfigError("stability.phi_method must be automatic, quadrature or residue");
}

// Damping rate of mode n from the dominant root below the axis (growth rate if negative).
double mode_rate(const EquilibriumSpec& spec, int n, const FindOptions& fo) {
  const double depth = -phi_depth_limit(spec, fo.phi);
  const double floor_im = std::isfinite(depth) ? -(depth - 0.01) : -spec.A;
  SearchRegion reg;
  reg.im_min = floor_im;
  reg.im_max = 10.0;
  cplx eta;
  if (dominant_root(spec, std::abs(n), reg, eta, fo)) return -std::abs(n) * eta.imag();
  return std::abs(n) * -floor_im;
}

void prepare_out(const RunConfig& c) {
  fs::create_directories(c.out);
  write_json(c.out / "config.json", to_json(c));
}

// Output stride so that at most `cap` time slices are written.
int stride_for(int n, int cap) { return std::max(1, (n + cap - 1) / cap); }

SpaceTimeField subsample(const SpaceTimeField& f, int stride) {
  std::vector<double> t;
  for (int j = 0; j < f.nt(); j += stride) t.push_back(f.t[j]);
  SpaceTimeField s = SpaceTimeField::zeros(f.nz(), t);
  for (int js = 0, j = 0; j < f.nt(); j += stride, ++js)
    for (int iz = 0; iz < f.nz(); ++iz) {
      s.v(js, iz) = f.v(j, iz);
      s.dv(js, iz) = f.dv(j, iz);
    }
  return s;
}

}  // namespace

RunConfig parse_config(const json& j) {
  try {
    allow_keys(j, "config",
               {"workflow", "equilibrium", "perturbation", "stability", "linear", "freestream",
                "green", "nonlinear", "out", "threads", "seed"});
    RunConfig c;
    if (!j.contains("workflow")) throw ConfigError("config.workflow is required");
    c.workflow = parse_workflow(j.at("workflow").get<std::string>());
    if (!j.contains("equilibrium")) throw ConfigError("config.equilibrium is required");
    allow_keys(j.at("equilibrium"), "equilibrium", {"family", "params", "A", "alpha", "B"});
    from_json(j.at("equilibrium"), c.equilibrium);
    c.equilibrium.check();
    if (j.contains("perturbation")) {
      allow_keys(j.at("perturbation"), "perturbation", {"eps", "A", "alpha", "pairing", "modes"});
      PerturbationSpec g;
      from_json(j.at("perturbation"), g);
      c.perturbation = g;
    }
    if (j.contains("stability")) {
      const json& s = j.at("stability");
      allow_keys(s, "stability",
                 {"n_modes", "re_half", "im_min", "im_max", "edge_points", "nu_step", "phi_method",
                  "tol"});
      c.n_modes = s.value("n_modes", c.n_modes);
      c.re_half = s.value("re_half", c.re_half);
      c.im_max = s.value("im_max", c.im_max);
      c.im_min = s.value("im_min", c.im_min);
      c.find.edge_points = s.value("edge_points", c.find.edge_points);
      c.find.nu_step = s.value("nu_step", c.find.nu_step);
      c.find.phi.tol = s.value("tol", c.find.phi.tol);
      if (s.contains("phi_method")) c.find.phi.method = parse_method(s.at("phi_method"));
      if (c.n_modes < 1 || !(c.re_half > 0) || !(c.im_max > 0) || c.im_min > 0 ||
          c.find.edge_points < 8)
        throw ConfigError("stability: n_modes, re_half, im_max, edge_points out of range");
    }
    if (j.contains("linear")) {
      const json& s = j.at("linear");
      allow_keys(s, "linear", {"modes", "h_t", "t_end", "fit_from", "fit_to", "nz"});
      c.modes = s.value("modes", c.modes);
      c.h_t = s.value("h_t", c.h_t);
      c.t_end = s.value("t_end", c.t_end);
      c.linear.fit_from = s.value("fit_from", c.linear.fit_from);
      c.linear.fit_to = s.value("fit_to", c.linear.fit_to);
      c.linear.nz = s.value("nz", c.linear.nz);
      for (int n : c.modes)
        if (n == 0) throw ConfigError("linear.modes: mode 0 is excluded by the zero mean");
      if (!(c.h_t > 0) || c.t_end < 0 || !(c.linear.fit_to > c.linear.fit_from))
        throw ConfigError("linear: h_t, t_end or fit window out of range");
    }
    if (j.contains("freestream")) {
      const json& s = j.at("freestream");
      allow_keys(s, "freestream", {"times", "t_end", "gamma", "shift", "nz"});
      c.times = s.value("times", c.times);
      c.t_end = s.value("t_end", c.t_end);
      c.gamma_target = s.value("gamma", c.gamma_target);
      c.freestream.shift = s.value("shift", c.freestream.shift);
      c.linear.nz = s.value("nz", c.linear.nz);
      for (double t : c.times)
        if (t < 0) throw ConfigError("freestream.times must be non-negative");
    }
    if (j.contains("green")) {
      allow_keys(j.at("green"), "green",
                 {"nu0", "gamma_prime", "dx", "X", "beta", "psi_tol", "kernel_tol", "series_tol",
                  "kappa_scale", "N_cap", "theta_min", "nz", "t_slices"});
      from_json(j.at("green"), c.green);
    }
    if (j.contains("nonlinear")) {
      json nl = j.at("nonlinear");
      allow_keys(nl, "nonlinear",
                 {"gamma", "T_max", "h", "n_max", "nz", "max_iter", "tol", "t_floor", "mean_tol",
                  "ball", "rtilde", "green", "physical_times"});
      if (nl.contains("physical_times"))
        c.physical_times = nl.at("physical_times").get<std::vector<double>>();
      nl.erase("physical_times");
      if (!nl.contains("green") && j.contains("green")) nl["green"] = j.at("green");
      from_json(nl, c.nonlinear);
    } else {
      c.nonlinear.green = c.green;
    }
    c.out = j.value("out", std::string("out"));
    c.threads = j.value("threads", 0);
    c.seed = j.value("seed", 0u);

    if ((c.workflow == Workflow::freestream || c.workflow == Workflow::nonlinear) &&
        !c.perturbation)
      throw ConfigError("workflow '" + workflow_name(c.workflow) + "' needs a perturbation");

    // materialize defaults that do not need any computation
    if (c.physical_times.empty())
      for (int k = 0; k <= 30; ++k) c.physical_times.push_back(0.5 * k);
    if (c.green.t_slices.empty()) c.green.t_slices = default_green_slices();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema: ") + e.what());
  }
}

RunConfig load_config(const fs::path& path) { return parse_config(read_json(path)); }

json to_json(const RunConfig& c) {
  json eq;
  to_json(eq, c.equilibrium);
  json green, nl;
  to_json(green, c.green);
  to_json(nl, c.nonlinear);
  nl["physical_times"] = c.physical_times;
  json j{{"workflow", workflow_name(c.workflow)},
         {"equilibrium", eq},
         {"stability",
          {{"n_modes", c.n_modes},
           {"re_half", c.re_half},
           {"im_min", c.im_min},
           {"im_max", c.im_max},
           {"edge_points", c.find.edge_points},
           {"nu_step", c.find.nu_step},
           {"phi_method", method_name(c.find.phi.method)},
           {"tol", c.find.phi.tol}}},
         {"linear",
          {{"modes", c.modes},
           {"h_t", c.h_t},
           {"t_end", c.t_end},
           {"fit_from", c.linear.fit_from},
           {"fit_to", c.linear.fit_to},
           {"nz", c.linear.nz}}},
         {"freestream",
          {{"times", c.times},
           {"t_end", c.t_end},
           {"gamma", c.gamma_target},
           {"shift", c.freestream.shift},
           {"nz", c.linear.nz}}},
         {"green", green},
         {"nonlinear", nl},
         {"out", c.out.string()},
         {"threads", c.threads},
         {"seed", c.seed}};
  if (c.perturbation) {
    json p;
    to_json(p, *c.perturbation);
    j["perturbation"] = p;
  }
  return j;
}

int cmd_stability(const RunConfig& c) {
  RunConfig r = c;
  ValidationReport val = validate_assumptions(r.equilibrium);
  r.equilibrium.B = val.B_scan;
  SearchRegion region = SearchRegion::symmetric(r.n_modes, r.re_half, r.im_min, r.im_max);
  prepare_out(r);
  DispersionReport rep = find_roots(r.equilibrium, region, r.find);
  json j;
  to_json(j, rep);
  json v;
  to_json(v, val);
  j["validation"] = v;
  write_json(r.out / "report.json", j);
  std::cout << "verdict: " << rep.verdict << "  theta: " << rep.theta << "  nu0: " << rep.nu0
            << "\n";
  if (rep.verdict == "stable") return 0;
  if (rep.verdict == "unstable") return 2;
  std::cerr << "stability: inconclusive verdict\n";
  return 1;
}

int cmd_linear(const RunConfig& c) {
  RunConfig r = c;
  PerturbationSpec g = r.perturbation.value_or(PerturbationSpec{});
  if (r.modes.empty()) {
    for (const auto& m : g.modes)
      if (m.n > 0) r.modes.push_back(m.n);
    if (r.modes.empty()) r.modes.push_back(1);
  }
  r.linear.exec = Exec::parallel;
  if (!(r.t_end > 0)) {
    double rate = std::numeric_limits<double>::infinity();
    for (int n : r.modes) rate = std::min(rate, std::abs(mode_rate(r.equilibrium, n, r.find)));
    r.t_end = 30.0 / std::max(rate, 0.05);
  }
  prepare_out(r);
  TimeGrid grid = TimeGrid::from_range(0.0, r.t_end, r.h_t);
  LinearRun run = run_linear(r.equilibrium, g, r.modes, grid, r.linear);
  SpaceTimeField E = reconstruct_field(run, r.linear);
  for (const auto& [n, b] : run.b) write_mode_csv(r.out / ("mode_" + std::to_string(n) + ".csv"), b);
  write_field_csv(r.out / "field.csv", E, "E", "E_z");
  json fits = fits_json(run);
  write_json(r.out / "fits.json", fits);
  if (run.growing) std::cout << "linear: growth detected\n";
  return 0;
}

int cmd_freestream(const RunConfig& c) {
  RunConfig r = c;
  const PerturbationSpec& g = *r.perturbation;
  if (!(r.t_end > 0)) r.t_end = 20.0;
  if (r.times.empty())
    for (double t = 0; t <= r.t_end + 1e-12; t += 0.25) r.times.push_back(t);
  if (!(r.gamma_target > 0)) r.gamma_target = 0.9 * g.A;
  prepare_out(r);
  SpaceTimeField H = freestream_field(g, r.linear.nz, r.times, r.freestream);
  write_field_csv(r.out / "H.csv", H, "H", "H_z");
  json dj;
  try {
    DecayBoundReport d = check_decay_bound(g, r.gamma_target, r.times, 32, r.freestream);
    to_json(dj, d);
  } catch (const WindowTooShort& e) {
    dj = json{{"pass", false}, {"error", e.what()}};
  }
  write_json(r.out / "decay.json", dj);
  return 0;
}

int cmd_green(const RunConfig& c) {
  RunConfig r = c;
  r.green.exec = Exec::parallel;
  prepare_out(r);
  GreenTable T = build_Qz(r.equilibrium, r.green);
  save_table(T, r.out);
  InvariantReport inv = green_invariants(T);
  json inv_j{{"causality", inv.causality},
             {"series_tol", T.cfg.series_tol},
             {"causality_pass", inv.causality < T.cfg.series_tol},
             {"mean", inv.mean},
             {"a_fit", inv.a_fit},
             {"gamma_prime", T.gamma_prime},
             {"nu0", T.nu0},
             {"theta", T.theta}};
  std::vector<double> want{-1.0, -0.5, -0.1, -0.02}, have;
  for (double t : want)
    for (double s : T.t)
      if (std::abs(s - t) < 1e-12) have.push_back(t);
  if (have.size() >= 2) {
    SelfSimilarReport ss = selfsimilar_residual(T, have);
    inv_j["selfsimilar"] = {{"t", ss.t},
                            {"literal", ss.literal},
                            {"corrected", ss.corrected},
                            {"corrected_dz", ss.corrected_dz},
                            {"modes", ss.modes},
                            {"literal_bounded", ss.literal_bounded},
                            {"corrected_bounded", ss.corrected_bounded}};
  }
  write_json(r.out / "invariants.json", inv_j);
  return 0;
}

int cmd_nonlinear(const RunConfig& c) {
  RunConfig r = c;
  const PerturbationSpec& g = *r.perturbation;
  r.nonlinear.exec = Exec::parallel;
  NonlinearContext ctx = make_context(r.equilibrium, g, r.nonlinear);
  r.nonlinear = ctx.cfg;
  prepare_out(r);
  FixedPointResult res = solve_fixed_point(ctx);
  json rep;
  to_json(rep, res);
  Sources src = assemble_sources(ctx, res.E);
  const double eps = std::max(std::abs(g.eps), 1e-300);
  try {
    N10aReport n10 = residual_N10a(r.equilibrium, res.E.as_mode_field(), src.h,
                                   0.5 * ctx.grid.t_end(), 1e-4 * eps);
    rep["residual_N10a"] = n10.residual;
    rep["residual_N10a_over_eps"] = n10.residual / eps;
  } catch (const HorizonError& e) {
    rep["residual_N10a_error"] = e.what();
  }
  write_json(r.out / "convergence.json", rep);
  SpaceTimeField E = res.E.field(r.nonlinear.nz);
  write_field_csv(r.out / "iterate.csv", subsample(E, stride_for(E.nt(), 2000)), "E", "E_z");

  PhysicalResult ph = reconstruct_physical(r.equilibrium, g, res.E, r.physical_times);
  write_field_csv(r.out / "rho.csv", ph.rho, "rho", "E_x");
  {
    std::ofstream f(r.out / "f.csv");
    if (!f) throw ConfigError("cannot write f.csv");
    f << "t,x,v,f\n";
    char buf[128];
    for (size_t it = 0; it < ph.t.size(); ++it)
      for (size_t ix = 0; ix < ph.x.size(); ++ix)
        for (size_t iv = 0; iv < ph.v.size(); ++iv) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", ph.t[it], ph.x[ix],
                        ph.v[iv], ph.f_at(static_cast<int>(it), static_cast<int>(ix),
                                          static_cast<int>(iv)));
          f << buf;
        }
  }
  json pj, rf, ef;
  to_json(rf, ph.rho_fit);
  to_json(ef, ph.E_fit);
  pj = json{{"gauss_residual", ph.gauss_residual},
            {"gauss_residual_over_eps", ph.gauss_residual / eps},
            {"rho_fit", rf},
            {"E_fit", ef}};
  write_json(r.out / "physical.json", pj);
  std::cout << "nonlinear: " << (res.converged ? "converged" : "not converged") << " after "
            << res.iterations << " iterations, norm " << res.E.norm << "\n";
  return res.converged ? 0 : 1;
}

int run_workflow(const RunConfig& c) {
  switch (c.workflow) {
    case Workflow::stability: return cmd_stability(c);
    case Workflow::linear: return cmd_linear(c);
    case Workflow::green: return cmd_green(c);
    case Workflow::nonlinear: return cmd_nonlinear(c);
    case Workflow::freestream: return cmd_freestream(c);
  }
  return 1;
}

}  // namespace landau
