#include "landau/freestream.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "landau/linear_dynamics.hpp"

namespace landau {

double freestream_shift(const PerturbationSpec& g, const FreestreamOptions& opt) {
  double lim = g.A;
  for (const auto& m : g.modes) lim = std::min(lim, m.profile.singular_distance());
  const double margin = std::min(0.05, 0.1 * lim);
  if (opt.shift > 0) {
    if (opt.shift > lim) throw StripViolation("freestream: contour shift exceeds the strip");
    return std::min(opt.shift, lim - margin);
  }
  return lim - margin;
}

cplx freestream_mode(const PerturbationSpec& g, int n, double t, const FreestreamOptions& opt) {
  if (t < 0) throw ConfigError("h_freestream: t must be non-negative");
  if (g.empty()) return {};
  return mode_transform(g, n, n * t, freestream_shift(g, opt), opt.tol);
}

double h_freestream(const PerturbationSpec& g, double z, double t, const FreestreamOptions& opt) {
  std::set<int> ns;
  for (const auto& m : g.modes) ns.insert(m.n);
  cplx s{};
  for (int n : ns) s += freestream_mode(g, n, t, opt) * std::polar(1.0, n * z);
  return s.real();
}

SpaceTimeField freestream_field(const PerturbationSpec& g, int nz, const std::vector<double>& t,
                                const FreestreamOptions& opt) {
  SpaceTimeField f = SpaceTimeField::zeros(nz, t);
  std::set<int> ns;
  for (const auto& m : g.modes) ns.insert(m.n);
  parallel_for(static_cast<long>(t.size()), opt.exec, [&](long j) {
    std::map<int, cplx> c;
    for (int n : ns) c[n] = freestream_mode(g, n, t[j], opt);
    Synthesis syn = fourier_synthesize(c, f.z);
    for (int iz = 0; iz < nz; ++iz) {
      f.v(j, iz) = syn.value[iz].real();
      f.dv(j, iz) = syn.dvalue[iz].real();
    }
  });
  return f;
}

DecayBoundReport check_decay_bound(const PerturbationSpec& g, double gamma,
                                   const std::vector<double>& t, int nz,
                                   const FreestreamOptions& opt) {
  DecayBoundReport r;
  r.gamma_target = gamma;
  r.t = t;
  if (gamma >= g.A) throw ConfigError("check_decay_bound: target rate must be below A");
  SpaceTimeField H = freestream_field(g, nz, t, opt);
  r.sup.assign(t.size(), 0.0);
  for (int j = 0; j < H.nt(); ++j)
    for (int iz = 0; iz < nz; ++iz) r.sup[j] = std::max(r.sup[j], std::abs(H.v(j, iz)));
  if (std::all_of(r.sup.begin(), r.sup.end(), [](double v) { return v == 0.0; })) {
    r.pass = true;
    r.C = 0.0;
    return r;
  }
  r.fit = fit_decay(t, r.sup, t.front(), t.back());
  const double scale = g.eps != 0.0 ? g.eps : 1.0;
  r.C = r.fit.C * std::exp(r.fit.residual) / scale;
  bool envelope_ok = true;
  for (size_t j = 0; j < t.size(); ++j)
    envelope_ok = envelope_ok && r.sup[j] <= r.C * scale * std::exp(-gamma * t[j]) * (1 + 1e-12);
  r.pass = r.fit.gamma >= gamma && envelope_ok;
  return r;
}

void to_json(nlohmann::json& j, const DecayBoundReport& r) {
  nlohmann::json fj;
  to_json(fj, r.fit);
  j = nlohmann::json{{"pass", r.pass}, {"gamma_target", r.gamma_target}, {"fit", fj}, {"C", r.C}};
}

}  // namespace landau
