#include "landau/nonlinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "landau/dispersion.hpp"
#include "landau/freestream.hpp"
#include "landau/linear_dynamics.hpp"

namespace landau {

namespace {

namespace ode = boost::numeric::odeint;

void lagrange4(double s, const TimeGrid& g, int& i0, double w[4]) {
  double u = (s - g.t0) / g.h;
  int i = static_cast<int>(std::floor(u));
  i0 = std::clamp(i - 1, 0, std::max(0, g.n - 4));
  double x = u - i0;
  w[0] = -(x - 1) * (x - 2) * (x - 3) / 6.0;
  w[1] = x * (x - 2) * (x - 3) / 2.0;
  w[2] = -x * (x - 1) * (x - 3) / 2.0;
  w[3] = x * (x - 1) * (x - 2) / 6.0;
}

// Per-mode exponential continuation beyond the last grid node.
cplx tail_rate(const std::vector<cplx>& v, double h, double gamma) {
  const size_t n = v.size();
  if (n >= 2 && std::abs(v[n - 1]) > 0 && std::abs(v[n - 2]) > 0) {
    cplx lam = std::log(v[n - 1] / v[n - 2]) / h;
    if (lam.real() < 0) return lam;
  }
  return {-std::max(gamma, 1e-3), 0.0};
}

// Field evaluation for the characteristic right-hand side.
struct FastField {
  const FieldIterate* E;
  std::vector<int> ns;
  std::vector<const cplx*> data;
  std::vector<cplx> lam;
  std::vector<double> suffix;  // h sum_{j' >= j} (1 + t) sup|E|, the most the rest can move V or Z
  double T;
  int n_max = 0;

  explicit FastField(const FieldIterate& f) : E(&f), T(f.grid.t_end()) {
    for (const auto& [n, v] : f.modes) {
      ns.push_back(n);
      data.push_back(v.data());
      lam.push_back(tail_rate(v, f.grid.h, f.gamma));
      n_max = std::max(n_max, std::abs(n));
    }
    suffix.assign(f.grid.n + 1, 0.0);
    for (int j = f.grid.n - 1; j >= 0; --j) {
      double env = 0;
      for (const auto& [n, v] : f.modes) env += std::abs(v[j]);
      suffix[j] = suffix[j + 1] + f.grid.h * env * (1.0 + f.grid.t(j));
    }
  }

  // First grid time after which the remaining field moves the endpoints by less than cut.
  double stop_time(double t, double cut) const {
    if (suffix[0] <= cut) return t;
    auto it = std::partition_point(suffix.begin(), suffix.end() - 1,
                                   [&](double v) { return v > cut; });
    const int j = static_cast<int>(it - suffix.begin());
    return std::max(t, E->grid.t(std::min(j, E->grid.n - 1)));
  }
  double dropped(double s_end) const {
    int j = static_cast<int>(std::ceil((s_end - E->grid.t0) / E->grid.h - 1e-9));
    return j >= E->grid.n ? 0.0 : suffix[std::max(j, 0)];
  }

  // Mode amplitudes at time s.
  void amplitudes(double s, cplx* out) const {
    if (s <= T) {
      int i0;
      double w[4];
      lagrange4(s, E->grid, i0, w);
      for (size_t k = 0; k < ns.size(); ++k) {
        const cplx* d = data[k] + i0;
        out[k] = w[0] * d[0] + w[1] * d[1] + w[2] * d[2] + w[3] * d[3];
      }
    } else {
      const int last = E->grid.n - 1;
      for (size_t k = 0; k < ns.size(); ++k) out[k] = data[k][last] * std::exp(lam[k] * (s - T));
    }
  }

  double at(const cplx* amp, double x) const {
    std::array<cplx, 64> pw;
    const int P = std::min(n_max, 63);
    pw[0] = 1.0;
    pw[1] = std::polar(1.0, x);
    for (int p = 2; p <= P; ++p) pw[p] = pw[p - 1] * pw[1];
    double r = 0;
    for (size_t k = 0; k < ns.size(); ++k) {
      const int n = ns[k];
      cplx e = std::abs(n) <= P ? (n >= 0 ? pw[n] : std::conj(pw[-n])) : std::polar(1.0, n * x);
      r += (amp[k] * e).real();
    }
    return r;
  }
};

}  // namespace

FieldIterate FieldIterate::zero(const TimeGrid& grid, double gamma, int n_max) {
  FieldIterate E;
  E.grid = grid;
  E.gamma = gamma;
  for (int n = -n_max; n <= n_max; ++n)
    if (n != 0) E.modes[n].assign(grid.n, cplx{});
  return E;
}

int FieldIterate::n_max() const {
  int m = 0;
  for (const auto& [n, v] : modes) m = std::max(m, std::abs(n));
  return m;
}

bool FieldIterate::is_zero() const {
  for (const auto& [n, v] : modes)
    for (cplx c : v)
      if (c != cplx{}) return false;
  return true;
}

cplx FieldIterate::mode_at(int n, double s) const {
  auto it = modes.find(n);
  if (it == modes.end()) return {};
  const auto& v = it->second;
  if (s > grid.t_end()) {
    cplx lam = tail_rate(v, grid.h, gamma);
    return v.back() * std::exp(lam * (s - grid.t_end()));
  }
  int i0;
  double w[4];
  lagrange4(s, grid, i0, w);
  return w[0] * v[i0] + w[1] * v[i0 + 1] + w[2] * v[i0 + 2] + w[3] * v[i0 + 3];
}

double FieldIterate::E(double z, double s) const {
  double r = 0;
  for (const auto& [n, v] : modes) r += (mode_at(n, s) * std::polar(1.0, n * z)).real();
  return r;
}

double FieldIterate::Ez(double z, double s) const {
  double r = 0;
  for (const auto& [n, v] : modes)
    r += (cplx(0.0, n) * mode_at(n, s) * std::polar(1.0, n * z)).real();
  return r;
}

SpaceTimeField FieldIterate::field(int nz) const {
  std::vector<double> t(grid.n);
  for (int j = 0; j < grid.n; ++j) t[j] = grid.t(j);
  SpaceTimeField f = SpaceTimeField::zeros(nz, t);
  for (int j = 0; j < grid.n; ++j) {
    std::map<int, cplx> c;
    for (const auto& [n, v] : modes) c[n] = v[j];
    Synthesis s = fourier_synthesize(c, f.z);
    for (int iz = 0; iz < nz; ++iz) {
      f.v(j, iz) = s.value[iz].real();
      f.dv(j, iz) = s.dvalue[iz].real();
    }
  }
  return f;
}

ModeField FieldIterate::as_mode_field() const {
  ModeField m;
  m.grid = grid;
  for (const auto& [n, v] : modes) {
    m.e[n] = v;
    auto& ez = m.ez[n];
    ez.resize(v.size());
    for (size_t j = 0; j < v.size(); ++j) ez[j] = cplx(0.0, n) * v[j];
  }
  return m;
}

namespace {

// sup_z (|E| + |E_z|) at every time node of a mode map.
std::vector<double> slice_sups(const std::map<int, std::vector<cplx>>& modes, int nt, int nz) {
  std::vector<double> out(nt, 0.0);
  auto z = uniform_z_grid(nz);
  for (int j = 0; j < nt; ++j) {
    double sup = 0;
    for (int iz = 0; iz < nz; ++iz) {
      double e = 0, ez = 0;
      for (const auto& [n, v] : modes) {
        cplx c = v[j] * std::polar(1.0, n * z[iz]);
        e += c.real();
        ez += (cplx(0.0, n) * c).real();
      }
      sup = std::max(sup, std::abs(e) + std::abs(ez));
    }
    out[j] = sup;
  }
  return out;
}

}  // namespace

double weighted_norm(const FieldIterate& E, int nz) {
  auto sup = slice_sups(E.modes, E.grid.n, nz);
  double r = 0;
  for (int j = 0; j < E.grid.n; ++j) r = std::max(r, std::exp(E.gamma * E.grid.t(j)) * sup[j]);
  return r;
}

double weighted_norm_diff(const FieldIterate& a, const FieldIterate& b, int nz) {
  if (a.grid.n != b.grid.n) throw ConfigError("weighted_norm_diff: grids differ");
  FieldIterate d = a;
  for (auto& [n, v] : d.modes) {
    auto it = b.modes.find(n);
    if (it != b.modes.end())
      for (size_t j = 0; j < v.size(); ++j) v[j] -= it->second[j];
  }
  for (const auto& [n, v] : b.modes)
    if (!d.modes.count(n)) {
      auto& w = d.modes[n];
      w.resize(v.size());
      for (size_t j = 0; j < v.size(); ++j) w[j] = -v[j];
    }
  return weighted_norm(d, nz);
}

DecayFit fit_iterate(const FieldIterate& E, int nz) {
  auto sup = slice_sups(E.modes, E.grid.n, nz);
  std::vector<double> t(E.grid.n);
  for (int j = 0; j < E.grid.n; ++j) t[j] = E.grid.t(j);
  const double peak = *std::max_element(sup.begin(), sup.end());
  if (!(peak > 0)) return DecayFit{};
  int jb = E.grid.n - 1;
  for (int j = 0; j < E.grid.n; ++j)
    if (sup[j] < 1e-10 * peak) {
      jb = j;
      break;
    }
  double tb = std::min(t[jb], 0.5 * E.grid.t_end());
  double ta = std::min(1.0, 0.25 * tb);
  return fit_decay(t, sup, ta, tb);
}

namespace {

CharEntry integrate_one(const FieldIterate& E, const FastField& F, double t, double z, double v,
                        const CharOptions& opt) {
  CharEntry c;
  c.Z_inf = z;
  c.V_inf = v;
  if (E.norm == 0.0 && E.is_zero()) return c;
  const double scale = E.norm > 0 ? E.norm : 1.0;
  const size_t nm = F.ns.size();
  std::vector<cplx> amp(nm);
  const double s_end = F.stop_time(t, opt.cutoff * scale);

  using State = std::array<double, 4>;
  State y{0.0, 0.0, 0.0, 0.0};
  auto rhs = [&](const State& x, State& dx, double s) {
    F.amplitudes(s, amp.data());
    double Ep = F.at(amp.data(), z + x[0] + (v + x[1]) * s);
    double Es = F.at(amp.data(), z + v * s);
    dx[0] = -s * Ep;
    dx[1] = Ep;
    dx[2] = -s * Es;
    dx[3] = Es;
  };
  auto observe = [&](const State& x, double) {
    if (std::abs(x[1]) > 1.0)
      throw BlowUp("characteristics: |V - v| exceeds 1; field outside the perturbative regime");
  };
  if (s_end > t) {
    auto stepper = ode::make_controlled(opt.abs_tol * scale, opt.rel_tol,
                                        ode::runge_kutta_dopri5<State>());
    c.steps = static_cast<int>(
        ode::integrate_adaptive(stepper, rhs, y, t, s_end, 0.05, observe));
  }

  if (s_end < F.T) {
    c.tail = F.dropped(s_end);
  } else if (t < F.T) {
    // fitted exponential continuation beyond the horizon, to first order
    const double T = F.T;
    double dV = 0, dZ = 0;
    for (size_t k = 0; k < nm; ++k) {
      const int n = F.ns[k];
      cplx mu = F.lam[k] + cplx(0.0, n * v);
      cplx a = F.data[k][E.grid.n - 1] * std::polar(1.0, n * (z + v * T));
      dV += (-a / mu).real();
      dZ += (-a * (-T / mu + 1.0 / (mu * mu))).real();
    }
    y[0] += dZ;
    y[1] += dV;
    y[2] += dZ;
    y[3] += dV;
    c.tail = std::abs(dV) + std::abs(dZ);
  }
  c.Z_inf = z + y[0];
  c.V_inf = v + y[1];
  c.dZ1 = y[2];
  c.dV1 = y[3];
  return c;
}

}  // namespace

CharEntry integrate_characteristics(const FieldIterate& E, double t, double z, double v,
                                    const CharOptions& opt) {
  FastField F(E);
  return integrate_one(E, F, t, z, v, opt);
}

CharEndpoints compute_endpoints(const FieldIterate& E, const std::vector<double>& t,
                                const std::vector<double>& z, const std::vector<double>& w,
                                const CharOptions& opt, Exec exec) {
  CharEndpoints ce;
  ce.t = t;
  ce.z = z;
  ce.w = w;
  const long total = static_cast<long>(t.size() * z.size() * w.size());
  ce.entries.resize(total);
  FastField F(E);
  parallel_for(total, exec, [&](long idx) {
    const size_t iw = idx % w.size();
    const size_t iz = (idx / w.size()) % z.size();
    const size_t it = idx / (w.size() * z.size());
    ce.entries[idx] = integrate_one(E, F, t[it], z[iz] - w[iw] * t[it], w[iw], opt);
  });
  for (const auto& e : ce.entries) ce.tail = std::max(ce.tail, e.tail);
  return ce;
}

double source_psi(const PerturbationSpec& g, double z, double t) { return h_freestream(g, z, t); }

LTable::LTable(const PerturbationSpec& g, double h, double tol) : h_(h) {
  if (!(h > 0)) throw ConfigError("LTable: h must be positive");
  for (const auto& m : g.modes)
    if (std::find(g_modes_.begin(), g_modes_.end(), m.n) == g_modes_.end())
      g_modes_.push_back(m.n);
  std::sort(g_modes_.begin(), g_modes_.end());
  const double shift = freestream_shift(g);
  auto ghat = [&](int m, double xi) { return mode_transform(g, m, xi, shift, 1e-14); };
  double peak = 0;
  for (int m : g_modes_) peak = std::max(peak, std::abs(ghat(m, 0.0)));
  xi_max_ = 0;
  if (peak > 0) {
    int small = 0;
    for (double xi = 0.5; xi < 2000 && small < 3; xi += 0.5) {
      double a = 0;
      for (int m : g_modes_) a = std::max({a, std::abs(ghat(m, xi)), std::abs(ghat(m, -xi))});
      small = a < tol * peak ? small + 1 : 0;
      xi_max_ = xi;
    }
  }
  q_max_ = static_cast<long>(std::ceil(xi_max_ / h));
  for (int m : g_modes_) {
    auto& v = table_[m];
    v.resize(2 * q_max_ + 1);
    parallel_for(2 * q_max_ + 1, Exec::parallel,
                 [&](long i) { v[i] = ghat(m, (i - q_max_) * h); });
  }
}

cplx LTable::ghat(int m, long q) const {
  if (q < -q_max_ || q > q_max_) return {};
  auto it = table_.find(m);
  if (it == table_.end()) return {};
  return it->second[q + q_max_];
}

std::map<int, std::vector<cplx>> source_L_modes(const LTable& tab, const FieldIterate& E,
                                                double t_floor, int n_max, Exec exec) {
  const TimeGrid& g = E.grid;
  if (std::abs(g.h - tab.h()) > 1e-12 * g.h) throw ConfigError("source_L: table step differs");
  if (n_max < 0) n_max = E.n_max();
  const int N = g.n;
  const double h = g.h;
  const long qm = tab.q_max();
  std::map<int, std::vector<cplx>> out;
  for (int n = -n_max; n <= n_max; ++n)
    if (n != 0) out[n].assign(N, cplx{});
  for (auto& [n, Ln] : out) {
    for (int m : tab.g_modes()) {
      const int k = n - m;
      auto ek = E.modes.find(k);
      if (k == 0 || ek == E.modes.end()) continue;
      const std::vector<cplx>& Ek = ek->second;
      parallel_for(N, exec, [&](long jl) {
        const int j = static_cast<int>(jl);
        // q = n j - k l must satisfy |q| <= q_max
        double a = (static_cast<double>(n) * j - qm) / k, b = (static_cast<double>(n) * j + qm) / k;
        if (a > b) std::swap(a, b);
        const int lo = std::max(j, static_cast<int>(std::ceil(a)));
        const int hi = std::min(N - 1, static_cast<int>(std::floor(b)));
        const double t = j * h;
        cplx acc{};
        for (int l = lo; l <= hi; ++l) {
          const long q = static_cast<long>(n) * j - static_cast<long>(k) * l;
          const double s = l * h;
          const double xi = q * h;
          cplx wgt;
          if (t >= t_floor)
            wgt = (t - s) * (s / t) * cplx(0.0, k) + (1.0 - s / t) * cplx(0.0, xi);
          else
            wgt = cplx(0.0, n * (t - s));
          cplx term = wgt * tab.ghat(m, q) * Ek[l];
          if (l == j || l == N - 1) term *= 0.5;
          acc += term;
        }
        Ln[j] += h * acc;
      });
    }
  }
  return out;
}

double source_L(const PerturbationSpec& g, const FieldIterate& E, double z, double t,
                double t_floor) {
  const double shift = freestream_shift(g);
  std::vector<double> s{t};
  for (int l = 0; l < E.grid.n; ++l)
    if (E.grid.t(l) > t + 1e-12) s.push_back(E.grid.t(l));
  cplx total{};
  for (const auto& gm : g.modes) {
    const int m = gm.n;
    for (const auto& [k, v] : E.modes) {
      const int n = m + k;
      std::vector<cplx> f(s.size());
      for (size_t i = 0; i < s.size(); ++i) {
        const double xi = m * t + k * (t - s[i]);
        cplx gh = g.eps * gm.coef * profile_transform(gm.profile, xi, shift, 1e-14);
        cplx wgt = t >= t_floor
                       ? (t - s[i]) * (s[i] / t) * cplx(0.0, k) + (1.0 - s[i] / t) * cplx(0.0, xi)
                       : cplx(0.0, n * (t - s[i]));
        f[i] = wgt * gh * E.mode_at(k, s[i]);
      }
      cplx integral{};
      for (size_t i = 0; i + 1 < s.size(); ++i) integral += 0.5 * (s[i + 1] - s[i]) * (f[i] + f[i + 1]);
      total += integral * std::polar(1.0, n * z);
    }
  }
  return total.real();
}

double velocity_cutoff(const EquilibriumSpec& spec, const PerturbationSpec& g, double tol) {
  double W = spec.v_max(tol);
  for (const auto& m : g.modes) {
    EquilibriumSpec p = spec;
    p.profile = m.profile;
    p.alpha = g.alpha;
    p.B = 0.0;
    W = std::max(W, p.v_max(tol));
  }
  return W;
}

namespace {

std::vector<double> w_grid(double W, double dw) {
  const int m = static_cast<int>(std::ceil(W / dw));
  std::vector<double> w;
  for (int k = -m; k <= m; ++k) w.push_back(k * dw);
  return w;
}

// Second-order integrand of R~ at one fan point.
double rtilde_integrand(const EquilibriumSpec& spec, const PerturbationSpec& g, double z0,
                        double w, const CharEntry& e) {
  const double fe_new = spec.profile.value(e.V_inf).real();
  const double fe = spec.profile.value(w).real();
  const double fe_v = spec.profile.deriv(w).real();
  double r = fe_new - fe - fe_v * e.dV1;
  if (!g.empty()) {
    const double g_new = eval_g(g, e.Z_inf, e.V_inf).real();
    const double g0 = eval_g(g, z0, w).real();
    const double gz = eval_g_dz(g, z0, w).real();
    const double gw = eval_g_dv(g, z0, w).real();
    r += g_new - g0 - gz * e.dZ1 - gw * e.dV1;
  }
  return r;
}

}  // namespace

double source_Rtilde(const EquilibriumSpec& spec, const PerturbationSpec& g,
                     const CharEndpoints& ends, int it, int iz) {
  const size_t nw = ends.w.size();
  const double dw = nw > 1 ? ends.w[1] - ends.w[0] : 1.0;
  double acc = 0;
  for (size_t iw = 0; iw < nw; ++iw) {
    const double w = ends.w[iw];
    double f = rtilde_integrand(spec, g, ends.z[iz] - w * ends.t[it], w, ends.at(it, iz, iw));
    acc += (iw == 0 || iw + 1 == nw ? 0.5 : 1.0) * f;
  }
  return dw * acc;
}

double source_Rtilde(const EquilibriumSpec& spec, const PerturbationSpec& g,
                     const FieldIterate& E, double z, double t, const RtildeOptions& opt) {
  const double W = opt.W > 0 ? opt.W : velocity_cutoff(spec, g, opt.w_tol);
  CharEndpoints ends = compute_endpoints(E, {t}, {z}, w_grid(W, opt.dw), opt.chars, Exec::serial);
  return source_Rtilde(spec, g, ends, 0, 0);
}

RtildeSamples source_Rtilde_samples(const EquilibriumSpec& spec, const PerturbationSpec& g,
                                    const FieldIterate& E, const RtildeOptions& opt, Exec exec) {
  RtildeSamples r;
  double T_R = opt.T_R;
  if (!(T_R > 0)) {
    const double gam = std::max(E.gamma, 1e-3);
    T_R = 0;
    while (T_R < E.grid.t_end() && (T_R + 1) * (T_R + 1) * std::exp(-2 * gam * T_R) > opt.tail_tol)
      T_R += opt.dt;
  }
  T_R = std::min(T_R, E.grid.t_end());
  r.T_R = T_R;
  for (double t = 0; t <= T_R + 1e-12; t += opt.dt) r.t.push_back(t);
  const int nz = opt.nz;
  auto z = uniform_z_grid(nz);
  const double W = opt.W > 0 ? opt.W : velocity_cutoff(spec, g, opt.w_tol);
  CharEndpoints ends = compute_endpoints(E, r.t, z, w_grid(W, opt.dw), opt.chars, exec);
  const int n_max = nz / 2 - 1;
  for (int n = -n_max; n <= n_max; ++n) r.modes[n].assign(r.t.size(), cplx{});
  std::vector<double> row(nz);
  for (size_t it = 0; it < r.t.size(); ++it) {
    for (int iz = 0; iz < nz; ++iz) {
      row[iz] = source_Rtilde(spec, g, ends, static_cast<int>(it), iz);
      r.sup = std::max(r.sup, std::abs(row[iz]));
    }
    auto c = fourier_project(row, n_max);
    for (auto& [n, v] : c) r.modes[n][it] = v;
    r.mean = std::max(r.mean, std::abs(c[0]));
    if (it + 1 == r.t.size())
      for (double v : row) r.tail = std::max(r.tail, std::abs(v));
  }
  if (T_R >= E.grid.t_end()) r.tail = 0.0;
  return r;
}

std::map<int, std::vector<cplx>> interpolate_modes(const RtildeSamples& r, const TimeGrid& grid,
                                                   int n_max) {
  std::map<int, std::vector<cplx>> out;
  const int nc = static_cast<int>(r.t.size());
  TimeGrid coarse{r.t.front(), nc > 1 ? r.t[1] - r.t[0] : 1.0, nc};
  for (int n = -n_max; n <= n_max; ++n) {
    auto& v = out[n];
    v.assign(grid.n, cplx{});
    auto it = r.modes.find(n);
    if (it == r.modes.end()) continue;
    const auto& c = it->second;
    for (int j = 0; j < grid.n; ++j) {
      const double t = grid.t(j);
      if (t > r.T_R + 1e-12) break;
      if (nc < 4) {
        v[j] = c[std::min(nc - 1, static_cast<int>(std::lround((t - coarse.t0) / coarse.h)))];
        continue;
      }
      int i0;
      double w[4];
      lagrange4(t, coarse, i0, w);
      v[j] = w[0] * c[i0] + w[1] * c[i0 + 1] + w[2] * c[i0 + 2] + w[3] * c[i0 + 3];
    }
  }
  return out;
}

GammaChoice choose_gamma(const EquilibriumSpec& spec, const PerturbationSpec& g, Exec exec) {
  GammaChoice c;
  FindOptions fo;
  fo.exec = exec;
  const double depth = -phi_depth_limit(spec, fo.phi);
  const double floor_im = std::isfinite(depth) ? -(depth - 0.01) : -spec.A;
  c.gamma_linear = std::numeric_limits<double>::infinity();
  const int nm = std::max(1, g.max_mode());
  for (int n = 1; n <= nm; ++n) {
    SearchRegion reg;
    reg.im_min = floor_im;
    reg.im_max = 10.0;
    cplx eta;
    double rate = n * -floor_im;
    if (dominant_root(spec, n, reg, eta, fo)) {
      if (eta.imag() > 0)
        throw MarginError("choose_gamma: growing mode " + std::to_string(n));
      rate = n * -eta.imag();
    }
    c.gamma_linear = std::min(c.gamma_linear, rate);
  }
  // Freestream rate: fitted decay of sup |H|, capped by the analyticity width of g.
  c.gamma_H = g.A;
  if (!g.empty()) {
    std::vector<double> t, sup;
    for (double s = 0.0; s <= 20.0 + 1e-12; s += 0.25) {
      double m = 0;
      for (int n = 1; n <= g.max_mode(); ++n) m += 2 * std::abs(freestream_mode(g, n, s));
      t.push_back(s);
      sup.push_back(m);
    }
    DecayFit f = fit_decay(t, sup, 1.0, 20.0);
    c.gamma_H = std::min(g.A, f.gamma);
  }
  c.gamma = std::min(0.9 * c.gamma_linear, 0.9 * c.gamma_H);
  return c;
}

NonlinearContext make_context(const EquilibriumSpec& spec, const PerturbationSpec& g,
                              NonlinearConfig cfg) {
  spec.check();
  g.check();
  if (g.max_mode() > cfg.n_max)
    throw ConfigError("nonlinear: perturbation mode exceeds the kept field modes");
  if (!(cfg.h > 0) || cfg.max_iter < 1 || !(cfg.tol > 0))
    throw ConfigError("nonlinear: h, max_iter, tol must be positive");
  NonlinearContext ctx;
  ctx.spec = spec;
  ctx.g = g;
  if (!(cfg.gamma > 0)) cfg.gamma = choose_gamma(spec, g, cfg.exec).gamma;
  if (!(cfg.T_max > 0)) cfg.T_max = 40.0 / cfg.gamma;
  cfg.green.exec = cfg.exec;
  ctx.grid = TimeGrid{0.0, cfg.h, static_cast<int>(std::floor(cfg.T_max / cfg.h + 1e-9)) + 1};
  ctx.kernel = std::make_shared<GreenKernel>(spec, cfg.green);
  cfg.green.nu0 = ctx.kernel->nu0();
  cfg.green.gamma_prime = ctx.kernel->gamma_prime();
  ctx.cfg = cfg;
  ctx.response = std::make_shared<ModeResponse>(ctx.kernel, cfg.h, ctx.grid.n);
  ctx.ltab = std::make_shared<LTable>(g, cfg.h);
  for (int n = -cfg.n_max; n <= cfg.n_max; ++n) {
    if (n == 0) continue;
    auto& v = ctx.psi[n];
    v.resize(ctx.grid.n);
    parallel_for(ctx.grid.n, cfg.exec,
                 [&](long j) { v[j] = g.empty() ? cplx{} : freestream_mode(g, n, ctx.grid.t(j)); });
  }
  return ctx;
}

Sources assemble_sources(const NonlinearContext& ctx, const FieldIterate& E) {
  Sources s;
  const int nm = ctx.cfg.n_max;
  s.psi = ctx.psi;
  s.L = source_L_modes(*ctx.ltab, E, ctx.cfg.t_floor, nm, ctx.cfg.exec);
  RtildeSamples rs = source_Rtilde_samples(ctx.spec, ctx.g, E, ctx.cfg.rtilde, ctx.cfg.exec);
  s.R = interpolate_modes(rs, ctx.grid, nm);
  s.R_tail = rs.tail;
  s.mean_dropped = rs.mean;
  if (rs.mean > ctx.cfg.mean_tol)
    throw MeanViolation("apply_T: source z-mean " + std::to_string(rs.mean) +
                        " exceeds the tolerance");
  for (int n = -nm; n <= nm; ++n) {
    if (n == 0) continue;
    auto& h = s.h[n];
    h.resize(ctx.grid.n);
    for (int j = 0; j < ctx.grid.n; ++j) h[j] = s.psi[n][j] + s.L[n][j] + s.R[n][j];
  }
  return s;
}

FieldIterate apply_T(const NonlinearContext& ctx, const FieldIterate& E, ApplyReport* report) {
  Sources s = assemble_sources(ctx, E);
  ModeField mf = solve_field_modes(*ctx.response, s.h, ctx.grid, ctx.cfg.gamma, ctx.cfg.exec);
  FieldIterate out;
  out.grid = ctx.grid;
  out.gamma = ctx.cfg.gamma;
  out.iteration = E.iteration + 1;
  out.modes = std::move(mf.e);
  out.norm = weighted_norm(out, ctx.cfg.nz);
  try {
    out.fit = fit_iterate(out, ctx.cfg.nz);
  } catch (const WindowTooShort&) {
  }
  if (report) {
    ApplyReport r;
    for (const auto& [n, v] : s.L)
      for (cplx c : v) r.L_sup = std::max(r.L_sup, std::abs(c));
    for (const auto& [n, v] : s.R)
      for (cplx c : v) r.R_sup = std::max(r.R_sup, std::abs(c));
    r.mean_dropped = s.mean_dropped;
    r.tail = std::max(mf.tail_bound, s.R_tail);
    *report = r;
  }
  return out;
}

FixedPointResult solve_fixed_point(const NonlinearContext& ctx) {
  FixedPointResult res;
  FieldIterate E = FieldIterate::zero(ctx.grid, ctx.cfg.gamma, ctx.cfg.n_max);
  double prev_update = 0;
  int outside = 0;
  for (int k = 0; k < ctx.cfg.max_iter; ++k) {
    ApplyReport rep;
    FieldIterate next = apply_T(ctx, E, &rep);
    res.steps.push_back(rep);
    res.norms.push_back(next.norm);
    if (k == 0) res.ball = ctx.cfg.ball > 0 ? ctx.cfg.ball : 2.0 * next.norm;
    const double upd = weighted_norm_diff(next, E, ctx.cfg.nz);
    res.updates.push_back(upd);
    if (k > 0 && prev_update > 0) {
      const double ratio = upd / prev_update;
      res.ratios.push_back(ratio);
      if (ratio > 0.9)
        res.warnings.push_back("iteration " + std::to_string(k + 1) + ": contraction ratio " +
                               std::to_string(ratio));
    }
    prev_update = upd;
    outside = next.norm > res.ball ? outside + 1 : 0;
    if (outside >= 2) throw Divergence("fixed point: iterates left the ball twice in a row");
    const bool done = k > 0 && upd < ctx.cfg.tol * E.norm;
    E = std::move(next);
    res.iterations = k + 1;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.E = std::move(E);
  return res;
}

PhysicalResult reconstruct_physical(const EquilibriumSpec& spec, const PerturbationSpec& g,
                                    const FieldIterate& E, const std::vector<double>& t, int nx,
                                    double dv, const CharOptions& opt, Exec exec) {
  PhysicalResult r;
  r.t = t;
  r.x = uniform_z_grid(nx);
  r.v = w_grid(velocity_cutoff(spec, g, 1e-12), dv);
  CharEndpoints ends = compute_endpoints(E, t, r.x, r.v, opt, exec);
  const size_t nv = r.v.size();
  r.f.resize(t.size() * nx * nv);
  r.rho = SpaceTimeField::zeros(nx, t);
  std::vector<double> sup_rho(t.size(), 0.0), sup_E(t.size(), 0.0);
  for (size_t it = 0; it < t.size(); ++it) {
    for (int ix = 0; ix < nx; ++ix) {
      double rho = 0;
      for (size_t iv = 0; iv < nv; ++iv) {
        const CharEntry& e = ends.at(static_cast<int>(it), ix, static_cast<int>(iv));
        double f = spec.profile.value(e.V_inf).real();
        double dg = g.empty() ? 0.0 : eval_g(g, e.Z_inf, e.V_inf).real();
        r.f[(it * nx + ix) * nv + iv] = f + dg;
        double wt = (iv == 0 || iv + 1 == nv) ? 0.5 : 1.0;
        rho += wt * (f - spec.profile.value(r.v[iv]).real() + dg);
      }
      rho *= dv;
      const double Ex = E.Ez(r.x[ix], t[it]);
      r.rho.v(static_cast<int>(it), ix) = rho;
      r.rho.dv(static_cast<int>(it), ix) = Ex;
      r.gauss_residual = std::max(r.gauss_residual, std::abs(rho - Ex));
      sup_rho[it] = std::max(sup_rho[it], std::abs(rho));
      sup_E[it] = std::max(sup_E[it], std::abs(E.E(r.x[ix], t[it])));
    }
  }
  // common window for both fits: from the peak of |E| down to 1e-8 of it, above the noise floor
  if (!t.empty()) {
    const size_t peak = std::max_element(sup_E.begin(), sup_E.end()) - sup_E.begin();
    size_t last = peak;
    while (last + 1 < t.size() && sup_E[last + 1] >= 1e-8 * sup_E[peak]) ++last;
    if (last - peak + 1 >= 8) {
      r.rho_fit = fit_decay(t, sup_rho, t[peak], t[last]);
      r.E_fit = fit_decay(t, sup_E, t[peak], t[last]);
    }
  }
  return r;
}

void to_json(nlohmann::json& j, const NonlinearConfig& c) {
  nlohmann::json green;
  to_json(green, c.green);
  j = nlohmann::json{{"gamma", c.gamma},
                     {"T_max", c.T_max},
                     {"h", c.h},
                     {"n_max", c.n_max},
                     {"nz", c.nz},
                     {"max_iter", c.max_iter},
                     {"tol", c.tol},
                     {"t_floor", c.t_floor},
                     {"mean_tol", c.mean_tol},
                     {"ball", c.ball},
                     {"rtilde",
                      {{"dt", c.rtilde.dt},
                       {"T_R", c.rtilde.T_R},
                       {"tail_tol", c.rtilde.tail_tol},
                       {"nz", c.rtilde.nz},
                       {"dw", c.rtilde.dw},
                       {"W", c.rtilde.W},
                       {"w_tol", c.rtilde.w_tol},
                       {"abs_tol", c.rtilde.chars.abs_tol},
                       {"rel_tol", c.rtilde.chars.rel_tol},
                       {"cutoff", c.rtilde.chars.cutoff}}},
                     {"green", green}};
}

void from_json(const nlohmann::json& j, NonlinearConfig& c) {
  if (!j.is_object()) throw ConfigError("nonlinear config must be a JSON object");
  NonlinearConfig d;
  c.gamma = j.value("gamma", d.gamma);
  c.T_max = j.value("T_max", d.T_max);
  c.h = j.value("h", d.h);
  c.n_max = j.value("n_max", d.n_max);
  c.nz = j.value("nz", d.nz);
  c.max_iter = j.value("max_iter", d.max_iter);
  c.tol = j.value("tol", d.tol);
  c.t_floor = j.value("t_floor", d.t_floor);
  c.mean_tol = j.value("mean_tol", d.mean_tol);
  c.ball = j.value("ball", d.ball);
  c.rtilde = d.rtilde;
  if (j.contains("rtilde")) {
    const auto& r = j.at("rtilde");
    c.rtilde.dt = r.value("dt", d.rtilde.dt);
    c.rtilde.T_R = r.value("T_R", d.rtilde.T_R);
    c.rtilde.tail_tol = r.value("tail_tol", d.rtilde.tail_tol);
    c.rtilde.nz = r.value("nz", d.rtilde.nz);
    c.rtilde.dw = r.value("dw", d.rtilde.dw);
    c.rtilde.W = r.value("W", d.rtilde.W);
    c.rtilde.w_tol = r.value("w_tol", d.rtilde.w_tol);
    c.rtilde.chars.abs_tol = r.value("abs_tol", d.rtilde.chars.abs_tol);
    c.rtilde.chars.rel_tol = r.value("rel_tol", d.rtilde.chars.rel_tol);
    c.rtilde.chars.cutoff = r.value("cutoff", d.rtilde.chars.cutoff);
  }
  c.green = d.green;
  if (j.contains("green")) from_json(j.at("green"), c.green);
  if (!(c.h > 0) || c.n_max < 1 || c.nz < 4 || c.max_iter < 1 || !(c.tol > 0) ||
      !(c.rtilde.dt > 0) || !(c.rtilde.dw > 0) || c.rtilde.nz < 4)
    throw ConfigError("nonlinear config: non-positive grid or iteration parameter");
}

void to_json(nlohmann::json& j, const FixedPointResult& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"L_sup", s.L_sup},
                     {"R_sup", s.R_sup},
                     {"mean_dropped", s.mean_dropped},
                     {"tail", s.tail}});
  nlohmann::json fit;
  to_json(fit, r.E.fit);
  j = nlohmann::json{{"converged", r.converged},
                     {"iterations", r.iterations},
                     {"norms", r.norms},
                     {"updates", r.updates},
                     {"ratios", r.ratios},
                     {"ball", r.ball},
                     {"gamma", r.E.gamma},
                     {"T_max", r.E.grid.t_end()},
                     {"final_norm", r.E.norm},
                     {"fit", fit},
                     {"steps", steps},
                     {"warnings", r.warnings}};
}

}  // namespace landau
