#include "landau/green_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "landau/dispersion.hpp"
#include "landau/io.hpp"

namespace landau {

namespace {

constexpr double two_pi = 2.0 * pi;

// sinh-stretched abscissae: fine near the origin, sparse in the 1/eta^4 tails
struct StretchedGrid {
  std::vector<double> x, w;
};

StretchedGrid stretched(double X, double du, double L = 20.0) {
  StretchedGrid g;
  const double U = L * std::asinh(X / L);
  const int m = static_cast<int>(std::ceil(U / du));
  const double step = U / m;
  for (int k = -m; k <= m; ++k) {
    double u = k * step;
    g.x.push_back(L * std::sinh(u / L));
    double wt = step * std::cosh(u / L);
    if (k == -m || k == m) wt *= 0.5;
    g.w.push_back(wt);
  }
  return g;
}

PsiLine make_line(const EquilibriumSpec& spec, double y, double delta, const StretchedGrid& g,
                  double m0, double beta, double tol, Exec exec) {
  PsiLine line;
  line.y = y;
  line.delta = delta;
  line.x = g.x;
  line.w = g.w;
  const size_t nk = g.x.size();
  line.plus.resize(nk);
  line.minus.resize(nk);
  line.sub.resize(nk);
  parallel_for(static_cast<long>(nk), exec, [&](long k) {
    cplx eta(g.x[k], y);
    line.plus[k] = psi_pm(spec, eta, +1, delta, tol);
    line.minus[k] = psi_pm(spec, eta, -1, delta, tol);
    cplx d = eta + I * beta;
    line.sub[k] = m0 * m0 / (d * d * d * d);
  });
  return line;
}

// int over the whole line of e^{i kappa eta} m0^2/(eta + i beta)^4 (pole below the line)
cplx subtracted_integral(double kappa, double m0, double beta) {
  if (kappa >= 0.0) return {};
  return -(pi / 3.0) * m0 * m0 * kappa * kappa * kappa * std::exp(kappa * beta);
}

}  // namespace

GreenKernel::GreenKernel(const EquilibriumSpec& spec, GreenConfig cfg)
    : spec_(spec), cfg_(std::move(cfg)) {
  if (cfg_.nu0 > 0) {
    nu0_ = cfg_.nu0;
  } else {
    FindOptions fo;
    fo.exec = cfg_.exec;
    DispersionReport rep = find_roots(spec_, SearchRegion::symmetric(2, 10.0, 0.0, 10.0), fo);
    if (rep.verdict != "stable")
      throw MarginError("green kernel requires a stable equilibrium (verdict " + rep.verdict + ")");
    nu0_ = rep.nu0;
    if (!(nu0_ > 0)) throw MarginError("green kernel: no zero-free depth below the real axis");
  }
  const double delta = default_delta(spec_);
  gamma_prime_ = cfg_.gamma_prime > 0 ? cfg_.gamma_prime : 0.8 * std::min(nu0_, delta);
  if (!(cfg_.beta > gamma_prime_)) throw ConfigError("green kernel: beta must exceed gamma'");
  const double dpsi = 0.5 * (gamma_prime_ + spec_.A);

  m0_ = integrate_line_t([&](cplx v) { return spec_.profile.value(v); }, Contour::real(),
                         1e-13)
            .value.real();

  StretchedGrid g = stretched(cfg_.X, cfg_.dx);
  down_ = make_line(spec_, -gamma_prime_, dpsi, g, m0_, cfg_.beta, cfg_.psi_tol, cfg_.exec);

  theta_ = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < down_.x.size(); ++k) {
    theta_ = std::min(theta_, std::abs(1.0 - down_.plus[k]));
    theta_ = std::min(theta_, std::abs(1.0 + down_.minus[k]));
  }
  if (theta_ < cfg_.theta_min)
    throw MarginError("green kernel: |1 - psi/(|n|n)| = " + std::to_string(theta_) +
                      " on the Omega contour");

  // |n t| cutoff: Omega decays like e^{-gamma' kappa}, K like its own tail.
  const double kO = std::log(1.0 / cfg_.series_tol) / gamma_prime_;
  double kK = 1.0;
  int small = 0;
  for (double xi = 1.0; xi < 1e4 && small < 3; xi += 1.0) {
    small = std::abs(K(xi)) < cfg_.series_tol ? small + 1 : 0;
    kK = xi;
  }
  kappa_cut_ = cfg_.kappa_scale * std::max(kO, kK);
}

void GreenKernel::ensure_up() const {
  if (up_) return;
  StretchedGrid g = stretched(cfg_.X, cfg_.dx);
  up_ = std::make_unique<PsiLine>(
      make_line(spec_, gamma_prime_, 0.5 * (gamma_prime_ + spec_.A), g, m0_, cfg_.beta,
                cfg_.psi_tol, cfg_.exec));
}

cplx GreenKernel::K(double xi) const {
  PhiOptions po;
  po.tol = cfg_.kernel_tol;
  return kernel_K(spec_, xi, po);
}

cplx GreenKernel::omega_on(const PsiLine& line, int n, double t) const {
  const double N = static_cast<double>(std::abs(n)) * n;
  const double kappa = std::abs(n) * t;
  const auto& psi = n > 0 ? line.plus : line.minus;
  cplx acc{};
  for (size_t k = 0; k < psi.size(); ++k) {
    cplx p = psi[k];
    cplx S = p * p / (1.0 - p / N);
    cplx eta(line.x[k], line.y);
    acc += line.w[k] * std::exp(I * kappa * eta) * (S - line.sub[k]);
  }
  return (acc + subtracted_integral(kappa, m0_, cfg_.beta)) / N;
}

cplx GreenKernel::omega(int n, double t) const {
  if (n == 0) throw ConfigError("omega: n must be nonzero");
  if (t > 0) {
    ensure_up();
    return omega_on(*up_, n, t);
  }
  return omega_on(down_, n, t);
}

cplx GreenKernel::coefficient(int n, double t) const {
  cplx c = omega(n, t);
  if (t < 0) c += -two_pi * I * K(n * t);
  return c;
}

std::vector<cplx> GreenKernel::coefficient_series(int n, double h, int count) const {
  if (n == 0) throw ConfigError("coefficient_series: n must be nonzero");
  const double N = static_cast<double>(std::abs(n)) * n;
  const double an = std::abs(n);
  const auto& psi = n > 0 ? down_.plus : down_.minus;
  const size_t nk = psi.size();
  std::vector<cplx> W(nk), step(nk);
  for (size_t k = 0; k < nk; ++k) {
    cplx p = psi[k];
    W[k] = down_.w[k] * (p * p / (1.0 - p / N) - down_.sub[k]);
    step[k] = std::exp(I * (-an * h) * cplx(down_.x[k], down_.y));
  }
  // Omega_n(-jh) = sum_k W_k step_k^j: blocks of j restart from exact powers to cap drift.
  std::vector<cplx> out(count);
  const int block = 256;
  const int nblocks = (count + block - 1) / block;
  parallel_for(nblocks, cfg_.exec, [&](long b) {
    const int j0 = static_cast<int>(b) * block, j1 = std::min(count, j0 + block);
    std::vector<cplx> acc(j1 - j0, cplx{});
    for (size_t k = 0; k < nk; ++k) {
      cplx ph = std::exp(I * (-an * h * j0) * cplx(down_.x[k], down_.y));
      cplx wk = W[k];
      for (int j = j0; j < j1; ++j) {
        acc[j - j0] += wk * ph;
        ph *= step[k];
      }
    }
    for (int j = j0; j < j1; ++j) {
      double t = -j * h;
      cplx c = (acc[j - j0] + subtracted_integral(an * t, m0_, cfg_.beta)) / N;
      if (j > 0) c += -two_pi * I * K(n * t);
      out[j] = c;
    }
  });
  return out;
}

std::vector<cplx> GreenKernel::coefficient_slice(int sign, double t, int count) const {
  if (sign != 1 && sign != -1) throw ConfigError("coefficient_slice: sign must be +-1");
  if (t > 0) ensure_up();
  const PsiLine& line = t > 0 ? *up_ : down_;
  const auto& psi = sign > 0 ? line.plus : line.minus;
  const size_t nk = psi.size();
  std::vector<cplx> step(nk);
  for (size_t k = 0; k < nk; ++k) step[k] = std::exp(I * t * cplx(line.x[k], line.y));
  // e^{i|n| t eta} = step^|n|; blocks of n restart from exact powers.
  std::vector<cplx> out(count);
  const int block = 256;
  const int nblocks = (count + block - 1) / block;
  parallel_for(nblocks, cfg_.exec, [&](long b) {
    const int lo = static_cast<int>(b) * block + 1, hi = std::min(count, lo + block - 1);
    std::vector<cplx> acc(hi - lo + 1, cplx{});
    for (size_t k = 0; k < nk; ++k) {
      const cplx eta(line.x[k], line.y), p = psi[k], p2 = p * p;
      cplx ph = std::exp(I * (lo * t) * eta);
      for (int m = lo; m <= hi; ++m) {
        const double N = static_cast<double>(m) * m * sign;
        acc[m - lo] += line.w[k] * ph * (p2 / (1.0 - p / N) - line.sub[k]);
        ph *= step[k];
      }
    }
    for (int m = lo; m <= hi; ++m) {
      const int n = m * sign;
      const double N = static_cast<double>(m) * n;
      cplx c = (acc[m - lo] + subtracted_integral(m * t, m0_, cfg_.beta)) / N;
      if (t < 0) c += -two_pi * I * K(n * t);
      out[m - 1] = c;
    }
  });
  return out;
}

cplx mode_coefficient(const GreenKernel& G, int n, double t) { return G.coefficient(n, t); }

std::vector<double> default_green_slices() {
  std::vector<double> s = {1.0, 0.5, 0.2, 0.05, 0.0, -0.02, -0.05, -0.1, -0.2, -0.5};
  for (int k = 2; k <= 40; ++k) s.push_back(-0.5 * k);
  std::sort(s.begin(), s.end());
  return s;
}

GreenTable build_Qz(const EquilibriumSpec& spec, GreenConfig cfg) {
  auto G = std::make_shared<GreenKernel>(spec, cfg);
  std::vector<double> slices = cfg.t_slices.empty() ? default_green_slices() : cfg.t_slices;
  return build_Qz(G, slices, cfg.nz);
}

GreenTable build_Qz(std::shared_ptr<GreenKernel> G, std::vector<double> slices, int nz) {
  GreenTable T;
  T.spec = G->spec();
  T.cfg = G->config();
  T.cfg.t_slices = slices;
  T.cfg.nz = nz;
  T.kernel = G;
  T.gamma_prime = G->gamma_prime();
  T.nu0 = G->nu0();
  T.theta = G->theta_sampled();
  T.z = uniform_z_grid(nz);
  T.t = slices;
  const size_t nt = slices.size();
  T.Qz.assign(nt * nz, 0.0);
  T.Qzz.assign(nt * nz, 0.0);
  T.Q.assign(nt * nz, 0.0);
  T.modes_used.assign(nt, 0);
  T.tail_bound.assign(nt, 0.0);
  const int N_cap = T.cfg.N_cap;

  for (size_t it = 0; it < nt; ++it) {
    const double t = slices[it];
    std::vector<cplx> a;
    int N = 0;
    auto fill = [&](int count) {
      N = count;
      auto cp = G->coefficient_slice(+1, t, N), cm = G->coefficient_slice(-1, t, N);
      a.assign(2 * N + 1, cplx{});
      for (int m = 1; m <= N; ++m) {
        a[N + m] = cp[m - 1] / (two_pi * two_pi * m);
        a[N - m] = cm[m - 1] / (two_pi * two_pi * -m);
      }
    };
    auto tail = [&] { return (std::abs(a[2 * N]) + std::abs(a[0])) * N; };
    if (t != 0.0) {
      fill(std::max(8, static_cast<int>(std::min<double>(
                           N_cap, std::ceil(G->kappa_cut() / std::abs(t))))));
    } else {
      // no |n t| cutoff at t = 0: double until the last terms are negligible
      fill(64);
      while (tail() > T.cfg.series_tol && 2 * N <= N_cap) fill(2 * N);
    }
    T.modes_used[it] = N;
    // Remaining terms beyond N, estimated from the last one.
    T.tail_bound[it] = tail();
    parallel_for(nz, T.cfg.exec, [&](long iz) {
      double qz = 0, qzz = 0, q = 0;
      const cplx step = std::polar(1.0, T.z[iz]);
      cplx ph = step;
      for (int m = 1; m <= N; ++m) {
        if (m % 128 == 0) ph = std::polar(1.0, m * T.z[iz]);
        cplx ep = ph * a[N + m], em = std::conj(ph) * a[N - m];
        qz += (ep + em).real();
        qzz += (cplx(0.0, m) * (ep - em)).real();
        q += ((ep - em) / cplx(0.0, m)).real();
        ph *= step;
      }
      T.Qz[it * nz + iz] = qz;
      T.Qzz[it * nz + iz] = qzz;
      T.Q[it * nz + iz] = q;
    });
  }
  T.a_fit = green_invariants(T).a_fit;
  return T;
}

InvariantReport green_invariants(const GreenTable& T) {
  InvariantReport r;
  const int nz = static_cast<int>(T.z.size());
  std::vector<double> tp, sp;
  for (size_t it = 0; it < T.t.size(); ++it) {
    double sup = 0, mean = 0;
    for (int iz = 0; iz < nz; ++iz) {
      sup = std::max(sup, std::abs(T.qz(it, iz)));
      mean += T.qz(it, iz);
    }
    mean /= nz;
    r.mean = std::max(r.mean, std::abs(mean));
    if (T.t[it] > 0) r.causality = std::max(r.causality, sup);
    if (T.t[it] <= -1.0) {
      tp.push_back(-T.t[it]);
      sp.push_back(sup);
    }
  }
  if (tp.size() >= 8) {
    std::vector<size_t> idx(tp.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return tp[a] < tp[b]; });
    std::vector<double> ts, ss;
    for (size_t i : idx) {
      ts.push_back(tp[i]);
      ss.push_back(sp[i]);
    }
    r.far_past = fit_decay(ts, ss, ts.front(), ts.back());
    r.a_fit = r.far_past.gamma;
  }
  return r;
}

SelfSimilarReport selfsimilar_residual(const GreenTable& T, const std::vector<double>& slices) {
  SelfSimilarReport r;
  const int nz = static_cast<int>(T.z.size());
  for (double ts : slices) {
    size_t it = T.t.size();
    for (size_t k = 0; k < T.t.size(); ++k)
      if (std::abs(T.t[k] - ts) < 1e-12) it = k;
    if (it == T.t.size()) throw ConfigError("selfsimilar_residual: slice not in table");
    double lit = 0, cor = 0, cord = 0;
    for (int iz = 0; iz < nz; ++iz) {
      double z = T.z[iz] > pi ? T.z[iz] - two_pi : T.z[iz];  // |z| <= pi
      double fe = T.spec.profile.value(z / ts).real();
      double fez = T.spec.profile.deriv(z / ts).real() / ts;
      lit = std::max(lit, std::abs(T.qz(it, iz) - fe));
      cor = std::max(cor, std::abs(T.qz(it, iz) + fe));
      cord = std::max(cord, std::abs(T.qzz(it, iz) + fez));
    }
    r.t.push_back(ts);
    r.literal.push_back(lit);
    r.corrected.push_back(cor);
    r.corrected_dz.push_back(cord);
    r.modes.push_back(T.modes_used[it]);
  }
  // Bounded: the slice closest to 0 does not exceed 1.25x the largest earlier value.
  auto bounded = [](const std::vector<double>& v) {
    if (v.size() < 2) return true;
    double prev = *std::max_element(v.begin(), v.end() - 1);
    return v.back() <= 1.25 * prev + 1e-12;
  };
  r.literal_bounded = bounded(r.literal);
  r.corrected_bounded = bounded(r.corrected) && bounded(r.corrected_dz);
  return r;
}

ModeResponse::ModeResponse(std::shared_ptr<const GreenKernel> G, double h, int count)
    : G_(std::move(G)), h_(h), count_(count) {}

const std::vector<cplx>& ModeResponse::a(int n) {
  auto it = cache_.find(n);
  if (it != cache_.end()) return it->second;
  std::vector<cplx> c = G_->coefficient_series(n, h_, count_);
  for (auto& v : c) v /= two_pi * two_pi * n;
  return cache_.emplace(n, std::move(c)).first->second;
}

ModeField solve_field_modes(ModeResponse& R, const std::map<int, std::vector<cplx>>& h,
                            const TimeGrid& grid, double gamma, Exec exec) {
  if (std::abs(grid.h - R.h()) > 1e-12 * grid.h)
    throw ConfigError("solve_field: source grid step differs from the response table");
  if (grid.n > R.count()) throw ConfigError("solve_field: source longer than the response table");
  ModeField out;
  out.grid = grid;
  const int nt = grid.n;
  const double hs = grid.h;
  auto hit = h.find(0);
  if (hit != h.end())
    for (cplx v : hit->second)
      if (std::abs(v) > 1e-8)
        throw MeanViolation("solve_field: source has nonzero z-mean " + std::to_string(std::abs(v)));
  for (const auto& [n, hn] : h) {
    if (n == 0) continue;
    const std::vector<cplx>& a = R.a(n);
    std::vector<cplx> ez(nt), e(nt);
    parallel_for(nt, exec, [&](long j) {
      cplx acc = 0.5 * a[0] * hn[j];
      for (int k = static_cast<int>(j) + 1; k < nt; ++k) acc += a[k - j] * hn[k];
      if (j < nt - 1) acc -= 0.5 * a[nt - 1 - j] * hn[nt - 1];
      else acc = 0.0;
      ez[j] = hn[j] + two_pi * hs * acc;
      e[j] = ez[j] / cplx(0.0, n);
    });
    double amax = 0;
    for (int k = 0; k < nt; ++k) amax = std::max(amax, std::abs(a[k]));
    const double mu = gamma > 0 ? gamma : 0.1;
    out.tail_bound = std::max(out.tail_bound, two_pi * amax * std::abs(hn[nt - 1]) / mu);
    out.e[n] = std::move(e);
    out.ez[n] = std::move(ez);
  }
  return out;
}

std::map<int, std::vector<cplx>> project_modes(const SpaceTimeField& f, int n_max, bool dvalue) {
  std::map<int, std::vector<cplx>> out;
  for (int n = -n_max; n <= n_max; ++n) out[n].assign(f.nt(), cplx{});
  std::vector<double> row(f.nz());
  for (int it = 0; it < f.nt(); ++it) {
    for (int iz = 0; iz < f.nz(); ++iz) row[iz] = dvalue ? f.dv(it, iz) : f.v(it, iz);
    auto c = fourier_project(row, n_max);
    for (auto& [n, v] : c) out[n][it] = v;
  }
  return out;
}

ModeField solve_field(ModeResponse& R, const SpaceTimeField& h, int n_max, double gamma,
                      Exec exec) {
  auto modes = project_modes(h, n_max, false);
  double mean = 0;
  for (cplx v : modes[0]) mean = std::max(mean, std::abs(v));
  if (mean > 1e-8) throw MeanViolation("solve_field: source z-mean " + std::to_string(mean));
  modes.erase(0);
  TimeGrid g{h.t.front(), h.t.size() > 1 ? h.t[1] - h.t[0] : R.h(), h.nt()};
  return solve_field_modes(R, modes, g, gamma, exec);
}

SpaceTimeField synthesize_field(const ModeField& f, int nz) {
  std::vector<double> t(f.grid.n);
  for (int j = 0; j < f.grid.n; ++j) t[j] = f.grid.t(j);
  SpaceTimeField E = SpaceTimeField::zeros(nz, t);
  for (int j = 0; j < f.grid.n; ++j) {
    std::map<int, cplx> c;
    for (const auto& [n, e] : f.e) c[n] = e[j];
    Synthesis s = fourier_synthesize(c, E.z);
    for (int iz = 0; iz < nz; ++iz) {
      E.v(j, iz) = s.value[iz].real();
      E.dv(j, iz) = s.dvalue[iz].real();
    }
  }
  return E;
}

N10aReport residual_N10a(const EquilibriumSpec& spec, const ModeField& E,
                         const std::map<int, std::vector<cplx>>& h, double t_check, double tol,
                         Exec exec) {
  N10aReport rep;
  const TimeGrid& g = E.grid;
  const int nt = g.n;
  int jmax = 0;
  while (jmax + 1 < nt && g.t(jmax + 1) <= t_check + 1e-12) ++jmax;
  rep.t_checked = g.t(jmax);
  std::map<int, std::vector<cplx>> r;
  PhiOptions po;
  for (const auto& [n, e] : E.e) {
    std::vector<cplx> Kv(nt);
    parallel_for(nt, exec, [&](long m) { Kv[m] = kernel_K(spec, -n * m * g.h, po); });
    auto hit = h.find(n);
    std::vector<cplx> rn(jmax + 1);
    parallel_for(jmax + 1, exec, [&](long j) {
      std::vector<cplx> f(nt - j);
      for (int k = static_cast<int>(j); k < nt; ++k) f[k - j] = e[k] * Kv[k - j];
      cplx integral = simpson(f.data(), nt - static_cast<int>(j), g.h);
      cplx hn = hit != h.end() ? hit->second[j] : cplx{};
      rn[j] = E.ez.at(n)[j] - integral - hn;
    });
    double Kmax = 0;
    for (cplx k : Kv) Kmax = std::max(Kmax, std::abs(k));
    rep.tail = std::max(rep.tail, std::abs(e[nt - 1]) * Kmax / 0.1);
    r[n] = std::move(rn);
  }
  const int nz = 64;
  auto z = uniform_z_grid(nz);
  for (int j = 0; j <= jmax; ++j) {
    std::map<int, cplx> c;
    for (const auto& [n, v] : r) c[n] = v[j];
    Synthesis s = fourier_synthesize(c, z);
    for (int iz = 0; iz < nz; ++iz) rep.residual = std::max(rep.residual, std::abs(s.value[iz]));
  }
  if (rep.tail > 0.5 * tol)
    throw HorizonError("residual_N10a: horizon tail " + std::to_string(rep.tail) +
                       " exceeds half the tolerance");
  return rep;
}

N10aReport residual_N10a(const EquilibriumSpec& spec, const SpaceTimeField& E,
                         const SpaceTimeField& h, int n_max, double t_check, double tol,
                         Exec exec) {
  ModeField mf;
  mf.grid = TimeGrid{E.t.front(), E.t.size() > 1 ? E.t[1] - E.t[0] : 1.0, E.nt()};
  auto em = project_modes(E, n_max, false);
  for (auto& [n, v] : em) {
    if (n == 0) continue;
    mf.ez[n].resize(v.size());
    for (size_t j = 0; j < v.size(); ++j) mf.ez[n][j] = cplx(0.0, n) * v[j];
    mf.e[n] = v;
  }
  auto hm = project_modes(h, n_max, false);
  return residual_N10a(spec, mf, hm, t_check, tol, exec);
}

void to_json(nlohmann::json& j, const GreenConfig& c) {
  j = nlohmann::json{{"nu0", c.nu0},
                     {"gamma_prime", c.gamma_prime},
                     {"dx", c.dx},
                     {"X", c.X},
                     {"beta", c.beta},
                     {"psi_tol", c.psi_tol},
                     {"kernel_tol", c.kernel_tol},
                     {"series_tol", c.series_tol},
                     {"kappa_scale", c.kappa_scale},
                     {"N_cap", c.N_cap},
                     {"theta_min", c.theta_min},
                     {"nz", c.nz},
                     {"t_slices", c.t_slices}};
}

void from_json(const nlohmann::json& j, GreenConfig& c) {
  GreenConfig d;
  c.nu0 = j.value("nu0", d.nu0);
  c.gamma_prime = j.value("gamma_prime", d.gamma_prime);
  c.dx = j.value("dx", d.dx);
  c.X = j.value("X", d.X);
  c.beta = j.value("beta", d.beta);
  c.psi_tol = j.value("psi_tol", d.psi_tol);
  c.kernel_tol = j.value("kernel_tol", d.kernel_tol);
  c.series_tol = j.value("series_tol", d.series_tol);
  c.kappa_scale = j.value("kappa_scale", d.kappa_scale);
  c.N_cap = j.value("N_cap", d.N_cap);
  c.theta_min = j.value("theta_min", d.theta_min);
  c.nz = j.value("nz", d.nz);
  c.t_slices = j.value("t_slices", std::vector<double>{});
  if (!(c.dx > 0) || !(c.X > 0) || c.N_cap < 1 || c.nz < 4)
    throw ConfigError("green config: dx, X, N_cap, nz must be positive");
}

void save_table(const GreenTable& T, const std::filesystem::path& dir) {
  nlohmann::json spec, cfg;
  to_json(spec, T.spec);
  to_json(cfg, T.cfg);
  nlohmann::json head{{"spec", spec},
                      {"config", cfg},
                      {"z", T.z},
                      {"t", T.t},
                      {"modes_used", T.modes_used},
                      {"tail_bound", T.tail_bound},
                      {"gamma_prime", T.gamma_prime},
                      {"nu0", T.nu0},
                      {"theta", T.theta},
                      {"a_fit", T.a_fit},
                      {"files", {{"Q", "Q.csv"}, {"Q_z", "Qz.csv"}, {"Q_zz", "Qzz.csv"}}}};
  write_json(dir / "green_header.json", head);
  write_matrix_csv(dir / "Q.csv", T.t, T.z, T.Q);
  write_matrix_csv(dir / "Qz.csv", T.t, T.z, T.Qz);
  write_matrix_csv(dir / "Qzz.csv", T.t, T.z, T.Qzz);
}

GreenTable load_table(const std::filesystem::path& dir) {
  nlohmann::json head = read_json(dir / "green_header.json");
  GreenTable T;
  from_json(head.at("spec"), T.spec);
  from_json(head.at("config"), T.cfg);
  T.z = head.at("z").get<std::vector<double>>();
  T.t = head.at("t").get<std::vector<double>>();
  T.modes_used = head.at("modes_used").get<std::vector<int>>();
  T.tail_bound = head.at("tail_bound").get<std::vector<double>>();
  T.gamma_prime = head.at("gamma_prime").get<double>();
  T.nu0 = head.at("nu0").get<double>();
  T.theta = head.at("theta").get<double>();
  T.a_fit = head.at("a_fit").get<double>();
  std::vector<double> rows, cols;
  read_matrix_csv(dir / "Q.csv", rows, cols, T.Q);
  read_matrix_csv(dir / "Qz.csv", rows, cols, T.Qz);
  read_matrix_csv(dir / "Qzz.csv", rows, cols, T.Qzz);
  return T;
}

}  // namespace landau
