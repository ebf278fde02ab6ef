#include "landau/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace landau {

void Contour::check() const {
  if (nodes < 16) throw Error("contour: node count must be >= 16");
  if (!(half_length > 0)) throw Error("contour: truncation half-length must be positive");
  if (kind == Kind::real_line && offset != 0.0)
    throw Error("contour: real-line contour with nonzero offset");
}

TimeGrid TimeGrid::from_range(double t0, double t_end, double h) {
  if (!(h > 0)) throw Error("time grid: step must be positive");
  if (t_end < t0) throw Error("time grid: t_end < t0");
  TimeGrid g;
  g.t0 = t0;
  g.h = h;
  g.n = static_cast<int>(std::lround((t_end - t0) / h)) + 1;
  return g;
}

SpaceTimeField SpaceTimeField::zeros(int nz, const std::vector<double>& t) {
  SpaceTimeField f;
  f.z = uniform_z_grid(nz);
  f.t = t;
  f.value.assign(static_cast<size_t>(nz) * t.size(), 0.0);
  f.dvalue.assign(static_cast<size_t>(nz) * t.size(), 0.0);
  return f;
}

std::vector<double> uniform_z_grid(int nz) {
  std::vector<double> z(nz);
  for (int j = 0; j < nz; ++j) z[j] = 2.0 * pi * j / nz;
  return z;
}

namespace detail {

const GK15& gk15() {
  static const GK15 table = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& xk = gauss_kronrod<double, 15>::abscissa();
    const auto& wk = gauss_kronrod<double, 15>::weights();
    const auto& wg = gauss<double, 7>::weights();
    GK15 t{};
    // Kronrod abscissae are listed from 0 outward; Gauss nodes sit at even indices.
    for (int i = 0; i < 8; ++i) {
      double gw = (i % 2 == 0) ? wg[i / 2] : 0.0;
      t.x[7 + i] = xk[i];
      t.x[7 - i] = -xk[i];
      t.wk[7 + i] = t.wk[7 - i] = wk[i];
      t.wg[7 + i] = t.wg[7 - i] = gw;
    }
    return t;
  }();
  return table;
}

}  // namespace detail

QuadResult integrate_line(const std::function<cplx(cplx)>& f, const Contour& c, double tol) {
  return integrate_line_t(f, c, tol);
}

ModeSeries volterra_solve_sampled(const std::vector<cplx>& k, const std::vector<cplx>& G,
                                  cplx lambda, const TimeGrid& grid) {
  const int n = grid.n;
  if (static_cast<int>(k.size()) < n || static_cast<int>(G.size()) < n)
    throw Error("volterra_solve: kernel/source shorter than grid");
  if (lambda == cplx(0.0)) throw SingularStep("volterra_solve: lambda = 0");
  const double h = grid.h;
  const cplx diag = lambda + 0.5 * h * k[0];
  if (std::abs(diag) < 1e-300) throw SingularStep("volterra_solve: vanishing diagonal");
  ModeSeries out;
  out.grid = grid;
  out.values.assign(n, cplx{});
  if (n == 0) return out;
  auto& b = out.values;
  b[0] = G[0] / lambda;
  for (int j = 1; j < n; ++j) {
    cplx acc = 0.5 * b[0] * k[j];
    for (int m = 1; m < j; ++m) acc += b[m] * k[j - m];
    b[j] = (G[j] - h * acc) / diag;
  }
  return out;
}

ModeSeries volterra_solve(const std::function<cplx(double)>& kernel, const ModeSeries& source,
                          cplx lambda, const TimeGrid& grid) {
  std::vector<cplx> k(grid.n);
  for (int j = 0; j < grid.n; ++j) k[j] = kernel(j * grid.h);
  ModeSeries out = volterra_solve_sampled(k, source.values, lambda, grid);
  out.n = source.n;
  return out;
}

ModeSeries volterra_resolvent(const std::function<cplx(double)>& kernel, cplx lambda,
                              const TimeGrid& grid) {
  if (lambda == cplx(0.0)) throw SingularStep("volterra_resolvent: lambda = 0");
  const int n = grid.n;
  const double h = grid.h;
  std::vector<cplx> k(n);
  for (int j = 0; j < n; ++j) k[j] = kernel(j * h);
  const cplx diag = lambda + 0.5 * h * k[0];
  if (std::abs(diag) < 1e-300) throw SingularStep("volterra_resolvent: vanishing diagonal");
  ModeSeries B;
  B.grid = TimeGrid{0.0, h, n};
  B.values.assign(n, cplx{});
  if (n == 0) return B;
  B.values[0] = 1.0 / (h * diag);
  for (int r = 1; r < n; ++r) {
    cplx acc{};
    for (int i = 0; i < r; ++i) acc += B.values[i] * k[r - i];
    B.values[r] = -h * acc / diag;
  }
  return B;
}

std::vector<cplx> resolvent_convolve(const ModeSeries& B, const std::vector<cplx>& G,
                                     cplx lambda) {
  const int n = std::min<int>(B.values.size(), G.size());
  const double h = B.grid.h;
  std::vector<cplx> b(n);
  if (n == 0) return b;
  if (lambda == cplx(0.0)) throw SingularStep("resolvent_convolve: lambda = 0");
  // Node 0 enters the trapezoid sums with half weight, so its response is
  // B_j scaled by (lambda + h k_0 / 2) / (2 lambda) rather than B_j / 2.
  b[0] = G[0] / lambda;
  const cplx w0 = 0.5 / (h * B.values[0] * lambda);
  for (int j = 1; j < n; ++j) {
    cplx acc = w0 * B.values[j] * G[0];
    for (int m = 1; m <= j; ++m) acc += B.values[j - m] * G[m];
    b[j] = h * acc;
  }
  return b;
}

Synthesis fourier_synthesize(const std::map<int, cplx>& coeffs, const std::vector<double>& z) {
  Synthesis s;
  s.value.assign(z.size(), cplx{});
  s.dvalue.assign(z.size(), cplx{});
  for (size_t j = 0; j < z.size(); ++j) {
    cplx v{}, dv{};
    for (const auto& [n, c] : coeffs) {
      cplx e = std::polar(1.0, n * z[j]);
      v += c * e;
      dv += cplx(0.0, n) * c * e;
    }
    s.value[j] = v;
    s.dvalue[j] = dv;
  }
  return s;
}

std::map<int, cplx> fourier_project(const std::vector<double>& samples, int n_max) {
  std::map<int, cplx> out;
  const int N = static_cast<int>(samples.size());
  for (int n = -n_max; n <= n_max; ++n) {
    cplx acc{};
    for (int j = 0; j < N; ++j) acc += samples[j] * std::polar(1.0, -2.0 * pi * n * j / N);
    out[n] = acc / static_cast<double>(N);
  }
  return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& magnitude,
                   double t_a, double t_b) {
  std::vector<double> tw, yw;
  for (size_t i = 0; i < t.size() && i < magnitude.size(); ++i) {
    if (t[i] >= t_a && t[i] <= t_b) {
      tw.push_back(t[i]);
      yw.push_back(std::abs(magnitude[i]));
    }
  }
  if (tw.size() < 8)
    throw WindowTooShort("fit_decay: fewer than 8 samples in [" + std::to_string(t_a) + ", " +
                         std::to_string(t_b) + "]");

  std::vector<double> tf, yf;
  for (size_t i = 1; i + 1 < tw.size(); ++i) {
    if (yw[i] >= yw[i - 1] && yw[i] > yw[i + 1]) {
      tf.push_back(tw[i]);
      yf.push_back(yw[i]);
    }
  }
  DecayFit fit;
  fit.t_a = t_a;
  fit.t_b = t_b;
  const double span = tw.back() - tw.front();
  if (tf.size() >= 4 && tf.back() - tf.front() >= 0.5 * span) {
    fit.envelope = true;
  } else {
    tf = tw;
    yf = yw;
  }
  const size_t m = tf.size();
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::vector<double> ly(m);
  for (size_t i = 0; i < m; ++i) {
    ly[i] = std::log(std::max(yf[i], 1e-30));
    st += tf[i];
    sy += ly[i];
    stt += tf[i] * tf[i];
    sty += tf[i] * ly[i];
  }
  const double dm = static_cast<double>(m);
  const double den = dm * stt - st * st;
  const double slope = den != 0.0 ? (dm * sty - st * sy) / den : 0.0;
  const double icpt = (sy - slope * st) / dm;
  fit.gamma = -slope;
  fit.C = std::exp(icpt);
  fit.points = static_cast<int>(m);
  for (size_t i = 0; i < m; ++i)
    fit.residual = std::max(fit.residual, std::abs(ly[i] - (icpt + slope * tf[i])));
  return fit;
}

DecayFit fit_decay(const ModeSeries& series, double t_a, double t_b) {
  std::vector<double> t(series.values.size()), y(series.values.size());
  for (size_t j = 0; j < t.size(); ++j) {
    t[j] = series.grid.t(static_cast<int>(j));
    y[j] = std::abs(series.values[j]);
  }
  return fit_decay(t, y, t_a, t_b);
}

cplx simpson(const cplx* f, int n, double h) {
  if (n < 2) return {};
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  const int last = (n % 2 == 1) ? n - 1 : n - 2;
  cplx s = f[0] + f[last];
  for (int i = 1; i < last; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  s *= h / 3.0;
  if (last != n - 1) s += 0.5 * h * (f[n - 2] + f[n - 1]);
  return s;
}

}  // namespace landau
