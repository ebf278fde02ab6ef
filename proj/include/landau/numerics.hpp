#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "landau/core.hpp"

namespace landau {

// Integration path w = s + i*offset, s in R. The core [-L, L] is split into
// Gauss-Kronrod panels; the two tails are mapped onto (0, 1] by s = L/u.
struct Contour {
  enum class Kind { real_line, shifted };
  Kind kind = Kind::real_line;
  double offset = 0.0;
  double half_length = 10.0;
  int nodes = 240;

  static Contour real(double L = 10.0, int nodes = 240) {
    return {Kind::real_line, 0.0, L, nodes};
  }
  static Contour shifted(double offset, double L = 10.0, int nodes = 240) {
    return {Kind::shifted, offset, L, nodes};
  }
  void check() const;
};

struct QuadResult {
  cplx value{};
  double error = 0.0;
  long evaluations = 0;
};

struct TimeGrid {
  double t0 = 0.0;
  double h = 0.01;
  int n = 0;  // node count

  double t(int j) const { return t0 + j * h; }
  double t_end() const { return t0 + (n - 1) * h; }
  static TimeGrid from_range(double t0, double t_end, double h);
};

struct ModeSeries {
  TimeGrid grid;
  int n = 0;  // spatial mode the series belongs to (0 if not applicable)
  std::vector<cplx> values;
};

struct DecayFit {
  double C = 0.0;
  double gamma = 0.0;
  double residual = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  int points = 0;
  bool envelope = false;
};

// Real periodic field on a uniform z-grid over [0, 2pi) times a t-grid.
struct SpaceTimeField {
  std::vector<double> z;
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> dvalue;

  int nz() const { return static_cast<int>(z.size()); }
  int nt() const { return static_cast<int>(t.size()); }
  double& v(int it, int iz) { return value[static_cast<size_t>(it) * z.size() + iz]; }
  double& dv(int it, int iz) { return dvalue[static_cast<size_t>(it) * z.size() + iz]; }
  double v(int it, int iz) const { return value[static_cast<size_t>(it) * z.size() + iz]; }
  double dv(int it, int iz) const { return dvalue[static_cast<size_t>(it) * z.size() + iz]; }
  static SpaceTimeField zeros(int nz, const std::vector<double>& t);
};

std::vector<double> uniform_z_grid(int nz);

struct Synthesis {
  std::vector<cplx> value;
  std::vector<cplx> dvalue;
};

namespace detail {

struct GK15 {
  std::array<double, 15> x;
  std::array<double, 15> wk;
  std::array<double, 15> wg;  // zero at Kronrod-only nodes
};
const GK15& gk15();

template <class G>
void gk_adapt(G& g, double a, double b, double tol, int depth, cplx& sum, double& err,
              long& evals, bool& ok) {
  const GK15& r = gk15();
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  cplx k{}, gs{};
  for (int i = 0; i < 15; ++i) {
    cplx fv = g(c + hw * r.x[i]);
    k += r.wk[i] * fv;
    gs += r.wg[i] * fv;
  }
  evals += 15;
  k *= hw;
  gs *= hw;
  double e = std::abs(k - gs);
  if (e <= tol || depth == 0 || !std::isfinite(e)) {
    if (e > tol) ok = false;
    sum += k;
    err += e;
    return;
  }
  gk_adapt(g, a, c, 0.5 * tol, depth - 1, sum, err, evals, ok);
  gk_adapt(g, c, b, 0.5 * tol, depth - 1, sum, err, evals, ok);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (7/15) over a horizontal contour; f takes the
// complex point w on the contour. Absolute tolerance.
template <class F>
QuadResult integrate_line_t(F&& f, const Contour& c, double tol, int max_depth = 24) {
  c.check();
  const double L = c.half_length;
  const cplx shift(0.0, c.offset);
  QuadResult out;
  bool ok = true;
  const int panels = std::max(1, (c.nodes + 14) / 15);
  const double tol_core = tol / 2.0, tol_tail = tol / 4.0;
  auto core = [&](double s) { return f(cplx(s, 0.0) + shift); };
  const double width = 2.0 * L / panels;
  for (int p = 0; p < panels; ++p) {
    double a = -L + p * width;
    double b = (p == panels - 1) ? L : a + width;
    detail::gk_adapt(core, a, b, tol_core / panels, max_depth, out.value, out.error,
                     out.evaluations, ok);
  }
  for (int side = -1; side <= 1; side += 2) {
    auto tail = [&](double u) {
      double s = side * L / u;
      return f(cplx(s, 0.0) + shift) * (L / (u * u));
    };
    for (int p = 0; p < 4; ++p) {
      detail::gk_adapt(tail, 0.25 * p, 0.25 * (p + 1), tol_tail / 4, max_depth, out.value,
                       out.error, out.evaluations, ok);
    }
  }
  if (!ok && out.error > tol) {
    throw NonConvergence("integrate_line: refinement cap reached with error " +
                         std::to_string(out.error) + " > tol " + std::to_string(tol));
  }
  return out;
}

QuadResult integrate_line(const std::function<cplx(cplx)>& f, const Contour& c, double tol);

// Solves lambda*b(t) + int_0^t b(s) k(t-s) ds = G(t) by product trapezoid.
ModeSeries volterra_solve(const std::function<cplx(double)>& kernel, const ModeSeries& source,
                          cplx lambda, const TimeGrid& grid);
ModeSeries volterra_solve_sampled(const std::vector<cplx>& k, const std::vector<cplx>& G,
                                  cplx lambda, const TimeGrid& grid);

// Response to a 1/h spike at any node m >= 1, shifted back to start at t = 0.
ModeSeries volterra_resolvent(const std::function<cplx(double)>& kernel, cplx lambda,
                              const TimeGrid& grid);
// Discrete solution of lambda b + k * b = G from the spike response; exact for the
// trapezoid scheme of volterra_solve.
std::vector<cplx> resolvent_convolve(const ModeSeries& B, const std::vector<cplx>& G,
                                     cplx lambda);

Synthesis fourier_synthesize(const std::map<int, cplx>& coeffs, const std::vector<double>& z);
// Trapezoidal projection onto e^{inz}: (1/N) sum f(z_j) e^{-i n z_j}.
std::map<int, cplx> fourier_project(const std::vector<double>& samples, int n_max);

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& magnitude,
                   double t_a, double t_b);
DecayFit fit_decay(const ModeSeries& series, double t_a, double t_b);

// Composite Simpson on uniform samples (falls back to trapezoid on the last
// interval when the count is even).
cplx simpson(const cplx* f, int n, double h);

}  // namespace landau
