#include <doctest.h>

#include <cmath>

#include "landau/numerics.hpp"

using namespace landau;

TEST_CASE("line integral of a gaussian, real and shifted contours") {
  auto f = [](cplx v) { return std::exp(-v * v); };
  QuadResult r = integrate_line_t(f, Contour::real(), 1e-13);
  CHECK(std::abs(r.value - sqrt_pi) < 1e-12);
  QuadResult s = integrate_line_t(f, Contour::shifted(-0.7), 1e-13);
  CHECK(std::abs(s.value - sqrt_pi) < 1e-12);
  // algebraic tail through the 1/u map
  QuadResult l = integrate_line_t([](cplx v) { return 1.0 / (1.0 + v * v); }, Contour::real(), 1e-12);
  CHECK(std::abs(l.value - pi) < 1e-10);
}

TEST_CASE("contour rejects bad parameters") {
  Contour c = Contour::real(-1.0);
  CHECK_THROWS(c.check());
}

TEST_CASE("time grid from range") {
  TimeGrid g = TimeGrid::from_range(0.0, 1.0, 0.1);
  CHECK(g.n == 11);
  CHECK(g.t_end() == doctest::Approx(1.0));
  CHECK_THROWS_AS(TimeGrid::from_range(0.0, 1.0, 0.0), Error);
}

TEST_CASE("volterra solve against an exponential") {
  // b + int_0^t b = 1  =>  b = e^{-t}
  TimeGrid g = TimeGrid::from_range(0.0, 5.0, 0.01);
  ModeSeries src{g, 1, std::vector<cplx>(g.n, 1.0)};
  ModeSeries b = volterra_solve([](double) { return cplx(1.0); }, src, 1.0, g);
  double err = 0;
  for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(b.values[j] - std::exp(-g.t(j))));
  CHECK(err < 1e-4);
  // second order: halving h quarters the error
  TimeGrid g2 = TimeGrid::from_range(0.0, 5.0, 0.005);
  ModeSeries src2{g2, 1, std::vector<cplx>(g2.n, 1.0)};
  ModeSeries b2 = volterra_solve([](double) { return cplx(1.0); }, src2, 1.0, g2);
  double err2 = 0;
  for (int j = 0; j < g2.n; ++j) err2 = std::max(err2, std::abs(b2.values[j] - std::exp(-g2.t(j))));
  CHECK(err / err2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("resolvent convolution reproduces the direct solve") {
  TimeGrid g = TimeGrid::from_range(0.0, 4.0, 0.02);
  auto k = [](double t) { return cplx(std::cos(t), 0.3 * t); };
  ModeSeries src{g, 1, {}};
  for (int j = 0; j < g.n; ++j) src.values.push_back(std::exp(-g.t(j)) * cplx(1.0, 0.5));
  ModeSeries direct = volterra_solve(k, src, 1.0, g);
  ModeSeries B = volterra_resolvent(k, 1.0, g);
  std::vector<cplx> via = resolvent_convolve(B, src.values, 1.0);
  double err = 0;
  for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(via[j] - direct.values[j]));
  CHECK(err < 1e-12);
}

TEST_CASE("fourier projection and synthesis") {
  std::vector<double> z = uniform_z_grid(32), f(z.size());
  for (size_t i = 0; i < z.size(); ++i) f[i] = std::cos(2 * z[i]) + 0.5 * std::sin(3 * z[i]);
  auto c = fourier_project(f, 4);
  CHECK(std::abs(c[2] - 0.5) < 1e-14);
  CHECK(std::abs(c[-2] - 0.5) < 1e-14);
  CHECK(std::abs(c[3] - cplx(0, -0.25)) < 1e-14);
  CHECK(std::abs(c[1]) < 1e-14);
  Synthesis s = fourier_synthesize(c, z);
  for (size_t i = 0; i < z.size(); ++i) {
    CHECK(s.value[i].real() == doctest::Approx(f[i]).epsilon(1e-12));
    double df = -2 * std::sin(2 * z[i]) + 1.5 * std::cos(3 * z[i]);
    CHECK(std::abs(s.dvalue[i].real() - df) < 1e-12);
  }
}

TEST_CASE("decay fit on an oscillating envelope") {
  std::vector<double> t, y;
  for (int j = 0; j <= 3000; ++j) {
    t.push_back(0.01 * j);
    y.push_back(std::abs(2.0 * std::exp(-0.7 * t.back()) * std::cos(3 * t.back())));
  }
  DecayFit f = fit_decay(t, y, 2.0, 25.0);
  CHECK(f.envelope);
  CHECK(f.gamma == doctest::Approx(0.7).epsilon(0.01));
  CHECK_THROWS_AS(fit_decay(t, y, 2.0, 2.03), WindowTooShort);
}

TEST_CASE("simpson is exact for cubics") {
  std::vector<cplx> f;
  const double h = 0.1;
  for (int i = 0; i <= 20; ++i) f.push_back(std::pow(i * h, 3));
  CHECK(std::abs(simpson(f.data(), 21, h) - 4.0) < 1e-13);
}
