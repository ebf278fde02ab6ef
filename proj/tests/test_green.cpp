#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "landau/dispersion.hpp"
#include "landau/freestream.hpp"
#include "landau/green_function.hpp"

using namespace landau;

namespace {

std::shared_ptr<GreenKernel> maxwellian_kernel() {
  static std::shared_ptr<GreenKernel> k = [] {
    GreenConfig cfg;
    cfg.nu0 = 0.4;
    return std::make_shared<GreenKernel>(EquilibriumSpec::maxwellian(1.0), cfg);
  }();
  return k;
}

}  // namespace

TEST_CASE("kernel contour parameters") {
  auto G = maxwellian_kernel();
  CHECK(G->gamma_prime() == doctest::Approx(0.32));
  CHECK(G->theta_sampled() > 0);
  CHECK(G->mass() > 0);
  for (double xi : {-1.0, 0.5, 3.0})
    CHECK(std::abs(G->K(xi) - I * xi * std::exp(-xi * xi / 4)) < 1e-10);
}

TEST_CASE("coefficients vanish for t > 0") {
  auto G = maxwellian_kernel();
  for (int n : {1, -1, 2, 5})
    for (double t : {0.05, 0.5, 2.0}) CHECK(std::abs(G->coefficient(n, t)) < 1e-10);
  CHECK(std::abs(G->omega(1, 0.0)) < 1e-12);
}

TEST_CASE("coefficient series and slices agree with pointwise evaluation") {
  auto G = maxwellian_kernel();
  auto ser = G->coefficient_series(2, 0.05, 20);
  for (int j = 0; j < 20; ++j) CHECK(std::abs(ser[j] - G->coefficient(2, -j * 0.05)) < 1e-12);
  auto sl = G->coefficient_slice(-1, -0.7, 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(sl[k] - G->coefficient(-(k + 1), -0.7)) < 1e-12);
}

TEST_CASE("coefficients decay in the far past") {
  auto G = maxwellian_kernel();
  const double a5 = std::abs(G->coefficient(1, -5.0)), a15 = std::abs(G->coefficient(1, -15.0));
  CHECK(a15 < a5);
  CHECK(a15 < 1e-1 * a5);
}

TEST_CASE("field solve: zero, linearity and mean rejection") {
  auto G = maxwellian_kernel();
  const double h = 0.02;
  TimeGrid grid{0.0, h, 501};
  ModeResponse R(G, h, grid.n);
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  std::map<int, std::vector<cplx>> src, zero, twice;
  for (int n : {1, -1}) {
    for (int j = 0; j < grid.n; ++j) src[n].push_back(freestream_mode(g, n, grid.t(j)));
    zero[n].assign(grid.n, cplx{});
    for (cplx c : src[n]) twice[n].push_back(2.0 * c);
  }
  ModeField e0 = solve_field_modes(R, zero, grid);
  for (const auto& [n, v] : e0.e)
    for (cplx c : v) CHECK(c == cplx(0.0));
  ModeField e1 = solve_field_modes(R, src, grid), e2 = solve_field_modes(R, twice, grid);
  for (int n : {1, -1})
    for (int j = 0; j < grid.n; ++j) CHECK(std::abs(e2.e[n][j] - 2.0 * e1.e[n][j]) < 1e-18);
  // real field: conjugate symmetric modes
  for (int j = 0; j < grid.n; j += 50) CHECK(std::abs(e1.e[-1][j] - std::conj(e1.e[1][j])) < 1e-15);

  src[0].assign(grid.n, cplx(1e-3));
  CHECK_THROWS_AS(solve_field_modes(R, src, grid), MeanViolation);
  TimeGrid other{0.0, 0.01, 10};
  CHECK_THROWS_AS(solve_field_modes(R, zero, other), ConfigError);
}

TEST_CASE("solved field satisfies the field equation") {
  auto G = maxwellian_kernel();
  const double h = 0.01;
  TimeGrid grid{0.0, h, 3001};
  ModeResponse R(G, h, grid.n);
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  std::map<int, std::vector<cplx>> src;
  for (int n : {1, -1})
    for (int j = 0; j < grid.n; ++j) src[n].push_back(freestream_mode(g, n, grid.t(j)));
  ModeField E = solve_field_modes(R, src, grid, 0.36);
  N10aReport rep = residual_N10a(EquilibriumSpec::maxwellian(1.0), E, src, 10.0, 1e-7);
  CHECK(rep.residual < 1e-4 * 1e-3);
}

TEST_CASE("table invariants and round trip") {
  auto G = maxwellian_kernel();
  GreenTable T = build_Qz(G, {1.0, 0.5, 0.0, -1.0, -1.5, -2.0, -2.5, -3.0, -3.5, -4.0, -4.5, -5.0},
                          512);
  InvariantReport inv = green_invariants(T);
  CHECK(inv.causality < T.cfg.series_tol);
  CHECK(inv.mean < 1e-8);
  CHECK(inv.a_fit > 0);

  const auto dir = std::filesystem::temp_directory_path() / "landau_green_rt";
  std::filesystem::remove_all(dir);
  save_table(T, dir);
  GreenTable L = load_table(dir);
  CHECK(L.t == T.t);
  CHECK(L.z.size() == T.z.size());
  REQUIRE(L.Qz.size() == T.Qz.size());
  double err = 0;
  for (size_t i = 0; i < T.Qz.size(); ++i) err = std::max(err, std::abs(L.Qz[i] - T.Qz[i]));
  CHECK(err == 0.0);
  CHECK(L.kernel == nullptr);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unstable equilibrium is refused") {
  GreenConfig cfg;
  CHECK_THROWS(GreenKernel(EquilibriumSpec::quartic_gaussian(4.0), cfg));
}
