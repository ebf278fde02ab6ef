#include <doctest.h>

#include <cmath>

#include "landau/dispersion.hpp"
#include "landau/linear_dynamics.hpp"

using namespace landau;

TEST_CASE("zero perturbation stays zero") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  PerturbationSpec g = PerturbationSpec::cosine(0.0, 1, VelocityProfile::gaussian(), 1.0);
  ModeSeries b = evolve_mode(s, g, 1, TimeGrid::from_range(0, 5, 0.05));
  for (cplx v : b.values) CHECK(v == cplx(0.0));
}

TEST_CASE("mode evolution is linear in eps") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  TimeGrid grid = TimeGrid::from_range(0, 8, 0.05);
  auto g1 = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  auto g2 = PerturbationSpec::cosine(3e-3, 1, VelocityProfile::gaussian(), 1.0);
  ModeSeries a = evolve_mode(s, g1, 1, grid), b = evolve_mode(s, g2, 1, grid);
  for (int j = 0; j < grid.n; ++j) CHECK(std::abs(b.values[j] - 3.0 * a.values[j]) < 1e-15);
}

TEST_CASE("source and resolvent reproduce the direct solve") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  auto g = PerturbationSpec::cosine(1.0, 1, VelocityProfile::gaussian(), 1.0);
  TimeGrid grid = TimeGrid::from_range(0, 6, 0.02);
  ModeSeries b = evolve_mode(s, g, 1, grid);
  ModeSeries B = fundamental_B_n(s, 1, grid);
  std::vector<cplx> G(grid.n);
  for (int j = 0; j < grid.n; ++j) G[j] = source_G_n(g, 1, grid.t(j));
  std::vector<cplx> via = resolvent_convolve(B, G, cplx(0.0, 1.0));
  double err = 0;
  for (int j = 0; j < grid.n; ++j) err = std::max(err, std::abs(via[j] - b.values[j]));
  CHECK(err < 1e-12);
}

TEST_CASE("gaussian data decays at the dominant root rate") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  LinearRun run = run_linear(s, g, {1}, TimeGrid::from_range(0, 30, 0.02));
  REQUIRE(run.fits.count(1));
  CHECK(run.fits.at(1).gamma == doctest::Approx(0.402081).epsilon(0.01));
  CHECK_FALSE(run.growing);
  SpaceTimeField E = reconstruct_field(run);
  CHECK(E.nt() == run.grid.n);
  CHECK(E.nz() == 64);
}

TEST_CASE("unstable equilibrium is flagged as growing") {
  EquilibriumSpec s = EquilibriumSpec::quartic_gaussian(4.0);
  auto g = PerturbationSpec::cosine(1e-6, 1, VelocityProfile::gaussian(), 0.5);
  LinearRun run = run_linear(s, g, {1}, TimeGrid::from_range(0, 40, 0.05));
  CHECK(run.growing);
  CHECK(run.fits.at(1).gamma == doctest::Approx(-0.299332).epsilon(0.05));
}
