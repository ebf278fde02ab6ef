#include <doctest.h>

#include <cmath>

#include "landau/dispersion.hpp"

using namespace landau;

TEST_CASE("kernel K closed forms") {
  EquilibriumSpec m = EquilibriumSpec::maxwellian(1.0);
  EquilibriumSpec l = EquilibriumSpec::lorentzian();
  for (double xi : {-2.0, 0.5, 1.0, 2.0, 4.0}) {
    CHECK(std::abs(kernel_K(m, xi) - I * xi * std::exp(-xi * xi / 4)) < 1e-10);
    CHECK(std::abs(kernel_K(l, xi) - I * xi * std::exp(-std::abs(xi))) < 1e-10);
  }
  CHECK(std::abs(kernel_K(m, 0.0)) < 1e-13);
}

TEST_CASE("lorentzian Q: continued residue form and the direct integral") {
  EquilibriumSpec s = EquilibriumSpec::lorentzian(1.0);
  for (cplx z : {cplx(0.5, 0.3), cplx(-1.2, 0.8), cplx(2.0, -0.4)}) {
    for (int n : {1, 2, 3}) {
      const double dn = n;
      // continuation from Re(z/n) > 0
      cplx d = z / dn + 1.0;
      cplx cont = I * (dn + pi / (dn * d * d));
      CHECK(std::abs(landau_Q(s, z, n) - cont) < 1e-9);
      // the direct integral picks the branch by sgn Re(z/n)
      double sg = (z / dn).real() > 0 ? 1.0 : -1.0;
      cplx e = z / dn + sg;
      cplx direct = I * (dn + pi / (dn * e * e));
      CHECK(std::abs(landau_Q_direct(s, z, n) - direct) < 1e-9);
    }
  }
}

TEST_CASE("Q conjugation symmetry in n") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  cplx z(0.7, 0.4);
  CHECK(std::abs(landau_Q(s, z, -2) - std::conj(landau_Q(s, std::conj(z), 2))) < 1e-14);
  CHECK_THROWS_AS(landau_Q(s, z, 0), ConfigError);
}

TEST_CASE("Phi continuation agrees with the direct integral in the upper half-plane") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  for (cplx z : {cplx(1.5, 0.2), cplx(0.4, -0.3)}) {
    for (int n : {1, 2}) CHECK(std::abs(landau_Q(s, z, n) - landau_Q_direct(s, z, n)) < 1e-9);
  }
}

TEST_CASE("maxwellian is stable over the first modes") {
  FindOptions fo;
  DispersionReport r = find_roots(EquilibriumSpec::maxwellian(1.0), SearchRegion::symmetric(3), fo);
  CHECK(r.verdict == "stable");
  CHECK(r.theta > 0);
  CHECK(r.nu0 > 0);
  for (const auto& m : r.modes) CHECK(m.winding == 0);
}

TEST_CASE("quartic gaussian with a = 4 is unstable") {
  DispersionReport r =
      find_roots(EquilibriumSpec::quartic_gaussian(4.0), SearchRegion::symmetric(1));
  CHECK(r.verdict == "unstable");
  REQUIRE(!r.modes.empty());
  CHECK(r.modes[0].winding == 1);
  REQUIRE(r.modes[0].roots.size() == 1);
  const cplx eta = r.modes[0].roots[0].eta;
  CHECK(eta.imag() > 0);
  CHECK(std::abs(landau_Phi(EquilibriumSpec::quartic_gaussian(4.0), eta, 1)) < 1e-8);
}

TEST_CASE("lorentzian damped roots") {
  EquilibriumSpec s = EquilibriumSpec::lorentzian(1.0);
  DispersionReport r = find_roots(s, SearchRegion::symmetric(2, 10, -2, 10));
  CHECK(r.verdict == "stable");
  for (const auto& m : r.modes) {
    REQUIRE(m.roots.size() == 2);
    const double an = std::abs(m.n);
    for (const auto& rt : m.roots) {
      CHECK(std::abs(rt.eta.imag() + 1.0) < 1e-8);
      CHECK(std::abs(std::abs(rt.eta.real()) - sqrt_pi / an) < 1e-8);
    }
  }
}

TEST_CASE("dominant root of the maxwellian") {
  EquilibriumSpec s = EquilibriumSpec::maxwellian(1.0);
  SearchRegion reg;
  reg.im_min = phi_depth_limit(s) + 0.01;
  cplx eta;
  REQUIRE(dominant_root(s, 1, reg, eta));
  CHECK(eta.imag() == doctest::Approx(-0.402081).epsilon(1e-5));
  CHECK(std::abs(landau_Phi(s, eta, 1)) < 1e-8);
}

TEST_CASE("search region validation") {
  SearchRegion r = SearchRegion::symmetric(2, 10, 0, -1);
  CHECK_THROWS_AS(r.check(), ConfigError);
  SearchRegion deep = SearchRegion::symmetric(1, 10, -5, 10);
  CHECK_THROWS_AS(find_roots(EquilibriumSpec::maxwellian(1.0), deep), ConfigError);
}
