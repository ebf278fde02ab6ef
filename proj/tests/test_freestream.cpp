#include <doctest.h>

#include <cmath>

#include "landau/freestream.hpp"

using namespace landau;

TEST_CASE("gaussian free streaming closed form") {
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  for (double t : {0.0, 0.5, 1.0, 3.0, 6.0})
    for (double z : {0.0, 1.0, 2.5, 4.0})
      CHECK(std::abs(h_freestream(g, z, t) - 1e-3 * std::cos(z) * std::exp(-t * t / 4)) < 1e-15);
}

TEST_CASE("mode at t = 0 is the velocity integral") {
  auto g = PerturbationSpec::cosine(2.0, 3, VelocityProfile::lorentzian(1.0 / pi), 0.5);
  CHECK(std::abs(freestream_mode(g, 3, 0.0) - 1.0) < 1e-10);
  CHECK(std::abs(freestream_mode(g, 1, 2.0)) == 0.0);
  CHECK_THROWS(freestream_mode(g, 3, -1.0));
}

TEST_CASE("lorentzian profile decays at rate one") {
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::lorentzian(1.0 / pi), 1.0);
  for (double t : {0.5, 2.0, 5.0})
    CHECK(std::abs(h_freestream(g, 0.0, t) - 1e-3 * std::exp(-t)) < 1e-14);
  std::vector<double> ts;
  for (int k = 0; k <= 80; ++k) ts.push_back(0.25 * k);
  DecayBoundReport r = check_decay_bound(g, 0.9, ts);
  CHECK(r.pass);
  CHECK(r.fit.gamma == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("field sampling matches pointwise evaluation") {
  auto g = PerturbationSpec::cosine(1e-3, 2, VelocityProfile::gaussian(), 1.0);
  SpaceTimeField f = freestream_field(g, 16, {0.0, 1.0, 2.0});
  for (int it = 0; it < f.nt(); ++it)
    for (int iz = 0; iz < f.nz(); ++iz) {
      CHECK(std::abs(f.v(it, iz) - h_freestream(g, f.z[iz], f.t[it])) < 1e-15);
      double dz = -2e-3 * std::sin(2 * f.z[iz]) * std::exp(-f.t[it] * f.t[it]);
      CHECK(std::abs(f.dv(it, iz) - dz) < 1e-14);
    }
}
