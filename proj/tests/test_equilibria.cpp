#include <doctest.h>

#include <cmath>

#include "landau/equilibria.hpp"
#include "landau/numerics.hpp"

using namespace landau;

namespace {
double mass(const VelocityProfile& p) {
  return integrate_line_t([&](cplx v) { return p.value(v); }, Contour::real(), 1e-12).value.real();
}
}  // namespace

TEST_CASE("profiles are normalized") {
  CHECK(mass(VelocityProfile::gaussian()) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(mass(VelocityProfile::gaussian(0.5)) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(mass(VelocityProfile::lorentzian()) == doctest::Approx(1.0).epsilon(1e-10));
  for (double a : {0.5, 1.0, 2.0, 4.0})
    CHECK(mass(VelocityProfile::quartic_gaussian(a)) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("profile derivatives match finite differences") {
  const double d = 1e-5;
  for (const auto& p : {VelocityProfile::gaussian(), VelocityProfile::lorentzian(1.0),
                        VelocityProfile::quartic_gaussian(2.0)}) {
    for (cplx v : {cplx(0.3, 0.0), cplx(-1.2, 0.2), cplx(2.0, -0.1)}) {
      cplx fd = (p.value(v + d) - p.value(v - d)) / (2 * d);
      CHECK(std::abs(fd - p.deriv(v)) < 1e-8);
    }
  }
}

TEST_CASE("lorentzian poles and singular distance") {
  VelocityProfile p = VelocityProfile::lorentzian(1.0);
  CHECK(p.singular_distance() == doctest::Approx(1.0));
  PoleSet ps = p.poles();
  CHECK(ps.poles.size() == 2);
  CHECK(VelocityProfile::gaussian().entire());
}

TEST_CASE("cosine perturbation evaluates to eps cos(nx) p(v)") {
  PerturbationSpec g = PerturbationSpec::cosine(1e-3, 2, VelocityProfile::gaussian(), 1.0);
  for (double x : {0.0, 0.7, 2.5})
    for (double v : {-1.0, 0.0, 0.4}) {
      double want = 1e-3 * std::cos(2 * x) * std::exp(-v * v) / sqrt_pi;
      CHECK(std::abs(eval_g(g, x, v) - want) < 1e-18);
      double dz = -2e-3 * std::sin(2 * x) * std::exp(-v * v) / sqrt_pi;
      CHECK(std::abs(eval_g_dz(g, x, v) - dz) < 1e-18);
    }
  CHECK(g.max_mode() == 2);
}

TEST_CASE("gaussian mode transform closed form") {
  PerturbationSpec g = PerturbationSpec::cosine(1.0, 1, VelocityProfile::gaussian(), 1.0);
  for (double k : {0.0, 0.5, 2.0, -3.0}) {
    cplx m = mode_transform(g, 1, k, 0.5);
    CHECK(std::abs(m - 0.5 * std::exp(-k * k / 4)) < 1e-12);
  }
}

TEST_CASE("zero-mean mode is rejected") {
  PerturbationSpec g;
  g.eps = 1e-3;
  g.modes.push_back({0, VelocityProfile::gaussian(), 1.0});
  CHECK_THROWS_AS(g.check(), MeanViolation);
}

TEST_CASE("strip and alpha checks") {
  CHECK_THROWS_AS(EquilibriumSpec::lorentzian(1.0 / pi, 1.5, 1.5), ConfigError);
  EquilibriumSpec s = EquilibriumSpec::maxwellian();
  CHECK_THROWS_AS(eval_fe(s, cplx(0.0, 2.0 * s.A)), StripViolation);
}

TEST_CASE("validation passes for the standard families") {
  for (const auto& s : {EquilibriumSpec::maxwellian(1.0), EquilibriumSpec::lorentzian(),
                        EquilibriumSpec::quartic_gaussian(1.0)}) {
    ValidationReport r = validate_assumptions(s);
    CHECK(r.pass);
    CHECK(r.normalization == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.B_scan > 0);
  }
}

TEST_CASE("json round trip") {
  EquilibriumSpec s = EquilibriumSpec::quartic_gaussian(2.0, 0.4, 3.0);
  nlohmann::json j;
  to_json(j, s);
  EquilibriumSpec back;
  from_json(j, back);
  CHECK(back.family == Family::quartic_gaussian);
  CHECK(back.profile.a == 2.0);
  CHECK(back.A == 0.4);

  PerturbationSpec g = PerturbationSpec::cosine(2e-3, 3, VelocityProfile::lorentzian(1.0 / pi), 0.5);
  nlohmann::json jg;
  to_json(jg, g);
  PerturbationSpec gb;
  from_json(jg, gb);
  CHECK(gb.eps == 2e-3);
  CHECK(std::abs(eval_g(gb, 0.3, 0.2) - eval_g(g, 0.3, 0.2)) < 1e-18);
}
