#include <doctest.h>

#include <cstdlib>
#include <stdexcept>

#include "landau/dispersion.hpp"
#include "landau/freestream.hpp"
#include "landau/nonlinear.hpp"
#include "landau/parallel.hpp"

using namespace landau;

namespace {

struct Threads {
  explicit Threads(int n) : saved(max_threads()) { set_threads(n); }
  ~Threads() { set_threads(saved); }
  int saved;
};

FieldIterate small_field() {
  TimeGrid grid = TimeGrid::from_range(0.0, 8.0, 0.05);
  FieldIterate E = FieldIterate::zero(grid, 0.5, 2);
  for (int j = 0; j < grid.n; ++j) {
    E.modes[1][j] = 1e-3 * std::exp(-grid.t(j)) * cplx(1.0, 0.3);
    E.modes[-1][j] = std::conj(E.modes[1][j]);
  }
  E.norm = weighted_norm(E);
  return E;
}

}  // namespace

TEST_CASE("parallel_for covers every index and rethrows") {
  Threads th(4);
  std::vector<int> hit(1000, 0);
  parallel_for(1000, Exec::parallel, [&](long i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, Exec::parallel,
                               [](long i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  setenv("LANDAU_THREADS", "2", 1);
  CHECK(resolve_threads(0) == 2);
  unsetenv("LANDAU_THREADS");
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("serial and parallel root search agree bit for bit") {
  Threads th(4);
  FindOptions a, b;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  auto spec = EquilibriumSpec::quartic_gaussian(4.0);
  auto region = SearchRegion::symmetric(2);
  DispersionReport rs = find_roots(spec, region, a), rp = find_roots(spec, region, b);
  CHECK(rs.verdict == rp.verdict);
  CHECK(rs.theta == rp.theta);
  REQUIRE(rs.modes.size() == rp.modes.size());
  for (size_t i = 0; i < rs.modes.size(); ++i) {
    CHECK(rs.modes[i].winding == rp.modes[i].winding);
    REQUIRE(rs.modes[i].roots.size() == rp.modes[i].roots.size());
    for (size_t k = 0; k < rs.modes[i].roots.size(); ++k)
      CHECK(rs.modes[i].roots[k].eta == rp.modes[i].roots[k].eta);
  }
}

TEST_CASE("serial and parallel free streaming agree bit for bit") {
  Threads th(4);
  auto g = PerturbationSpec::cosine(1e-3, 2, VelocityProfile::lorentzian(1.0 / pi), 0.5);
  FreestreamOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  std::vector<double> t{0.0, 0.5, 1.0, 2.0, 4.0};
  SpaceTimeField a = freestream_field(g, 16, t, s), b = freestream_field(g, 16, t, p);
  CHECK(a.value == b.value);
  CHECK(a.dvalue == b.dvalue);
}

TEST_CASE("serial and parallel nonlinear kernels agree bit for bit") {
  Threads th(4);
  FieldIterate E = small_field();
  auto g = PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0);
  std::vector<double> t{0.0, 0.5, 1.5}, z{0.0, 2.0}, w{-1.0, 0.0, 0.5, 1.5};
  CharEndpoints a = compute_endpoints(E, t, z, w, {}, Exec::serial);
  CharEndpoints b = compute_endpoints(E, t, z, w, {}, Exec::parallel);
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].V_inf == b.entries[i].V_inf);
    CHECK(a.entries[i].Z_inf == b.entries[i].Z_inf);
    CHECK(a.entries[i].dV1 == b.entries[i].dV1);
  }
  LTable tab(g, E.grid.h);
  CHECK(source_L_modes(tab, E, 1e-2, 3, Exec::serial) ==
        source_L_modes(tab, E, 1e-2, 3, Exec::parallel));
  RtildeOptions ro;
  ro.T_R = 2.0;
  RtildeSamples rs = source_Rtilde_samples(EquilibriumSpec::maxwellian(1.0), g, E, ro, Exec::serial);
  RtildeSamples rp = source_Rtilde_samples(EquilibriumSpec::maxwellian(1.0), g, E, ro, Exec::parallel);
  CHECK(rs.modes == rp.modes);
}
