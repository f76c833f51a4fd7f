#include <doctest.h>

#include <cmath>

#include "rgl/tower.hpp"

using namespace rgl;

namespace {

struct Setup {
  MapFamily f = MapFamily::doubling();
  NoiseKernel k = NoiseKernel::uniform(0.0, 0.1);
  GmyOptions g;
  GmyConstants c;
  TowerOptions t;
  Setup() {
    c = choose_inducing_domain(f, k, g);
    t.depth = 20;
    t.n_max = 24;
    t.n_realizations = 4;
  }
};

}  // namespace

TEST_CASE("shift window masks the future") {
  auto k = NoiseKernel::uniform(0.25, 0.1);
  auto w = make_realization(k, 3, 100, Sidedness::TwoSided, 50);
  auto v = shift_window(w, -10, 20, 0);
  REQUIRE(v.size() == 20);
  for (int i = 0; i < 10; ++i) CHECK(v[i] == w.param(-10 + i));
  for (int i = 10; i < 20; ++i) CHECK(v[i] == 0.25);
  auto u = shift_window(w, 5, 8);
  for (int i = 0; i < 8; ++i) CHECK(u[i] == w.param(5 + i));
}

TEST_CASE("integer counting check") {
  TowerOrbitStats s{100, 20, 5, 1};
  CHECK(counting_inequality_check(s, 15.0));
  s.H_n = 21;
  CHECK_FALSE(counting_inequality_check(s, 15.0));
}

TEST_CASE("tower step is f^R along the skew product") {
  Setup s;
  auto w = make_realization(s.k, 21, 200, Sidedness::TwoSided, 60);
  for (long double x : {-0.21L, 0.013L, 0.17L}) {
    TowerStep st;
    try {
      st = tower_map_step(s.f, w, x, s.c, s.g, s.t);
    } catch (const NoReturnError&) {
      continue;
    }
    CHECK(st.R >= s.c.R0);
    CHECK(st.y >= s.c.lo());
    CHECK(st.y < s.c.hi());
    Realization v = w;
    SkewState z{0, wrap01(static_cast<double>(x))};
    for (int j = 0; j < st.R; ++j) z = skew_step(s.f, v, z);
    CHECK(std::fabs(static_cast<double>(wrap01(st.y)) - z.x) < 1e-9);
    CHECK(st.next.param(0) == w.param(st.R));
  }
}

TEST_CASE("counting inequality along one orbit") {
  Setup s;
  auto w = make_realization(s.k, 8, 400, Sidedness::TwoSided, 60);
  std::vector<TowerOrbitStats> series;
  try {
    series = orbit_stats_series(s.f, w, 0.05L, 200, s.c, 0.75, s.g, s.t);
  } catch (const NoReturnError&) {
    return;
  }
  REQUIRE(series.size() == 200);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(counting_inequality_check(series[i], s.c.eta));
    CHECK(series[i].H_n <= series[i].n);
    if (i) CHECK(series[i].R_n >= series[i - 1].R_n);
  }
}

TEST_CASE("induced measure converges and stays bounded") {
  Setup s;
  auto w = make_realization(s.k, 2, 100, Sidedness::TwoSided, 80);
  auto m = induced_measure(s.f, w, s.c, s.g, s.t);
  CHECK(m.nu.total_mass() > 0.0);
  CHECK(m.K1 < 10.0);
  CHECK(m.convergence_l1 < s.t.convergence_tol);
}

TEST_CASE("doubling projection: uniform oracle and discrete Fubini") {
  Setup s;
  auto p = tower_projection(s.f, s.k, s.c, s.g, s.t, 4);
  CHECK(p.fubini_gap < 1e-9);
  CHECK(tv_distance(p.mu.rebinned(64), Density::uniform(0, 1, 64)) < 0.05);
  CHECK(std::fabs(p.tail_sum - p.return_integral) < 1e-9);
  for (std::size_t n = 1; n < p.tail.size(); ++n) CHECK(p.tail[n] <= p.tail[n - 1] + 1e-15);
}
