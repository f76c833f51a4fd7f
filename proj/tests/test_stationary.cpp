#include <doctest.h>

#include <cmath>

#include "rgl/stationary.hpp"

using namespace rgl;

TEST_CASE("ulam rows are stochastic") {
  for (auto f : {MapFamily::doubling(), MapFamily::nonlinear(2, 0.1), MapFamily::quadratic(1.5)}) {
    auto k = f.is_circle() ? NoiseKernel::uniform(0.0, 0.05) : NoiseKernel::uniform(1.5, 0.05);
    auto op = build_ulam(f, k, 128, 8);
    for (int i = 0; i < op.bins; ++i) CHECK(op.row_sum(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ulam: doubling density is uniform") {
  auto u = ulam_stationary(build_ulam(MapFamily::doubling(), NoiseKernel::uniform(0.0, 0.1), 256, 8));
  for (double w : u.density.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ulam bins must be a power of two") {
  CHECK_THROWS_AS(build_ulam(MapFamily::doubling(), NoiseKernel::uniform(0.0, 0.1), 100, 8), std::invalid_argument);
}

TEST_CASE("birkhoff agrees with ulam for the nonlinear family") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto u = ulam_stationary(build_ulam(f, k, 512, 16));
  auto b = birkhoff_histogram(f, k, 4, 100000, 512, 3, 2);
  CHECK(tv_distance(u.density.rebinned(64), b.rebinned(64)) < 0.05);
  for (double r : stationarity_residuals(f, k, u.density)) CHECK(r < 1e-2);
}

TEST_CASE("birkhoff is the same at any worker count") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto a = birkhoff_histogram(f, k, 5, 20000, 64, 9, 1);
  auto b = birkhoff_histogram(f, k, 5, 20000, 64, 9, 3);
  CHECK(a.weights == b.weights);
}

TEST_CASE("one component for doubling") {
  for (int N : {1, 2, 4}) {
    auto r = n_ergodic_components(MapFamily::doubling(), NoiseKernel::uniform(0.0, 0.1), N, 8, 10000, 32, 5);
    CHECK(r.k == 1);
    CHECK(r.masses[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("density exponent of a constant-slope map") {
  auto f = MapFamily::doubling();
  auto k = NoiseKernel::uniform(0.0, 0.1);
  CHECK(density_exponent(f, k, Density::uniform(0, 1, 32)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("stability sweep converges to the unperturbed density") {
  auto s = stability_sweep(MapFamily::nonlinear(2, 0.1), 0.0, {0.1, 0.05, 0.02}, 256, 8);
  CHECK(s.limit_is_deterministic);
  CHECK(s.distances_to_limit[2] < s.distances_to_limit[0]);
  CHECK_THROWS_AS(stability_sweep(MapFamily::doubling(), 0.0, {0.01, 0.1}, 64, 4), std::invalid_argument);
}

TEST_CASE("quadratic table") {
  auto rows = quadratic_counterexample({0.5, 1.76, 2.0}, 50000, 2, 1);
  CHECK(rows[0].period == 1);
  CHECK(rows[0].exponent == doctest::Approx(std::log(std::sqrt(3.0) - 1.0)).epsilon(1e-6));
  CHECK(rows[1].period == 3);
  CHECK(rows[1].exponent < -0.1);
  CHECK(rows[1].cycle_multiplier < 1.0);
  CHECK(rows[2].period == 0);
  CHECK(rows[2].exponent > 0.6);
  CHECK_THROWS_AS(quadratic_counterexample({2.1}, 1000, 1, 1), DomainError);
}
