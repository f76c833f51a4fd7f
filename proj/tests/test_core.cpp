#include <doctest.h>

#include <cmath>
#include <set>

#include "rgl/hyperbolic.hpp"
#include "rgl/lyapunov.hpp"
#include "rgl/numeric.hpp"
#include "rgl/orbit.hpp"
#include "rgl/rng.hpp"
#include "rgl/sampler.hpp"

using namespace rgl;

TEST_CASE("counter-based draws are pure functions of (seed, stream, index)") {
  CHECK(uniform01(5, stream::noise, 17) == uniform01(5, stream::noise, 17));
  CHECK(uniform01(5, stream::noise, 17) != uniform01(6, stream::noise, 17));
  std::set<std::uint64_t> kids;
  for (std::uint64_t i = 0; i < 1000; ++i) kids.insert(child_seed(9, i));
  CHECK(kids.size() == 1000);
  double mean = 0;
  for (int i = 0; i < 100000; ++i) mean += uniform01(3, stream::aux, i);
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("exact sum does not depend on grouping") {
  std::vector<double> v{1e16, 1.0, -1e16, 3.5, 1e-9, -2.25};
  ExactSum a, b;
  for (double x : v) a.add(x);
  for (auto it = v.rbegin(); it != v.rend(); ++it) b.add(*it);
  CHECK(a.value() == b.value());
  CHECK(a.value() == doctest::Approx(2.25 + 1e-9));
}

TEST_CASE("parallel_for writes by index") {
  std::vector<int> out(1000, 0);
  parallel_for(1000, 4, [&](std::int64_t i) { out[i] = static_cast<int>(i * i % 97); });
  for (int i = 0; i < 1000; ++i) CHECK(out[i] == i * i % 97);
}

TEST_CASE("family kernels") {
  auto d = MapFamily::doubling(0.0);
  CHECK(d.eval(0.1, 0.7) == doctest::Approx(0.5));
  CHECK(d.derivative(0.3, 0.2) == 2.0);
  auto n = MapFamily::nonlinear(2, 0.1);
  for (double x : {0.0, 0.13, 0.5, 0.91}) {
    double h = 1e-6;
    double num = (n.lift(0.02, x + h) - n.lift(0.02, x - h)) / (2 * h);
    CHECK(n.derivative(0.02, x) == doctest::Approx(num).epsilon(1e-8));
    double v = n.lift(0.02, x);
    CHECK(n.inverse_lift(0.02, v) == doctest::Approx(x).epsilon(1e-14));
  }
  long double F, dF;
  n.lift_deriv<long double>(0.01, 0.3L, F, dF);
  CHECK(static_cast<double>(F) == doctest::Approx(n.lift(0.01, 0.3)).epsilon(1e-15));
  CHECK(static_cast<double>(n.inverse_lift_from<long double>(0.01, F + 0.001L, 0.3L, F, dF)) ==
        doctest::Approx(n.inverse_lift(0.01, static_cast<double>(F) + 0.001)).epsilon(1e-14));
  auto pre = d.preimages1(0.0, 0.5);
  REQUIRE(pre.size() == 2);
  CHECK(pre[0] == doctest::Approx(0.25));
  CHECK(pre[1] == doctest::Approx(0.75));
}

TEST_CASE("non-expanding parameters are rejected") {
  CHECK_THROWS(MapFamily::nonlinear(2, 0.2));
  CHECK_THROWS_AS(check_family(MapFamily::quadratic(2.0), NoiseKernel::uniform(2.0, 0.1)), DomainError);
  CHECK_NOTHROW(check_family(MapFamily::nonlinear(2, 0.1), NoiseKernel::uniform(0, 0.05)));
}

TEST_CASE("realizations: prefix stability and shifts") {
  auto k = NoiseKernel::uniform(0.0, 0.1);
  auto w = make_realization(k, 11, 100);
  auto w2 = make_realization(k, 11, 500);
  for (int i = 0; i < 100; ++i) CHECK(w.param(i) == w2.param(i));
  auto s = w2.shifted(37);
  CHECK(s.param(0) == w2.param(37));
  for (int i = 0; i < 100; ++i) {
    CHECK(w.param(i) >= -0.1);
    CHECK(w.param(i) <= 0.1);
  }
}

TEST_CASE("skew step agrees with the orbit") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto w = make_realization(NoiseKernel::uniform(0.0, 0.05), 4, 50);
  auto o = random_orbit(f, w, 0.3, 50);
  SkewState s{0, 0.3};
  for (int i = 0; i < 50; ++i) s = skew_step(f, w, s);
  CHECK(s.x == o.points.back());
}

TEST_CASE("doubling exponent is log 2 exactly") {
  auto f = MapFamily::doubling();
  auto w = make_realization(NoiseKernel::uniform(0.0, 0.25), 2, 10000);
  auto e = estimate_exponent(random_orbit(f, w, 0.1, 10000), 0);
  CHECK(std::fabs(e.value - std::log(2.0)) < 1e-15);
}

TEST_CASE("power exponent regroups the same base terms") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto base = estimate_power_exponent(f, k, 8, 0.2, 1, 24000);
  for (int N : {2, 3, 4, 8}) {
    auto p = estimate_power_exponent(f, k, 8, 0.2, N, 24000 / N);
    CHECK(p.sum == base.sum);
    CHECK(p.value == doctest::Approx(N * base.value).epsilon(1e-14));
  }
}

TEST_CASE("hyperbolic-time scan matches brute force") {
  for (int r = 0; r < 30; ++r) {
    std::vector<double> ld(400);
    for (int i = 0; i < 400; ++i) ld[i] = -1.0 + 2.5 * uniform01(r, stream::aux, i);
    CHECK(hyperbolic_times(ld, 0.75).times == hyperbolic_times_bruteforce(ld, 0.75));
  }
  std::vector<double> dbl(100, std::log(2.0));
  CHECK(hyperbolic_times(dbl, 0.75).frequency == 1.0);
}

TEST_CASE("nuero: doubling passes at a0 = 0.5 and fails at 0.8") {
  auto f = MapFamily::doubling();
  auto k = NoiseKernel::uniform(0.0, 0.1);
  CHECK(nuero_check(f, k, 0.5, 100, 500, lebesgue_sampler(f), 3).pass);
  CHECK_FALSE(nuero_check(f, k, 0.8, 100, 500, lebesgue_sampler(f), 3).pass);
}
