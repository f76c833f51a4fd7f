#include <doctest.h>

#include <cmath>

#include "rgl/gmy.hpp"
#include "rgl/rng.hpp"

using namespace rgl;

namespace {

GmyOptions coarse() {
  GmyOptions o;
  o.min_element = 1e-5;
  return o;
}

void check_structure(const GmyPartition& P) {
  for (std::size_t i = 0; i < P.elements.size(); ++i) {
    const auto& e = P.elements[i];
    CHECK(e.R >= P.c.R0);
    CHECK(e.R == e.n + e.m);
    CHECK(e.m <= P.c.N0);
    CHECK(e.a >= P.c.lo());
    CHECK(e.b <= P.c.hi());
    if (i) CHECK(P.elements[i - 1].b <= e.a + 1e-12L);
  }
  for (int n = 1; n <= P.n_max; ++n) CHECK(P.residual_mass[n] <= P.residual_mass[n - 1] + 1e-15);
  long double cum = 0;
  std::vector<long double> by_R(P.n_max + 1, 0.0L);
  for (auto& e : P.elements) by_R[e.R] += e.b - e.a;
  for (int n = 0; n <= P.n_max; ++n) {
    cum += by_R[n];
    CHECK(std::fabs(static_cast<double>(P.delta_mass() - cum) - P.residual_mass[n]) < 1e-9);
  }
}

}  // namespace

TEST_CASE("doubling constants") {
  auto f = MapFamily::doubling();
  auto k = NoiseKernel::uniform(0.0, 0.1);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  CHECK(c.p == 0.0);
  CHECK(c.N0 == 3);
  CHECK(c.K0 == std::pow(2.0, c.N0));
  CHECK(c.eta == 1 + c.R0 + c.N0);
  CHECK(c.kappa < 0.9);
  // R0 is the least value with K0 lambda^((R0 - N0)/2) < 0.9
  CHECK(c.K0 * std::pow(c.lambda, (c.R0 - 1 - c.N0) / 2.0) >= 0.9);
  CHECK(c.delta0 == doctest::Approx(0.3));
}

TEST_CASE("doubling preimage depth for delta1 = 0.1") {
  // dyadic preimages of 0 at level j have mesh 2^-j; need 2^-(j+1) <= delta1 / 4
  std::vector<std::vector<double>> words{std::vector<double>(40, 0.0)};
  CHECK(least_dense_depth(MapFamily::doubling(), words, 0.0, 0.1 / 4, 30) == 5);
}

TEST_CASE("dirac doubling: elements are dyadic") {
  auto f = MapFamily::doubling();
  auto k = NoiseKernel::dirac(0.0);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  auto P = build_partition(f, make_realization(k, 1, 40), c, 24, GmyOptions{});
  REQUIRE(!P.elements.empty());
  check_structure(P);
  for (auto& e : P.elements) {
    long double scale = std::ldexp(1.0L, e.R);
    CHECK(static_cast<double>((e.b - e.a) * scale) == doctest::Approx(2 * c.delta0).epsilon(1e-9));
    long double img = e.a * scale + c.delta0;
    CHECK(std::fabs(static_cast<double>(img - std::round(img))) < 1e-6);
  }
  // geometric decay (about 0.7 per step) until pre-balls reach the precision floor near n = 21
  CHECK(P.residual_mass[20] < 0.05 * P.residual_mass[c.R0]);
}

TEST_CASE("nonlinear partition verifies") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  auto P = build_partition(f, make_realization(k, 3, 60), c, 24, coarse());
  check_structure(P);
  auto v = verify_gmy(f, P);
  CHECK(v.ok);
  CHECK(v.max_distortion_ratio <= 1.0);
  CHECK(v.min_log_expansion_margin > 0.0);
  auto s = satellite_mass_series(P);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);
}

TEST_CASE("restricted build agrees with the full build on its queries") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  auto w = make_realization(k, 5, 60);
  auto full = build_partition(f, w, c, 26, coarse());
  auto q = covering_points(c, 200, 77);
  auto part = build_partition(f, w, c, 26, coarse(), &q);
  CHECK(part.restricted);
  for (long double x : q) {
    auto a = full.locate(x);
    auto b = part.locate(x);
    REQUIRE((a == nullptr) == (b == nullptr));
    if (a) {
      CHECK(a->a == b->a);
      CHECK(a->b == b->b);
      CHECK(a->R == b->R);
    }
  }
  auto cf = covering_check(f, full, 150, 77, 200);
  auto cp = covering_check(f, part, 150, 77, 200);
  CHECK(cf.misses == 0);
  CHECK(cp.misses == 0);
  CHECK(cf.in_elements == cp.in_elements);
}

TEST_CASE("elements with R <= l only read the first l parameters") {
  auto f = MapFamily::nonlinear(2, 0.1);
  auto k = NoiseKernel::uniform(0.0, 0.05);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  const int n_max = 24, ell = 18;
  auto w = make_realization(k, 9, n_max + c.N0 + 2);
  auto p1 = w.window(0, n_max + c.N0 + 2);
  auto p2 = p1;
  for (std::size_t i = ell; i < p2.size(); ++i) p2[i] = k.from_uniform(uniform01(123, stream::aux, i));
  auto A = build_partition(f, p1, c, n_max, coarse());
  auto B = build_partition(f, p2, c, n_max, coarse());
  std::vector<PartitionElement> ea, eb;
  for (auto& e : A.elements)
    if (e.R <= ell) ea.push_back(e);
  for (auto& e : B.elements)
    if (e.R <= ell) eb.push_back(e);
  REQUIRE(ea.size() == eb.size());
  CHECK(!ea.empty());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].a == eb[i].a);
    CHECK(ea[i].b == eb[i].b);
    CHECK(ea[i].R == eb[i].R);
  }
  for (int n = 0; n <= ell; ++n) CHECK(A.residual_mass[n] == B.residual_mass[n]);
}

TEST_CASE("unresolved rest counts as satellite at every later step") {
  auto f = MapFamily::doubling();
  auto k = NoiseKernel::uniform(0.0, 0.1);
  auto c = choose_inducing_domain(f, k, GmyOptions{});
  auto P = build_partition(f, make_realization(k, 3, 60), c, 30, coarse());
  int frozen = 0;
  for (int n = c.R0; n <= 30; ++n)
    if (P.unresolved_mass[n] > 0) {
      ++frozen;
      CHECK(P.satellite_mass[n] >= P.unresolved_mass[n] - 1e-15);
      CHECK(P.unresolved_mass[n] == doctest::Approx(P.residual_mass[n]).epsilon(1e-9));
    }
  CHECK(frozen > 0);
}
