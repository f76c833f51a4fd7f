#include <doctest.h>

#include <cmath>

#include "rgl/config.hpp"

using namespace rgl;

TEST_CASE("sections prefix keys") {
  auto c = Config::defaults();
  c.load_text("[family]\nkind = expanding-nonlinear  # comment\nalpha=0.05\n\n[noise]\nepsilon = 0.02\n");
  CHECK(c.str("family.kind") == "expanding-nonlinear");
  CHECK(c.num("family.alpha") == 0.05);
  CHECK(c.kernel().epsilon == 0.02);
  CHECK(c.family().kind == FamilyKind::ExpandingNonlinear);
}

TEST_CASE("unknown keys and bad values are rejected") {
  auto c = Config::defaults();
  CHECK_THROWS_AS(c.load_text("[family]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(c.set_override("tower.nope=1"), ConfigError);
  CHECK_THROWS_AS(c.set_override("no_equals_sign"), ConfigError);
  c.set("orbit.n", "12x");
  CHECK_THROWS_AS(c.integer("orbit.n"), ConfigError);
  c.set("family.kind", "tent");
  CHECK_THROWS_AS(c.family(), ConfigError);
}

TEST_CASE("lists and overrides") {
  auto c = Config::defaults();
  c.set_override("stab.eps_list = 0.2, 0.1,0.05");
  CHECK(c.nums("stab.eps_list") == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.ints("lyap.N_list") == std::vector<int>{1, 2, 3, 4, 8});
  CHECK(std::isnan(c.gmy_options().p));
}

TEST_CASE("resolved text and hash are canonical") {
  auto a = Config::defaults();
  auto b = Config::defaults();
  b.set("run.seed", "9");
  b.set("run.seed", "1");
  CHECK(a.resolved() == b.resolved());
  CHECK(a.hash() == b.hash());
  b.set("run.seed", "2");
  CHECK(a.hash() != b.hash());
  auto c = Config::defaults();
  c.load_text(a.resolved());
  CHECK(c.resolved() == a.resolved());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
