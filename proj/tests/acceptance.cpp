// One PASS/FAIL line per acceptance criterion. `acceptance` runs all; `acceptance 5 8` runs a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>
#include <string>

#include "rgl/config.hpp"
#include "rgl/gmy.hpp"
#include "rgl/hyperbolic.hpp"
#include "rgl/lyapunov.hpp"
#include "rgl/orbit.hpp"
#include "rgl/rng.hpp"
#include "rgl/runner.hpp"
#include "rgl/sampler.hpp"
#include "rgl/stationary.hpp"
#include "rgl/tower.hpp"

using namespace rgl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double x) {
  char b[64];
  std::snprintf(b, sizeof b, f, x);
  return b;
}

const MapFamily kDoubling = MapFamily::doubling();
const MapFamily kNonlinear = MapFamily::nonlinear(2, 0.1);

Outcome exponent_oracle() {
  Outcome o;
  double worst = 0.0;
  for (double eps : {0.0, 0.05, 0.1, 0.25}) {
    auto w = make_realization(NoiseKernel::uniform(0.0, eps), 17, 100000);
    auto e = estimate_exponent(random_orbit(kDoubling, w, 0.3141, 100000), 0);
    worst = std::max(worst, std::fabs(e.value - std::log(2.0)));
  }
  o.require(worst <= 4e-16, "max |estimate - log 2| = " + fmt("%.2e", worst));
  return o;
}

Outcome power_law() {
  Outcome o;
  const std::int64_t base_steps = 24000;
  for (auto [f, eps] : {std::pair{kDoubling, 0.1}, std::pair{kNonlinear, 0.05}}) {
    auto k = NoiseKernel::uniform(0.0, eps);
    for (std::uint64_t s = 0; s < 8; ++s) {
      auto one = estimate_power_exponent(f, k, s, 0.1 + 0.1 * s, 1, base_steps);
      for (int N : {1, 2, 3, 4, 8}) {
        auto p = estimate_power_exponent(f, k, s, 0.1 + 0.1 * s, N, base_steps / N);
        bool same = p.sum == one.sum && std::fabs(p.value - N * one.value) <= 1e-14 * std::fabs(N * one.value);
        if (!same) {
          o.require(false, to_string(f.kind) + " N=" + std::to_string(N));
          return o;
        }
      }
    }
  }
  o.require(true, "sums identical bit for bit for N in {1,2,3,4,8}, 16 shared realizations");
  return o;
}

Outcome scan() {
  Outcome o;
  int mismatches = 0;
  for (int r = 0; r < 100; ++r) {
    std::vector<double> ld(1000);
    for (int i = 0; i < 1000; ++i) ld[i] = -1.2 + 2.4 * uniform01(1000 + r, stream::aux, i);
    if (hyperbolic_times(ld, 0.75).times != hyperbolic_times_bruteforce(ld, 0.75)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " of 100 sequences differ from brute force");
  auto fe = frequency_estimate(kDoubling, NoiseKernel::uniform(0, 0.1), 0.75, 100, 1000, lebesgue_sampler(kDoubling), 3);
  double mn = 1.0;
  for (auto& s : fe.orbits) mn = std::min(mn, s.frequency);
  o.require(mn == 1.0, "doubling min frequency " + fmt("%.4f", mn));
  return o;
}

Outcome nuero() {
  Outcome o;
  auto k = NoiseKernel::uniform(0.0, 0.1);
  auto a = nuero_check(kDoubling, k, 0.5, 1000, 1000, lebesgue_sampler(kDoubling), 5);
  auto b = nuero_check(kDoubling, k, 0.8, 1000, 1000, lebesgue_sampler(kDoubling), 5);
  o.require(a.pass && a.fraction_below == 1.0, "a0=0.5 pass with " + fmt("%.1f", 100 * a.fraction_below) + "% below");
  o.require(!b.pass && b.fraction_below == 0.0,
            "a0=0.8 fail with " + fmt("%.1f", 100 * (1 - b.fraction_below)) + "% of orbits above -a0");
  return o;
}

Outcome gmy_verification() {
  Outcome o;
  GmyOptions g;
  for (auto [f, eps] : {std::pair{kDoubling, 0.1}, std::pair{kNonlinear, 0.05}}) {
    auto k = NoiseKernel::uniform(0.0, eps);
    auto c = choose_inducing_domain(f, k, g);
    int failures = 0, elements = 0;
    double res = 0.0, K = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto P = build_partition(f, make_realization(k, child_seed(50, s), 60 + c.N0 + 5), c, 60, g);
      auto v = verify_gmy(f, P);
      failures += v.failures + (v.ok ? 0 : 1);
      elements += v.elements;
      res = std::max(res, P.residual_mass[60]);
      K = std::max(K, v.empirical_K);
    }
    o.require(failures == 0 && res < 0.01, to_string(f.kind) + ": " + std::to_string(elements) + " elements, " +
                                               std::to_string(failures) + " failures, max residual(60) " +
                                               fmt("%.4f", res) + ", empirical K " + fmt("%.3f", K));
  }
  return o;
}

Outcome covering() {
  Outcome o;
  GmyOptions g;
  for (auto [f, eps] : {std::pair{kDoubling, 0.1}, std::pair{kNonlinear, 0.05}}) {
    auto k = NoiseKernel::uniform(0.0, eps);
    auto c = choose_inducing_domain(f, k, g);
    int misses = 0, samples = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const auto s = child_seed(60, r);
      auto q = covering_points(c, 1200, s);
      auto P = build_partition(f, make_realization(k, s, 60 + c.N0 + 5), c, 60, g, &q);
      auto rep = covering_check(f, P, 1000, s, 1200);
      misses += rep.misses;
      samples += rep.samples;
    }
    o.require(misses == 0 && samples == 20000,
              to_string(f.kind) + ": " + std::to_string(misses) + " misses in " + std::to_string(samples));
  }
  return o;
}

Outcome counting() {
  Outcome o;
  GmyOptions g;
  TowerOptions t;
  auto k = NoiseKernel::uniform(0.0, 0.1);
  auto c = choose_inducing_domain(kDoubling, k, g);
  auto r = counting_experiment(kDoubling, k, c, g, t, 1000, 1000, 0.75, 7);
  o.require(r.orbits == 1000 && r.violations == 0 && r.prefix_violations == 0,
            "eta " + fmt("%.0f", c.eta) + ", " + std::to_string(r.orbits) + " orbits, " +
                std::to_string(r.violations) + " violations, min margin " + std::to_string(r.min_margin) + ", " +
                std::to_string(r.excluded) + " orbits excluded (unresolved residual)");
  return o;
}

// Shared by 8 and 9.
struct Chain {
  Density tower, ulam, birkhoff;
  double fubini = 0.0;
  bool warned = false;
};
Chain chain_for(const MapFamily& f, double eps, std::uint64_t seed) {
  GmyOptions g;
  TowerOptions t;
  auto k = NoiseKernel::uniform(0.0, eps);
  auto c = choose_inducing_domain(f, k, g);
  auto p = tower_projection(f, k, c, g, t, seed);
  Chain ch;
  ch.tower = p.mu;
  ch.fubini = p.fubini_gap;
  ch.warned = p.warning_truncation;
  ch.ulam = ulam_stationary(build_ulam(f, k, 1024, 32)).density;
  ch.birkhoff = birkhoff_histogram(f, k, 8, 200000, 1024, seed);
  return ch;
}
Chain chains[2];
bool chains_built = false;

Outcome liftability() {
  Outcome o;
  chains[0] = chain_for(kDoubling, 0.1, 11);
  chains[1] = chain_for(kNonlinear, 0.05, 11);
  chains_built = true;
  const char* names[2] = {"doubling", "nonlinear"};
  for (int i = 0; i < 2; ++i) {
    auto& ch = chains[i];
    auto a = ch.tower.rebinned(64), b = ch.ulam.rebinned(64), c = ch.birkhoff.rebinned(64);
    double ab = tv_distance(a, b), ac = tv_distance(a, c), bc = tv_distance(b, c);
    double worst = std::max({ab, ac, bc});
    std::string d = std::string(names[i]) + ": TV tower/ulam " + fmt("%.4f", ab) + ", tower/birkhoff " +
                    fmt("%.4f", ac) + ", ulam/birkhoff " + fmt("%.4f", bc);
    if (i == 0) {
      double tu = tv_distance(a, Density::uniform(0, 1, 64));
      d += ", tower/uniform " + fmt("%.4f", tu);
      worst = std::max(worst, tu);
    }
    o.require(worst < 0.05, d);
    o.require(ch.fubini < 1e-9, std::string(names[i]) + " Fubini gap " + fmt("%.1e", ch.fubini));
  }
  return o;
}

Outcome stationarity() {
  Outcome o;
  const MapFamily* fam[2] = {&kDoubling, &kNonlinear};
  const double eps[2] = {0.1, 0.05};
  for (int i = 0; i < 2; ++i) {
    auto k = NoiseKernel::uniform(0.0, eps[i]);
    auto u = ulam_stationary(build_ulam(*fam[i], k, 1024, 32)).density;
    double worst = 0.0;
    auto r = stationarity_residuals(*fam[i], k, u);
    for (double x : r) worst = std::max(worst, x);
    o.require(r.size() == 8 && worst <= 1e-2, to_string(fam[i]->kind) + " ulam: max residual " + fmt("%.1e", worst));
    if (chains_built) {
      double wt = 0.0;
      for (double x : stationarity_residuals(*fam[i], k, chains[i].tower)) wt = std::max(wt, x);
      o.require(wt <= 1e-2, to_string(fam[i]->kind) + " tower: max residual " + fmt("%.1e", wt));
    }
  }
  return o;
}

Outcome components() {
  Outcome o;
  for (int N : {1, 2, 4}) {
    auto r = n_ergodic_components(kDoubling, NoiseKernel::uniform(0.0, 0.1), N, 16, 20000, 64, 9);
    double mn = *std::min_element(r.masses.begin(), r.masses.end());
    o.require(r.k == 1 && mn >= 1.0 / N - 0.05, "N=" + std::to_string(N) + ": k=" + std::to_string(r.k));
  }
  return o;
}

Outcome quadratic() {
  Outcome o;
  auto rows = quadratic_counterexample({2.0, 1.76, 0.5}, 200000, 4, 13);
  o.require(rows[0].exponent > 0.6, "a=2: " + fmt("%.4f", rows[0].exponent));
  o.require(rows[1].exponent < -0.1 && rows[1].period == 3,
            "a=1.76: " + fmt("%.4f", rows[1].exponent) + " period " + std::to_string(rows[1].period));
  o.require(std::fabs(rows[2].exponent + 0.3119) <= 1e-2, "a=0.5: " + fmt("%.4f", rows[2].exponent));
  return o;
}

std::map<std::string, std::string> csv_bodies(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out[fs::relative(e.path(), dir).string()] = ss.str();
    }
  return out;
}

Outcome determinism() {
  Outcome o;
  auto cfg = Config::defaults();
  cfg.load_file(std::string(RGL_SOURCE_DIR) + "/configs/nonlinear.ini");
  for (const char* s : {"lyap.n_steps=20000", "hyp.n_orbits=200", "gmy.n_max=30", "gmy.min_element=1e-5",
                        "gmy.realizations=2", "gmy.covering_realizations=2", "gmy.covering_samples=200",
                        "tower.n_orbits=40", "tower.horizon=200", "tower.n_realizations=2", "tower.depth=10",
                        "tower.n_max=20", "ulam.bins=256", "birkhoff.n_steps=20000", "comp.n_steps=5000",
                        "stab.bins=128", "quad.n_steps=20000"})
    cfg.set_override(s);
  const fs::path root = fs::temp_directory_path() / ("rgl_determinism_" + std::to_string(::getpid()));
  std::ostringstream log;
  std::map<std::string, std::string> ref;
  int files = 0;
  bool same = true;
  for (int run_i = 0; run_i < 3; ++run_i) {
    const int workers = run_i == 2 ? 4 : 1;
    fs::path d = root / std::to_string(run_i);
    run("all", cfg, d.string(), workers, log);
    auto bodies = csv_bodies(d);
    if (run_i == 0) {
      ref = bodies;
      files = static_cast<int>(bodies.size());
    } else if (bodies != ref) {
      same = false;
    }
  }
  fs::remove_all(root);
  o.require(same && files >= 12, std::to_string(files) + " CSV files identical across 2 runs at 1 worker and 1 at 4");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "exponent oracle", 1, exponent_oracle},
      {2, "power law", 1, power_law},
      {3, "hyperbolic-time scan", 5, scan},
      {4, "NUERO", 10, nuero},
      {5, "GMY verification", 60, gmy_verification},
      {6, "covering property", 60, covering},
      {7, "counting inequality", 60, counting},
      {8, "liftability chain", 180, liftability},
      {9, "stationarity", 30, stationarity},
      {10, "N-components", 60, components},
      {11, "quadratic exhibit", 60, quadratic},
      {12, "determinism", 0, determinism},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.limit_s <= 0 || s < c.limit_s;
    if (!in_time) o.pass = false;
    std::string limit = c.limit_s > 0 ? fmt(" / %.0f s", c.limit_s) : "";
    std::printf("[%s] %2d %-22s %s (%.2f s%s%s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s,
                limit.c_str(), in_time ? "" : ", over time limit");
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
