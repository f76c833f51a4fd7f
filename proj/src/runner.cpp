#include "rgl/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rgl/gmy.hpp"
#include "rgl/hyperbolic.hpp"
#include "rgl/lyapunov.hpp"
#include "rgl/numeric.hpp"
#include "rgl/orbit.hpp"
#include "rgl/rng.hpp"
#include "rgl/sampler.hpp"
#include "rgl/stationary.hpp"
#include "rgl/tower.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace rgl {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { line(header); }
  template <class... T>
  void row(const T&... v) {
    std::vector<std::string> cells{cell(v)...};
    line(cells);
  }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(long long x) { return std::to_string(x); }
  static std::string cell(unsigned long x) { return std::to_string(x); }
  static std::string cell(unsigned long long x) { return std::to_string(x); }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  void line(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  std::size_t cols_;
  std::string text_;
};

struct Ctx {
  const Config& cfg;
  fs::path dir;
  int workers;
  std::uint64_t seed;
  std::ostream& log;
  std::vector<std::string> outputs;

  void write(const std::string& name, const std::string& body) {
    std::ofstream(dir / name, std::ios::binary) << body;
    outputs.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void write_density(const std::string& name, const Density& d) {
    Csv c({"bin_center", "weight"});
    for (int i = 0; i < d.bins(); ++i) c.row(d.center(i), d.weights[i]);
    write(name, c.text());
  }
};

json constants_json(const GmyConstants& c) {
  return {{"p", c.p},
          {"delta0", c.delta0},
          {"delta1", c.delta1},
          {"N0", c.N0},
          {"R0", c.R0},
          {"lambda", c.lambda},
          {"kappa", c.kappa},
          {"K", c.K},
          {"K0", c.K0},
          {"D0", c.D0},
          {"C0", c.C0},
          {"C2", c.C2},
          {"eta", c.eta},
          {"L", c.L},
          {"sigma", c.sigma},
          {"sigma_reading", "inf |f'| (uniform expansion lower bound) in the delta0 gap condition"},
          {"delta0_gap_bound", c.delta0_gap_bound},
          {"gap_condition_holds", c.gap_condition_holds},
          {"max_preimage_distance", c.max_preimage_distance}};
}

std::vector<GmyPartition> build_partitions(Ctx& x, const MapFamily& f, const NoiseKernel& k, const GmyConstants& c,
                                           const GmyOptions& o, int count) {
  const int n_max = static_cast<int>(x.cfg.integer("gmy.n_max"));
  std::vector<GmyPartition> parts(count);
  parallel_for(count, x.workers, [&](std::int64_t r) {
    Realization w = make_realization(k, child_seed(x.seed, static_cast<std::uint64_t>(r)), n_max + c.N0 + 5);
    parts[r] = build_partition(f, w, c, n_max, o);
  });
  return parts;
}

// ---- subcommands ----

int cmd_orbit(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  check_family(f, k);
  const auto n = x.cfg.integer("orbit.n");
  const int N = static_cast<int>(x.cfg.integer("orbit.N"));
  if (n < 1 || N < 1) throw ConfigError("orbit.n and orbit.N must be >= 1");
  Realization w = make_realization(k, x.cfg.u64("orbit.seed"), N * n);
  OrbitRecord o = powered_orbit(f, w, x.cfg.num("orbit.x0"), N, n);
  Csv c({"step", "x", "log_deriv", "t_used"});
  for (std::size_t i = 0; i < o.points.size(); ++i) {
    bool has = i < o.log_deriv.size();
    c.row(static_cast<long long>(i), o.points[i], has ? num(o.log_deriv[i]) : std::string(""),
          has && i < o.t_used.size() ? num(o.t_used[i]) : std::string(""));
  }
  x.write("orbit.csv", c.text());
  x.write_json("report.json", {{"degenerate_steps", o.degenerate_steps}, {"N", N}, {"n", n}});
  return 0;
}

int cmd_lyapunov(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  check_family(f, k);
  const auto Ns = x.cfg.ints("lyap.N_list");
  const auto n_steps = x.cfg.integer("lyap.n_steps");
  const int n_orbits = static_cast<int>(x.cfg.integer("lyap.n_orbits"));
  if (n_orbits < 2) throw ConfigError("lyap.n_orbits must be >= 2");
  auto sampler = lebesgue_sampler(f);
  Csv c({"N", "estimate", "std_error", "n_orbits"});
  json rep = json::array();
  for (int N : Ns) {
    const std::int64_t n = n_steps / N;
    if (n < 1) throw ConfigError("lyap.n_steps must be >= every N in lyap.N_list");
    std::vector<double> values(n_orbits);
    std::vector<int> degenerate(n_orbits);
    parallel_for(n_orbits, x.workers, [&](std::int64_t i) {
      auto e = estimate_power_exponent(f, k, child_seed(x.seed, static_cast<std::uint64_t>(i)), sampler(x.seed, i), N,
                                       n);
      values[i] = e.value;
      degenerate[i] = e.degenerate_steps;
    });
    ExactSum s, s2;
    for (double v : values) s.add(v);
    const double mean = s.value() / n_orbits;
    for (double v : values) s2.add((v - mean) * (v - mean));
    const double se = std::sqrt(s2.value() / (n_orbits - 1) / n_orbits);
    c.row(N, mean, se, n_orbits);
    int deg = 0;
    for (int d : degenerate) deg += d;
    rep.push_back({{"N", N}, {"estimate", mean}, {"std_error", se}, {"per_N", mean / N}, {"degenerate_steps", deg}});
  }
  x.write("lyapunov.csv", c.text());
  x.write_json("report.json", rep);
  return 0;
}

int cmd_hyp_times(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  check_family(f, k);
  const double lambda = x.cfg.num("hyp.lambda");
  const int n_orbits = static_cast<int>(x.cfg.integer("hyp.n_orbits"));
  const auto n_steps = x.cfg.integer("hyp.n_steps");
  auto sampler = lebesgue_sampler(f);
  auto fe = frequency_estimate(f, k, lambda, n_orbits, n_steps, sampler, x.seed, x.workers);
  Csv c({"seed", "frequency", "tail_average"});
  for (auto& o : fe.orbits) c.row(static_cast<unsigned long long>(o.seed), o.frequency, o.tail_average);
  x.write("hyp_times.csv", c.text());
  // pre-ball contraction at the last hyperbolic time within 30 steps (deeper pre-balls fall below
  // long double resolution)
  const double delta1 = x.cfg.num("hyp.delta1");
  int checked = 0, failed = 0;
  double worst = 0.0;
  std::string first_failure;
  for (int i = 0; i < std::min(n_orbits, 20); ++i) {
    const auto s = child_seed(x.seed, 0x70726500ULL + static_cast<std::uint64_t>(i));
    Realization w = make_realization(k, s, n_steps);
    const double x0 = sampler(s, 0);
    auto h = hyperbolic_times(random_orbit(f, w, x0, std::min<std::int64_t>(n_steps, 30)), lambda);
    if (h.times.empty()) continue;
    auto pb = preball_contraction_check(f, w, x0, h.times.back(), lambda, delta1, 16, s);
    ++checked;
    if (!pb.ok && failed++ == 0) first_failure = pb.message;
    worst = std::max(worst, pb.worst_contraction);
  }
  x.write_json("report.json", {{"lambda", lambda},
                               {"zeta_hat", fe.zeta_hat},
                               {"fraction_positive", fe.fraction_positive},
                               {"preball_checks", checked},
                               {"preball_failures", failed},
                               {"preball_worst_contraction", worst},
                               {"preball_first_failure", first_failure}});
  return failed ? 1 : 0;
}

int cmd_nuero(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  check_family(f, k);
  const double a0 = x.cfg.num("hyp.a0");
  auto r = nuero_check(f, k, a0, static_cast<int>(x.cfg.integer("hyp.n_orbits")), x.cfg.integer("hyp.n_steps"),
                       lebesgue_sampler(f), x.seed, x.workers, x.cfg.num("hyp.lambda"));
  Csv c({"seed", "frequency", "tail_average"});
  for (auto& o : r.orbits) c.row(static_cast<unsigned long long>(o.seed), o.frequency, o.tail_average);
  x.write("nuero.csv", c.text());
  x.write_json("report.json", {{"a0", a0},
                               {"pass", r.pass},
                               {"fraction_below", r.fraction_below},
                               {"mean_tail", r.mean_tail},
                               {"max_tail", r.max_tail}});
  x.log << "nuero: " << (r.pass ? "pass" : "FAIL (tail averages not all below -a0)") << "\n";
  return r.pass ? 0 : 1;
}

int cmd_gmy_build(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  const auto o = x.cfg.gmy_options();
  auto c = choose_inducing_domain(f, k, o);
  auto parts = build_partitions(x, f, k, c, o, static_cast<int>(x.cfg.integer("gmy.realizations")));
  for (auto& P : parts) {
    auto s = satellite_mass_series(P);
    if (!s.empty()) c.L = std::max(c.L, s.back());
  }
  Csv csv({"realization", "elements", "element_mass", "residual_mass", "unresolved_mass", "satellite_sum",
           "warning_large_residual"});
  json jp = json::array();
  for (std::size_t r = 0; r < parts.size(); ++r) {
    const auto& P = parts[r];
    auto s = satellite_mass_series(P);
    csv.row(static_cast<int>(r), static_cast<long long>(P.elements.size()), P.element_mass(),
            P.residual_mass[P.n_max], P.unresolved_mass[P.n_max], s.empty() ? 0.0 : s.back(),
            P.warning_large_residual);
    // the same series without the unresolved rest, which counts as satellite at every step past the floor
    std::vector<double> resolved;
    double acc = 0.0;
    for (int n = P.c.R0; n <= P.n_max; ++n) {
      acc += P.satellite_mass[n] - P.unresolved_mass[n];
      resolved.push_back(acc);
    }
    json el = json::array();
    for (auto& e : P.elements)
      el.push_back({static_cast<double>(e.a), static_cast<double>(e.b), e.n, e.m, e.R});
    jp.push_back({{"realization", r},
                  {"n_max", P.n_max},
                  {"elements", el},
                  {"residual_mass", P.residual_mass},
                  {"satellite_mass", P.satellite_mass},
                  {"unresolved_mass", P.unresolved_mass},
                  {"satellite_partial_sums", s},
                  {"resolved_satellite_partial_sums", resolved},
                  {"warning_large_residual", P.warning_large_residual}});
    if (P.warning_large_residual) x.log << "gmy-build: realization " << r << " ends with residual > 0.5\n";
  }
  x.write("gmy_build.csv", csv.text());
  x.write_json("partitions.json", {{"constants", constants_json(c)}, {"element_columns", {"a", "b", "n", "m", "R"}},
                                   {"partitions", jp}});
  return 0;
}

int cmd_gmy_verify(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  const auto o = x.cfg.gmy_options();
  const auto c = choose_inducing_domain(f, k, o);
  const int probes = static_cast<int>(x.cfg.integer("gmy.probes"));
  auto parts = build_partitions(x, f, k, c, o, static_cast<int>(x.cfg.integer("gmy.realizations")));
  std::vector<GmyVerifyReport> reps(parts.size());
  parallel_for(static_cast<std::int64_t>(parts.size()), x.workers,
               [&](std::int64_t r) { reps[r] = verify_gmy(f, parts[r], probes); });
  Csv csv({"realization", "elements", "failures", "min_log_expansion_margin", "max_distortion_ratio",
           "empirical_K", "residual_mass", "mass_accounting_error"});
  bool ok = true;
  json jr = json::array();
  double distortion_margin = 0.0;
  for (std::size_t r = 0; r < parts.size(); ++r) {
    const auto& P = parts[r];
    const auto& v = reps[r];
    // Leb(Delta) - mass of elements that joined by step n (at their return time) - residual(n)
    std::vector<long double> created(P.n_max + 1, 0.0L);
    for (auto& e : P.elements) created[std::min(e.R, P.n_max)] += e.b - e.a;
    long double cum = 0;
    double acct = 0.0;
    for (int n = 0; n <= P.n_max; ++n) {
      cum += created[n];
      acct = std::max(acct, std::fabs(static_cast<double>(P.delta_mass() - cum - P.residual_mass[n])));
    }
    const bool res_ok = P.residual_mass[P.n_max] < 0.01;
    ok = ok && v.ok && acct <= 1e-9 && res_ok;
    distortion_margin = std::max(distortion_margin, v.max_distortion_ratio);
    csv.row(static_cast<int>(r), v.elements, v.failures, v.min_log_expansion_margin, v.max_distortion_ratio,
            v.empirical_K, P.residual_mass[P.n_max], acct);
    jr.push_back({{"realization", r},
                  {"ok", v.ok},
                  {"first_failure", v.first_failure},
                  {"max_endpoint_error", v.max_endpoint_error},
                  {"residual_below_0.01", res_ok},
                  {"mass_accounting_error", acct}});
    if (!v.ok) x.log << "gmy-verify: realization " << r << ": " << v.first_failure << "\n";
    if (!res_ok) x.log << "gmy-verify: realization " << r << ": residual mass at n_max is not below 0.01\n";
  }
  // covering on partitions restricted to the sampled points
  const int cov_r = static_cast<int>(x.cfg.integer("gmy.covering_realizations"));
  const int cov_n = static_cast<int>(x.cfg.integer("gmy.covering_samples"));
  const int n_max = static_cast<int>(x.cfg.integer("gmy.n_max"));
  const std::int64_t draws = cov_n + cov_n / 10 + 10;
  std::vector<CoveringReport> cov(cov_r);
  parallel_for(cov_r, x.workers, [&](std::int64_t r) {
    const auto s = child_seed(x.seed, 0x636f7600ULL + static_cast<std::uint64_t>(r));
    Realization w = make_realization(k, s, n_max + c.N0 + 5);
    auto q = covering_points(c, draws, s);
    auto P = build_partition(f, w, c, n_max, o, &q);
    cov[r] = covering_check(f, P, cov_n, s, draws);
  });
  Csv cc({"realization", "samples", "misses", "in_elements", "in_satellites"});
  int misses = 0;
  for (int r = 0; r < cov_r; ++r) {
    cc.row(r, cov[r].samples, cov[r].misses, cov[r].in_elements, cov[r].in_satellites);
    misses += cov[r].misses;
    if (cov[r].misses)
      x.log << "gmy-verify: covering miss at x = " << num(static_cast<double>(cov[r].first_miss_x))
            << ", n = " << cov[r].first_miss_n << "\n";
  }
  ok = ok && misses == 0;
  x.write("gmy_verify.csv", csv.text());
  x.write("covering.csv", cc.text());
  x.write_json("report.json", {{"ok", ok},
                               {"constants", constants_json(c)},
                               {"distortion_margin", distortion_margin},
                               {"covering_misses", misses},
                               {"realizations", jr}});
  return ok ? 0 : 1;
}

int cmd_tower(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  const auto o = x.cfg.gmy_options();
  const auto t = x.cfg.tower_options();
  const auto c = choose_inducing_domain(f, k, o);
  auto r = counting_experiment(f, k, c, o, t, static_cast<int>(x.cfg.integer("tower.n_orbits")),
                               static_cast<int>(x.cfg.integer("tower.horizon")), x.cfg.num("tower.lambda"), x.seed);
  Csv csv({"orbits", "excluded", "violations", "prefix_violations", "min_margin", "mean_H", "mean_S", "mean_R",
           "eta"});
  csv.row(r.orbits, r.excluded, r.violations, r.prefix_violations, r.min_margin, r.mean_H, r.mean_S, r.mean_R,
          c.eta);
  x.write("counting.csv", csv.text());
  x.write_json("report.json", {{"pass", r.pass()}, {"eta", c.eta}, {"partitions", r.partitions},
                               {"constants", constants_json(c)}});
  return r.pass() ? 0 : 1;
}

int cmd_project(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  const auto o = x.cfg.gmy_options();
  const auto t = x.cfg.tower_options();
  const auto c = choose_inducing_domain(f, k, o);
  auto p = tower_projection(f, k, c, o, t, x.seed);
  const int cb = static_cast<int>(x.cfg.integer("compare.bins"));
  auto u = ulam_stationary(build_ulam(f, k, static_cast<int>(x.cfg.integer("ulam.bins")),
                                      static_cast<int>(x.cfg.integer("ulam.kernel_samples")), x.workers));
  const double tv = tv_distance(p.mu.rebinned(cb), u.density.rebinned(cb));
  x.write_density("mu.csv", p.mu);
  x.write_density("nu.csv", p.nu_mean);
  const bool fub_ok = p.fubini_gap < 1e-9;
  x.write_json("report.json", {{"mu_mass", p.mu_mass},
                               {"truncation", p.truncation},
                               {"truncation_residual", p.truncation_residual},
                               {"warning_truncation", p.warning_truncation},
                               {"tail", p.tail},
                               {"integral_partial_sums", p.integral_partial},
                               {"return_integral", p.return_integral},
                               {"tail_sum", p.tail_sum},
                               {"fubini_gap", p.fubini_gap},
                               {"K1", p.K1},
                               {"invariance_l1", p.invariance_l1},
                               {"return_hist", p.return_hist},
                               {"partitions", p.partitions},
                               {"shifts", p.shifts},
                               {"tv_to_ulam", tv},
                               {"compare_bins", cb},
                               {"constants", constants_json(c)}});
  if (p.warning_truncation)
    x.log << "project: truncation residual " << num(p.truncation_residual) << " exceeds 1e-3\n";
  return fub_ok ? 0 : 1;
}

int cmd_stationary(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  auto u = ulam_stationary(build_ulam(f, k, static_cast<int>(x.cfg.integer("ulam.bins")),
                                      static_cast<int>(x.cfg.integer("ulam.kernel_samples")), x.workers));
  auto b = birkhoff_histogram(f, k, static_cast<int>(x.cfg.integer("birkhoff.seeds")),
                              x.cfg.integer("birkhoff.n_steps"), static_cast<int>(x.cfg.integer("ulam.bins")), x.seed,
                              x.workers);
  const int cb = static_cast<int>(x.cfg.integer("compare.bins"));
  const double tv = tv_distance(u.density.rebinned(cb), b.rebinned(cb));
  std::vector<double> res;
  if (f.is_circle()) res = stationarity_residuals(f, k, u.density);
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  x.write_density("ulam.csv", u.density);
  x.write_density("birkhoff.csv", b);
  const bool ok = worst <= 1e-2 && tv < 0.05;
  x.write_json("report.json", {{"ulam_iterations", u.iterations},
                               {"ulam_residual", u.residual},
                               {"tv_ulam_birkhoff", tv},
                               {"compare_bins", cb},
                               {"exponent", density_exponent(f, k, u.density)},
                               {"stationarity_residuals", res},
                               {"ok", ok}});
  if (!ok) x.log << "stationary: estimators disagree or the stationarity residual exceeds 1e-2\n";
  return ok ? 0 : 1;
}

int cmd_components(Ctx& x) {
  const auto f = x.cfg.family();
  const auto k = x.cfg.kernel();
  Csv csv({"N", "k", "min_mass", "silhouette", "indeterminate", "masses"});
  bool ok = true;
  for (int N : x.cfg.ints("comp.N_list")) {
    auto r = n_ergodic_components(f, k, N, static_cast<int>(x.cfg.integer("comp.starts")),
                                  x.cfg.integer("comp.n_steps"), static_cast<int>(x.cfg.integer("comp.bins")), x.seed,
                                  x.workers);
    std::string masses;
    double mn = 1.0;
    for (double m : r.masses) {
      masses += (masses.empty() ? "" : ";") + num(m);
      mn = std::min(mn, m);
    }
    if (mn < 1.0 / N - 0.05) {
      ok = false;
      x.log << "components: N = " << N << " has a component of mass " << num(mn) << " < 1/N - 0.05\n";
    }
    csv.row(N, r.k, mn, r.silhouette, r.indeterminate, masses);
  }
  x.write("components.csv", csv.text());
  return ok ? 0 : 1;
}

int cmd_stability(Ctx& x) {
  const auto f = x.cfg.family();
  auto s = stability_sweep(f, x.cfg.num("family.t_star"), x.cfg.nums("stab.eps_list"),
                           static_cast<int>(x.cfg.integer("stab.bins")),
                           static_cast<int>(x.cfg.integer("stab.kernel_samples")), x.workers);
  Csv csv({"epsilon", "exponent", "tv_to_limit"});
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) csv.row(s.epsilons[i], s.exponents[i], s.distances_to_limit[i]);
  x.write("stability.csv", csv.text());
  x.write_json("report.json", {{"limit_exponent", s.limit_exponent},
                               {"limit_is_deterministic", s.limit_is_deterministic}});
  return 0;
}

int cmd_quadratic(Ctx& x) {
  auto rows = quadratic_counterexample(x.cfg.nums("quad.a_list"), x.cfg.integer("quad.n_steps"),
                                       static_cast<int>(x.cfg.integer("quad.seeds")), x.seed);
  Csv csv({"a", "exponent", "period", "attractor", "cycle_multiplier"});
  for (auto& r : rows) csv.row(r.a, r.exponent, r.period, r.attractor(), r.cycle_multiplier);
  x.write("quadratic.csv", csv.text());
  return 0;
}

const std::map<std::string, std::function<int(Ctx&)>>& table() {
  static const std::map<std::string, std::function<int(Ctx&)>> t = {
      {"orbit", cmd_orbit},         {"lyapunov", cmd_lyapunov},     {"hyp-times", cmd_hyp_times},
      {"nuero", cmd_nuero},         {"gmy-build", cmd_gmy_build},   {"gmy-verify", cmd_gmy_verify},
      {"tower", cmd_tower},         {"project", cmd_project},       {"stationary", cmd_stationary},
      {"components", cmd_components}, {"stability", cmd_stability}, {"quadratic", cmd_quadratic},
  };
  return t;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int run_one(const std::string& sub, const Config& cfg, const fs::path& out, int workers, std::ostream& log) {
  Ctx x{cfg, out / sub, workers, cfg.u64("run.seed"), log, {}};
  fs::create_directories(x.dir);
  const std::string started = utc_now();
  auto t0 = std::chrono::steady_clock::now();
  int code;
  std::string error;
  try {
    code = table().at(sub)(x);
  } catch (const ConfigError& e) {
    code = 2;
    error = e.what();
  } catch (const DomainError& e) {
    code = 2;
    error = e.what();
  } catch (const UnsupportedError& e) {
    code = 2;
    error = e.what();
  } catch (const std::invalid_argument& e) {
    code = 2;
    error = e.what();
  } catch (const std::exception& e) {
    code = 1;
    error = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!error.empty()) log << sub << ": " << error << "\n";
  std::ofstream(x.dir / "config.resolved.ini") << cfg.resolved();
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  json m = {{"subcommand", sub},
            {"config_hash", std::string(hash)},
            {"seed", x.seed},
            {"workers", workers},
            {"versions", {{"rgl", kVersion}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}}},
            {"started_utc", started},
            {"wall_time_s", wall},
            {"exit_code", code},
            {"outputs", x.outputs}};
  if (!error.empty()) m["error"] = error;
  std::ofstream(x.dir / "manifest.json") << m.dump(2) << "\n";
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.3f", wall);
  log << sub << ": exit " << code << " (" << secs << " s)\n";
  return code;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"orbit",   "lyapunov",   "hyp-times",  "nuero",     "gmy-build",
                                             "gmy-verify", "tower",   "project",    "stationary", "components",
                                             "stability", "quadratic", "all"};
  return s;
}

int run(const std::string& subcommand, const Config& cfg, const std::string& out_dir, int workers,
        std::ostream& log) {
  if (subcommand == "all") {
    int worst = 0;
    for (const auto& s : subcommands())
      if (s != "all") worst = std::max(worst, run_one(s, cfg, out_dir, workers, log));
    return worst;
  }
  if (!table().count(subcommand)) {
    log << "unknown subcommand '" << subcommand << "'\n";
    return 2;
  }
  return run_one(subcommand, cfg, out_dir, workers, log);
}

}  // namespace rgl
