#include "rgl/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rgl/numeric.hpp"
#include "rgl/rng.hpp"

namespace rgl {

namespace {
constexpr double kTol = 1e-12;

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
}
}  // namespace

std::vector<char> hyperbolic_flags(const std::vector<double>& ld, double lambda) {
  check_lambda(lambda);
  const double ll = std::log(lambda);
  std::vector<char> flag(ld.size() + 1, 0);
  double P = 0.0, minP = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    double g = std::isinf(ld[i]) ? std::numeric_limits<double>::infinity() : -ld[i] - ll;
    P += g;
    // tail sums P[n] - P[n-k] <= 0 for every k  <=>  P[n] <= min_{i<n} P[i]
    if (P <= minP + kTol * (1.0 + std::fabs(minP))) flag[i + 1] = 1;
    minP = std::min(minP, P);
  }
  return flag;
}

HyperbolicReport hyperbolic_times(const std::vector<double>& ld, double lambda) {
  auto flag = hyperbolic_flags(ld, lambda);
  HyperbolicReport r;
  r.lambda = lambda;
  r.horizon = static_cast<std::int64_t>(ld.size());
  for (std::int64_t n = 1; n <= r.horizon; ++n)
    if (flag[n]) r.times.push_back(n);
  r.frequency = r.horizon > 0 ? static_cast<double>(r.times.size()) / r.horizon : 0.0;
  return r;
}

HyperbolicReport hyperbolic_times(const OrbitRecord& o, double lambda) { return hyperbolic_times(o.log_deriv, lambda); }

std::vector<std::int64_t> hyperbolic_times_bruteforce(const std::vector<double>& ld, double lambda) {
  check_lambda(lambda);
  const double ll = std::log(lambda);
  std::vector<std::int64_t> out;
  const std::int64_t n = static_cast<std::int64_t>(ld.size());
  for (std::int64_t m = 1; m <= n; ++m) {
    bool ok = true;
    double tail = 0.0;  // log of the product of 1/|f'| over the last k steps
    for (std::int64_t k = 1; k <= m && ok; ++k) {
      double v = ld[m - k];
      if (std::isinf(v)) {
        ok = false;
        break;
      }
      tail -= v;
      if (tail > k * ll + kTol * (1.0 + k)) ok = false;
    }
    if (ok) out.push_back(m);
  }
  return out;
}

std::vector<OrbitStat> per_orbit_stats(const MapFamily& f, const NoiseKernel& k, double lambda, int n_orbits,
                                       std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                       int workers) {
  std::vector<OrbitStat> out(n_orbits);
  parallel_for(n_orbits, workers, [&](std::int64_t i) {
    std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(i));
    auto w = make_realization(k, s, n_steps);
    OrbitRecord o = random_orbit(f, w, sampler(seed, i), n_steps);
    auto h = hyperbolic_times(o.log_deriv, lambda);
    double acc = 0.0;
    std::int64_t from = n_steps / 2;
    for (std::int64_t j = from; j < n_steps; ++j) acc -= o.log_deriv[j];
    out[i] = {s, h.frequency, acc / static_cast<double>(n_steps - from)};
  });
  return out;
}

FrequencyEstimate frequency_estimate(const MapFamily& f, const NoiseKernel& k, double lambda, int n_orbits,
                                     std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                     int workers) {
  FrequencyEstimate r;
  r.orbits = per_orbit_stats(f, k, lambda, n_orbits, n_steps, sampler, seed, workers);
  std::vector<double> fr;
  int pos = 0;
  for (auto& o : r.orbits) {
    fr.push_back(o.frequency);
    if (o.frequency > 0) ++pos;
  }
  std::sort(fr.begin(), fr.end());
  std::size_t q = static_cast<std::size_t>(std::floor(0.05 * (fr.size() - 1)));
  r.zeta_hat = fr[q];
  r.fraction_positive = static_cast<double>(pos) / n_orbits;
  return r;
}

NueroResult nuero_check(const MapFamily& f, const NoiseKernel& k, double a0, int n_orbits, std::int64_t n_steps,
                        const StartSampler& sampler, std::uint64_t seed, int workers, double lambda) {
  if (!(a0 > 0)) throw std::invalid_argument("nuero_check: a0 must be positive");
  NueroResult r;
  r.orbits = per_orbit_stats(f, k, lambda, n_orbits, n_steps, sampler, seed, workers);
  int below = 0;
  r.max_tail = -INFINITY;
  for (auto& o : r.orbits) {
    if (o.tail_average < -a0) ++below;
    r.mean_tail += o.tail_average / n_orbits;
    r.max_tail = std::max(r.max_tail, o.tail_average);
  }
  r.fraction_below = static_cast<double>(below) / n_orbits;
  r.pass = r.fraction_below >= 0.99;
  return r;
}

LiftedOrbit lifted_orbit(const MapFamily& f, const std::vector<double>& params, long double x0, std::int64_t n) {
  LiftedOrbit o;
  o.x.reserve(n + 1);
  o.t.reserve(n);
  o.ld.reserve(n);
  o.F.reserve(n);
  o.dF.reserve(n);
  o.x.push_back(x0);
  long double x = x0;
  for (std::int64_t k = 0; k < n; ++k) {
    double t = params[k];
    long double F, dF;
    f.lift_deriv<long double>(t, x, F, dF);
    o.t.push_back(t);
    o.ld.push_back(std::log(std::fabs(static_cast<double>(dF))));
    o.F.push_back(F);
    o.dF.push_back(dF);
    x = wrap01(F);
    o.x.push_back(x);
  }
  return o;
}

LiftedOrbit lifted_orbit(const MapFamily& f, const Realization& w, long double x0, std::int64_t n) {
  return lifted_orbit(f, w.window(0, n), x0, n);
}

std::pair<long double, long double> pull_back(const MapFamily& f, const LiftedOrbit& o, std::int64_t n, long double lo,
                                              long double hi,
                                              std::vector<std::pair<long double, long double>>* trail) {
  if (trail) trail->assign(n + 1, {0, 0});
  if (trail) (*trail)[n] = {lo, hi};
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const double t = o.t[k];
    const long double s = fast_round(o.F[k] - o.x[k + 1]);
    lo = f.inverse_lift_from<long double>(t, lo + s, o.x[k], o.F[k], o.dF[k]);
    hi = f.inverse_lift_from<long double>(t, hi + s, o.x[k], o.F[k], o.dF[k]);
    if (trail) (*trail)[k] = {lo, hi};
  }
  return {lo, hi};
}

std::pair<long double, long double> push_interval(const MapFamily& f, const std::vector<double>& params,
                                                  std::int64_t from, std::int64_t n, long double a, long double b) {
  long double d = b - a;
  for (std::int64_t k = 0; k < n; ++k) {
    const double t = params[from + k];
    long double fa = f.lift<long double>(t, a);
    d = f.lift<long double>(t, a + d) - fa;
    a = fa - fast_floor(fa);
  }
  return {a, a + d};
}

double preball_distortion_bound(double sup_log_slope, double lambda) {
  double r = std::sqrt(lambda);
  return sup_log_slope * r / (1.0 - r);
}

PreballReport preball_contraction_check(const MapFamily& f, const Realization& w, double x, std::int64_t n,
                                        double lambda, double delta1, int n_probe, std::uint64_t seed) {
  PreballReport rep;
  if (!f.is_circle()) throw UnsupportedError("preball_contraction_check: needs a circle family");
  if (!(delta1 > 0 && delta1 < 0.5)) {
    rep.ok = false;
    rep.message = "delta1 must lie in (0, 0.5) for the pullback to stay on one branch";
    return rep;
  }
  auto params = w.window(0, n);
  LiftedOrbit o = lifted_orbit(f, params, x, n);
  auto flags = hyperbolic_flags(o.ld, lambda);
  if (!flags[n]) {
    rep.ok = false;
    rep.message = "n is not a lambda-hyperbolic time for this point";
    return rep;
  }
  long double y = o.x[n];
  auto [lo, hi] = pull_back(f, o, n, y - delta1, y + delta1);
  rep.lo = lo;
  rep.hi = hi;
  if (!(lo < x && x < hi)) {
    rep.ok = false;
    rep.message = "pullback left the monotone branch";
    return rep;
  }
  auto b = derivative_bounds(f, w.kernel, 2000, 20);
  rep.C0_bound = preball_distortion_bound(b.sup_log_slope, lambda);
  const double sl = std::sqrt(lambda);
  for (int p = 0; p < n_probe; ++p) {
    long double u = lo + (hi - lo) * static_cast<long double>(uniform01(seed, stream::aux, 2 * p));
    long double v = lo + (hi - lo) * static_cast<long double>(uniform01(seed, stream::aux, 2 * p + 1));
    if (u == v) continue;
    LiftedOrbit ou = lifted_orbit(f, params, wrap01(u), n);
    LiftedOrbit ov = lifted_orbit(f, params, wrap01(v), n);
    // distances along the branch, tracked on lifts
    std::vector<long double> dist(n + 1);
    long double a = u, dd = v - u;
    dist[0] = std::fabs(dd);
    for (std::int64_t k = 0; k < n; ++k) {
      long double fa = f.lift<long double>(params[k], a);
      dd = f.lift<long double>(params[k], a + dd) - fa;
      a = fa;
      dist[k + 1] = std::fabs(dd);
    }
    for (std::int64_t k = 1; k <= n; ++k) {
      double ratio = static_cast<double>(dist[n - k] / (std::pow(sl, static_cast<double>(k)) * dist[n]));
      rep.worst_contraction = std::max(rep.worst_contraction, ratio);
    }
    double su = 0, sv = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      su += ou.ld[k];
      sv += ov.ld[k];
    }
    rep.empirical_C0 = std::max(rep.empirical_C0, std::fabs(su - sv) / static_cast<double>(dist[n]));
    ++rep.pairs;
  }
  if (rep.worst_contraction > 1.0 + 1e-9) {
    rep.ok = false;
    rep.message = "backward contraction bound violated";
  } else if (rep.empirical_C0 > rep.C0_bound + 1e-9) {
    rep.ok = false;
    rep.message = "distortion exceeds C0 bound";
  }
  return rep;
}

}  // namespace rgl
