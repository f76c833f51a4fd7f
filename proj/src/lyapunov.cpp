#include "rgl/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

#include "rgl/numeric.hpp"
#include "rgl/rng.hpp"

namespace rgl {

static double mean_se(const std::vector<double>& v, double* se) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  *se = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
  return m;
}

ExponentEstimate estimate_exponent(const OrbitRecord& orbit, std::int64_t burn_in, int n_blocks) {
  const auto& ld = orbit.log_deriv;
  std::int64_t n = static_cast<std::int64_t>(ld.size());
  if (burn_in < 0 || burn_in >= n) throw std::invalid_argument("estimate_exponent: burn_in leaves no steps");
  ExponentEstimate e;
  ExactSum total;
  std::vector<double> used;
  used.reserve(n - burn_in);
  for (std::int64_t i = burn_in; i < n; ++i) {
    if (std::isinf(ld[i])) {
      ++e.degenerate_steps;
      continue;
    }
    total.add(ld[i]);
    used.push_back(ld[i]);
  }
  e.n_used = static_cast<std::int64_t>(used.size());
  if (e.n_used == 0) throw std::runtime_error("estimate_exponent: every step was degenerate");
  e.sum = total.value();
  e.value = e.sum / e.n_used;
  int nb = static_cast<int>(std::min<std::int64_t>(n_blocks, e.n_used));
  std::int64_t len = e.n_used / nb;
  if (len > 0 && nb > 1) {
    for (int b = 0; b < nb; ++b) {
      double s = 0.0;
      for (std::int64_t i = b * len; i < (b + 1) * len; ++i) s += used[i];
      e.per_block_values.push_back(s / len);
    }
    mean_se(e.per_block_values, &e.std_error);
  }
  return e;
}

ExponentEstimate estimate_power_exponent(const MapFamily& f, const NoiseKernel& k, std::uint64_t seed, double x0,
                                         int N, std::int64_t n) {
  if (N < 1) throw std::invalid_argument("estimate_power_exponent: N must be >= 1");
  auto w = make_realization(k, seed, N * n);
  OrbitRecord base = random_orbit(f, w, x0, N * n);
  ExponentEstimate e;
  ExactSum total;
  std::vector<double> blocks;
  blocks.reserve(n);
  for (std::int64_t j = 0; j < n; ++j) {
    ExactSum blk;
    bool bad = false;
    for (int i = 0; i < N; ++i) {
      double v = base.log_deriv[N * j + i];
      if (std::isinf(v)) bad = true;
      else blk.add(v);
    }
    if (bad) {
      ++e.degenerate_steps;
      continue;
    }
    total.add(blk);
    blocks.push_back(blk.value());
  }
  e.n_used = static_cast<std::int64_t>(blocks.size());
  if (e.n_used == 0) throw std::runtime_error("estimate_power_exponent: every block was degenerate");
  e.sum = total.value();
  e.value = e.sum / e.n_used;
  int nb = static_cast<int>(std::min<std::int64_t>(50, e.n_used));
  std::int64_t len = e.n_used / nb;
  if (nb > 1) {
    for (int b = 0; b < nb; ++b) {
      double s = 0.0;
      for (std::int64_t i = b * len; i < (b + 1) * len; ++i) s += blocks[i];
      e.per_block_values.push_back(s / len);
    }
    mean_se(e.per_block_values, &e.std_error);
  }
  return e;
}

AnnealedIntegral annealed_contraction_integral(const MapFamily& f, const NoiseKernel& k, int N, int n_orbits,
                                               std::int64_t n_steps, const StartSampler& sampler, std::uint64_t seed,
                                               int workers) {
  if (N < 1 || n_orbits < 1 || n_steps < 1) throw std::invalid_argument("annealed_contraction_integral: bad sizes");
  std::vector<double> per_orbit(n_orbits, 0.0);
  std::vector<char> ok(n_orbits, 0);
  parallel_for(n_orbits, workers, [&](std::int64_t i) {
    std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(i));
    double x0 = sampler(seed, i);
    auto w = make_realization(k, s, N * n_steps);
    OrbitRecord o = random_orbit(f, w, x0, N * n_steps);
    if (o.degenerate_steps > 0) return;
    double acc = 0.0;
    for (double v : o.log_deriv) acc -= v;
    per_orbit[i] = acc / n_steps;
    ok[i] = 1;
  });
  std::vector<double> vals;
  AnnealedIntegral r;
  for (int i = 0; i < n_orbits; ++i) {
    if (ok[i]) vals.push_back(per_orbit[i]);
    else ++r.excluded;
  }
  r.n_orbits_used = static_cast<int>(vals.size());
  if (vals.empty()) throw std::runtime_error("annealed_contraction_integral: all orbits degenerate");
  r.value = mean_se(vals, &r.std_error);
  return r;
}

}  // namespace rgl
