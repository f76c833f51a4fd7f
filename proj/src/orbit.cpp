#include "rgl/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rgl {

std::vector<double> Realization::parameters() const {
  std::int64_t from = sided == Sidedness::TwoSided ? -past_depth : 0;
  return window(from, length - from);
}

std::vector<double> Realization::window(std::int64_t from, std::int64_t count) const {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out[i] = param(from + i);
  return out;
}

Realization Realization::shifted(std::int64_t s) const {
  Realization r = *this;
  r.offset += s;
  r.length = length > s ? length - s : 0;
  if (sided == Sidedness::TwoSided) r.past_depth = past_depth + s;
  return r;
}

Realization Realization::one_sided() const {
  Realization r = *this;
  r.sided = Sidedness::OneSided;
  r.past_depth = 0;
  return r;
}

Realization make_realization(const NoiseKernel& kernel, std::uint64_t seed, std::int64_t n, Sidedness sided,
                             std::int64_t past_depth) {
  if (n < 0) throw std::invalid_argument("make_realization: negative length");
  if (sided == Sidedness::TwoSided && past_depth < 0) throw std::invalid_argument("make_realization: negative past depth");
  Realization r;
  r.kernel = kernel;
  r.seed = seed;
  r.length = n;
  r.sided = sided;
  r.past_depth = sided == Sidedness::TwoSided ? past_depth : 0;
  return r;
}

static double log_abs(double v) {
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(v));
}

OrbitRecord random_orbit(const MapFamily& f, const Realization& w, double x0, std::int64_t n) {
  if (!f.in_domain(x0)) throw DomainError("random_orbit: start point outside phase space");
  OrbitRecord o;
  o.x0 = x0;
  o.points.reserve(n + 1);
  o.log_deriv.reserve(n);
  o.t_used.reserve(n);
  o.points.push_back(x0);
  double x = x0;
  for (std::int64_t k = 0; k < n; ++k) {
    double t = w.param(k);
    double ld = log_abs(f.deriv<double>(t, x));
    if (std::isinf(ld)) ++o.degenerate_steps;
    x = f.eval(t, x);
    o.log_deriv.push_back(ld);
    o.t_used.push_back(t);
    o.points.push_back(x);
  }
  return o;
}

SkewState skew_step(const MapFamily& f, Realization& w, SkewState s) {
  if (s.k >= w.length) w.extend(s.k + 1);
  return {s.k + 1, f.eval(w.param(s.k), s.x)};
}

OrbitRecord powered_orbit(const MapFamily& f, const Realization& w, double x0, int N, std::int64_t n) {
  if (N < 1) throw std::invalid_argument("powered_orbit: N must be >= 1");
  OrbitRecord base = random_orbit(f, w, x0, N * n);
  if (N == 1) return base;
  OrbitRecord o;
  o.x0 = x0;
  o.degenerate_steps = base.degenerate_steps;
  o.points.reserve(n + 1);
  for (std::int64_t j = 0; j <= n; ++j) o.points.push_back(base.points[N * j]);
  for (std::int64_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += base.log_deriv[N * j + i];
    o.log_deriv.push_back(s);
    o.t_used.push_back(base.t_used[N * j]);
  }
  return o;
}

}  // namespace rgl

#include "rgl/rng.hpp"
#include "rgl/sampler.hpp"

namespace rgl {

StartSampler lebesgue_sampler(const MapFamily& f) {
  double lo = f.lo(), hi = f.hi();
  bool circle = f.is_circle();
  return [lo, hi, circle](std::uint64_t seed, std::int64_t index) {
    double u = uniform01(seed, stream::start, index);
    double x = lo + (hi - lo) * u;
    if (!circle) x = std::clamp(x, lo, hi);
    return x;
  };
}

StartSampler birkhoff_tail_sampler(const MapFamily& f, const NoiseKernel& k, int burn) {
  auto leb = lebesgue_sampler(f);
  return [f, k, burn, leb](std::uint64_t seed, std::int64_t index) {
    double x = leb(seed, index);
    std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(index) ^ 0x5EEDULL);
    for (int i = 0; i < burn; ++i) x = f.eval(k.sample(s, stream::aux, i), x);
    return x;
  };
}

StartSampler density_sampler(const Density& d) {
  std::vector<double> cdf(d.bins() + 1, 0.0);
  for (int i = 0; i < d.bins(); ++i) cdf[i + 1] = cdf[i] + std::max(0.0, d.weights[i]);
  double total = cdf.back();
  Density dd = d;
  return [cdf, total, dd](std::uint64_t seed, std::int64_t index) {
    double u = uniform01(seed, stream::start, index) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int i = std::clamp(static_cast<int>(it - cdf.begin()) - 1, 0, dd.bins() - 1);
    double w = cdf[i + 1] - cdf[i];
    double frac = w > 0 ? (u - cdf[i]) / w : 0.5;
    double x = dd.lo + (i + frac) * dd.bin_width();
    return std::min(x, std::nextafter(dd.hi, dd.lo));
  };
}

}  // namespace rgl
