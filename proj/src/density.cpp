#include "rgl/density.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>

#include "rgl/numeric.hpp"

namespace rgl {

void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    double hi = x + y;
    double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    double x = hi;
    double y = partials_[--n];
    hi = x + y;
    double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0 && partials_[n - 1] < 0) || (lo > 0 && partials_[n - 1] > 0))) {
    double y = lo * 2;
    double x = hi + y;
    double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  int nw = static_cast<int>(std::min<std::int64_t>(workers, count));
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int default_workers() {
  if (const char* s = std::getenv("RGL_WORKERS")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  return 1;
}

Density::Density(double lo, double hi, int bins) : lo(lo), hi(hi), weights(bins, 0.0) {
  if (bins <= 0) throw std::invalid_argument("Density: bins must be positive");
  if (!(hi > lo)) throw std::invalid_argument("Density: empty support");
}

Density Density::uniform(double lo, double hi, int bins) {
  Density d(lo, hi, bins);
  double w = 1.0 / (hi - lo);
  for (auto& v : d.weights) v = w;
  return d;
}

double Density::total_mass() const {
  ExactSum s;
  for (double w : weights) s.add(w);
  return s.value() * bin_width();
}

void Density::normalize() {
  double m = total_mass();
  if (!(m > 0)) throw std::runtime_error("Density::normalize: zero mass");
  for (auto& w : weights) w /= m;
}

int Density::bin_of(double x) const {
  int i = static_cast<int>(std::floor((x - lo) / bin_width()));
  return std::clamp(i, 0, bins() - 1);
}

void Density::deposit_interval(double a, double b, double mass) {
  if (mass == 0.0) return;
  if (b < a) std::swap(a, b);
  const double h = bin_width();
  if (b - a <= 0.0) {
    weights[bin_of(a)] += mass / h;
    return;
  }
  int ia = bin_of(a), ib = bin_of(b);
  if (ia == ib) {
    weights[ia] += mass / h;
    return;
  }
  const double dens = mass / (b - a);
  for (int i = ia; i <= ib; ++i) {
    double l = std::max(a, lo + i * h), r = std::min(b, lo + (i + 1) * h);
    if (i == ia) l = a;
    if (i == ib) r = b;
    if (r > l) weights[i] += dens * (r - l) / h;
  }
}

void Density::deposit_circle_interval(double a, double b, double mass) {
  // a, b are lifts; split at integer crossings and wrap into [lo, hi) = [0, 1)
  if (b < a) std::swap(a, b);
  double len = b - a;
  if (len <= 0) {
    deposit_interval(a - std::floor(a), a - std::floor(a), mass);
    return;
  }
  if (len > 1.0 && lo == 0.0 && hi == 1.0) {
    // whole turns spread evenly
    double turns = std::floor(len);
    double even = mass * turns / len;
    for (auto& w : weights) w += even;
    mass -= even;
    a += turns;
    len = b - a;
    if (!(len > 0)) return;
  }
  double cur = a;
  while (cur < b) {
    double k = std::floor(cur);
    double end = std::min(b, k + 1.0);
    double piece = mass * (end - cur) / len;
    deposit_interval(cur - k, end - k, piece);
    if (end == cur) break;
    cur = end;
  }
}

Density Density::rebinned(int new_bins) const {
  if (bins() % new_bins != 0) throw std::invalid_argument("rebinned: bin counts not nested");
  int r = bins() / new_bins;
  Density out(lo, hi, new_bins);
  for (int i = 0; i < bins(); ++i) out.weights[i / r] += weights[i] / r;
  return out;
}

double Density::mass_between(double a, double b) const {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(b > a)) return 0.0;
  const double h = bin_width();
  int ia = bin_of(a), ib = bin_of(b);
  if (ia == ib) return weights[ia] * (b - a);
  double s = weights[ia] * (lo + (ia + 1) * h - a) + weights[ib] * (b - (lo + ib * h));
  for (int i = ia + 1; i < ib; ++i) s += weights[i] * h;
  return s;
}

double tv_distance(const Density& a, const Density& b) {
  if (a.bins() != b.bins() || a.lo != b.lo || a.hi != b.hi) throw std::invalid_argument("tv_distance: incompatible grids");
  double ma = a.total_mass(), mb = b.total_mass();
  double s = 0.0;
  for (int i = 0; i < a.bins(); ++i) s += std::fabs(a.weights[i] / ma - b.weights[i] / mb);
  return 0.5 * s * a.bin_width();
}

double l1_distance(const Density& a, const Density& b) {
  double s = 0.0;
  for (int i = 0; i < a.bins(); ++i) s += std::fabs(a.weights[i] - b.weights[i]);
  return s * a.bin_width();
}

}  // namespace rgl
