#include "rgl/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rgl/numeric.hpp"
#include "rgl/orbit.hpp"
#include "rgl/rng.hpp"

namespace rgl {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_power_of_two(int b) { return b > 0 && (b & (b - 1)) == 0; }

// Preimages of the bin edges inside [a, b] under f_t, sorted, ends included.
std::vector<double> cut_points(const MapFamily& f, double t, double a, double b, int bins) {
  std::vector<double> cuts{a, b};
  const double lo = f.lo(), h = (f.hi() - f.lo()) / bins;
  if (f.is_circle()) {
    double ya = f.lift<double>(t, a), yb = f.lift<double>(t, b);
    for (double m = std::floor((ya - lo) / h) + 1; lo + m * h < yb; m += 1) {
      double x = f.inverse_lift<double>(t, lo + m * h);
      if (x > a && x < b) cuts.push_back(x);
    }
  } else {
    // quadratic: one monotone branch per half of [-1, 1]; bins never straddle 0
    double ya = f.lift<double>(t, a), yb = f.lift<double>(t, b);
    double y0 = std::min(ya, yb), y1 = std::max(ya, yb);
    const double sgn = a + b > 0 ? 1.0 : -1.0;
    if (t > 0)
      for (double m = std::floor((y0 - lo) / h) + 1; lo + m * h < y1; m += 1) {
        double x = sgn * std::sqrt((1.0 - (lo + m * h)) / t);
        if (x > a && x < b) cuts.push_back(x);
      }
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

}  // namespace

double UlamOperator::row_sum(int i) const {
  ExactSum s;
  for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s.add(val[p]);
  return s.value();
}

std::vector<double> UlamOperator::left_apply(const std::vector<double>& v) const {
  std::vector<double> out(bins, 0.0);
  for (int i = 0; i < bins; ++i) {
    if (v[i] == 0.0) continue;
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) out[col[p]] += v[i] * val[p];
  }
  return out;
}

UlamOperator build_ulam(const MapFamily& f, const NoiseKernel& k, int bins, int kernel_samples, int workers) {
  if (!is_power_of_two(bins)) throw std::invalid_argument("ulam.bins must be a power of two");
  if (kernel_samples < 1) throw std::invalid_argument("kernel_samples must be >= 1");
  check_family(f, k);
  UlamOperator op;
  op.bins = bins;
  op.lo = f.lo();
  op.hi = f.hi();
  const auto nodes = k.nodes(k.is_dirac() ? 1 : kernel_samples);
  op.kernel_samples = static_cast<int>(nodes.size());
  const double h = (op.hi - op.lo) / bins;
  std::vector<std::vector<std::pair<int, double>>> rows(bins);
  parallel_for(bins, workers, [&](std::int64_t i) {
    const double a = op.lo + i * h, b = op.lo + (i + 1) * h;
    std::vector<double> acc(bins, 0.0);
    std::vector<int> touched;
    for (double t : nodes) {
      auto cuts = cut_points(f, t, a, b, bins);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double len = cuts[c + 1] - cuts[c];
        if (!(len > 0)) continue;
        double y = f.eval(t, 0.5 * (cuts[c] + cuts[c + 1]));
        int j = std::clamp(static_cast<int>(std::floor((y - op.lo) / h)), 0, bins - 1);
        if (acc[j] == 0.0) touched.push_back(j);
        acc[j] += len / (b - a) / static_cast<double>(nodes.size());
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int j : touched) rows[i].push_back({j, acc[j]});
  });
  op.row_ptr.assign(bins + 1, 0);
  for (int i = 0; i < bins; ++i) op.row_ptr[i + 1] = op.row_ptr[i] + static_cast<std::int64_t>(rows[i].size());
  for (auto& r : rows)
    for (auto& [j, v] : r) {
      op.col.push_back(j);
      op.val.push_back(v);
    }
  return op;
}

UlamResult ulam_stationary(const UlamOperator& op, double tol, int max_iter) {
  std::vector<double> v(op.bins, 1.0 / op.bins);
  UlamResult r;
  for (int it = 1; it <= max_iter; ++it) {
    auto w = op.left_apply(v);
    ExactSum mass;
    for (double x : w) mass.add(x);
    double m = mass.value();
    double res = 0.0;
    for (int i = 0; i < op.bins; ++i) {
      w[i] /= m;
      res += std::fabs(w[i] - v[i]);
    }
    v.swap(w);
    r.iterations = it;
    r.residual = res;
    if (res <= tol) break;
    if (it == max_iter)
      throw std::runtime_error("ulam_stationary: no convergence after " + std::to_string(max_iter) +
                               " iterations (reducible or periodic chain?)");
  }
  r.density = Density(op.lo, op.hi, op.bins);
  const double h = r.density.bin_width();
  for (int i = 0; i < op.bins; ++i) r.density.weights[i] = v[i] / h;
  r.density.normalize();
  return r;
}

Density birkhoff_histogram(const MapFamily& f, const NoiseKernel& k, int seeds, std::int64_t n_steps, int bins,
                           std::uint64_t seed, int workers, std::int64_t burn_in) {
  if (n_steps < 10000) throw std::invalid_argument("birkhoff_histogram: n_steps must be >= 1e4");
  if (seeds < 1) throw std::invalid_argument("birkhoff_histogram: need at least one seed");
  check_family(f, k);
  std::vector<std::vector<std::int64_t>> counts(seeds, std::vector<std::int64_t>(bins, 0));
  const double lo = f.lo(), h = (f.hi() - f.lo()) / bins;
  parallel_for(seeds, workers, [&](std::int64_t i) {
    const std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(i));
    Realization w = make_realization(k, s, burn_in + n_steps);
    double x = lo + (f.hi() - lo) * uniform01(s, stream::start, 0);
    for (std::int64_t n = 0; n < burn_in + n_steps; ++n) {
      x = f.eval(w.param(n), x);
      if (n >= burn_in) ++counts[i][std::clamp(static_cast<int>(std::floor((x - lo) / h)), 0, bins - 1)];
    }
  });
  Density d(f.lo(), f.hi(), bins);
  for (auto& c : counts)
    for (int b = 0; b < bins; ++b) d.weights[b] += static_cast<double>(c[b]);
  d.normalize();
  return d;
}

ComponentReport n_ergodic_components(const MapFamily& f, const NoiseKernel& k, int N, int starts,
                                     std::int64_t n_steps, int bins, std::uint64_t seed, int workers,
                                     double threshold) {
  if (N < 1) throw std::invalid_argument("components: N must be >= 1");
  if (starts < 1) throw std::invalid_argument("components: need at least one start");
  check_family(f, k);
  const double lo = f.lo(), span = f.hi() - f.lo();
  const std::int64_t burn = 1000;
  std::vector<Density> hist(starts, Density(f.lo(), f.hi(), bins));
  parallel_for(starts, workers, [&](std::int64_t i) {
    const std::uint64_t s = child_seed(seed, static_cast<std::uint64_t>(i));
    Realization w = make_realization(k, s, N * (burn + n_steps));
    double x = lo + span * (i + 0.5) / starts;
    std::int64_t idx = 0;
    for (std::int64_t j = 0; j < burn + n_steps; ++j) {
      for (int r = 0; r < N; ++r) x = f.eval(w.param(idx++), x);
      if (j >= burn) hist[i].weights[hist[i].bin_of(x)] += 1.0;
    }
  });
  std::vector<std::vector<double>> tv(starts, std::vector<double>(starts, 0.0));
  for (int i = 0; i < starts; ++i)
    for (int j = i + 1; j < starts; ++j) tv[i][j] = tv[j][i] = tv_distance(hist[i], hist[j]);
  // union-find on TV < threshold
  std::vector<int> parent(starts);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (int i = 0; i < starts; ++i)
    for (int j = i + 1; j < starts; ++j)
      if (tv[i][j] < threshold) parent[find(i)] = find(j);
  std::vector<int> label(starts), roots;
  for (int i = 0; i < starts; ++i) {
    int r = find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    label[i] = static_cast<int>(it - roots.begin());
    if (it == roots.end()) roots.push_back(r);
  }
  ComponentReport rep;
  rep.k = static_cast<int>(roots.size());
  rep.masses.assign(rep.k, 0.0);
  for (int i = 0; i < starts; ++i) rep.masses[label[i]] += 1.0 / starts;
  for (int i = 0; i < starts; ++i)
    for (int j = i + 1; j < starts; ++j)
      if (label[i] == label[j]) rep.max_tv_within = std::max(rep.max_tv_within, tv[i][j]);
  if (rep.k >= 2) {
    double total = 0.0;
    for (int i = 0; i < starts; ++i) {
      std::vector<double> sum(rep.k, 0.0);
      std::vector<int> cnt(rep.k, 0);
      for (int j = 0; j < starts; ++j)
        if (j != i) sum[label[j]] += tv[i][j], ++cnt[label[j]];
      double a = cnt[label[i]] ? sum[label[i]] / cnt[label[i]] : 0.0;
      double b = INFINITY;
      for (int c = 0; c < rep.k; ++c)
        if (c != label[i] && cnt[c]) b = std::min(b, sum[c] / cnt[c]);
      double m = std::max(a, b);
      total += m > 0 ? (b - a) / m : 0.0;
    }
    rep.silhouette = total / starts;
    rep.indeterminate = rep.silhouette < 0.1;
  }
  return rep;
}

double density_exponent(const MapFamily& f, const NoiseKernel& k, const Density& mu, int t_nodes, int x_nodes) {
  const auto nodes = k.nodes(k.is_dirac() ? 1 : t_nodes);
  const double h = mu.bin_width();
  ExactSum s;
  for (int i = 0; i < mu.bins(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    double acc = 0.0;
    for (double t : nodes)
      for (int q = 0; q < x_nodes; ++q) {
        double x = mu.lo + (i + (q + 0.5) / x_nodes) * h;
        acc += std::log(std::fabs(f.derivative(t, x)));
      }
    s.add(mu.weights[i] * h * acc / (static_cast<double>(nodes.size()) * x_nodes));
  }
  return s.value() / mu.total_mass();
}

StabilityCurve stability_sweep(const MapFamily& f, double center, const std::vector<double>& epsilons, int bins,
                               int kernel_samples, int workers) {
  if (epsilons.empty()) throw std::invalid_argument("stability_sweep: empty schedule");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0)) throw std::invalid_argument("stability_sweep: epsilons must be positive");
    if (i && !(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("stability_sweep: schedule must decrease");
  }
  StabilityCurve c;
  c.epsilons = epsilons;
  const std::size_t n = epsilons.size();
  c.measures.resize(n);
  c.exponents.resize(n);
  parallel_for(static_cast<std::int64_t>(n), workers, [&](std::int64_t i) {
    NoiseKernel k = NoiseKernel::uniform(center, epsilons[i]);
    c.measures[i] = ulam_stationary(build_ulam(f, k, bins, kernel_samples)).density;
    c.exponents[i] = density_exponent(f, k, c.measures[i]);
  });
  const NoiseKernel d = NoiseKernel::dirac(center);
  try {
    c.limit = ulam_stationary(build_ulam(f, d, bins, 1)).density;
    c.limit_exponent = density_exponent(f, d, c.limit);
  } catch (const std::runtime_error&) {
    c.limit = c.measures.back();
    c.limit_exponent = c.exponents.back();
    c.limit_is_deterministic = false;
  }
  for (auto& m : c.measures) c.distances_to_limit.push_back(tv_distance(m, c.limit));
  return c;
}

std::vector<QuadraticRow> quadratic_counterexample(const std::vector<double>& a_values, std::int64_t n_steps,
                                                   int seeds, std::uint64_t seed) {
  if (n_steps < 1000) throw std::invalid_argument("quadratic: n_steps must be >= 1000");
  std::vector<QuadraticRow> out;
  for (double a : a_values) {
    if (!(a >= 0.0 && a <= 2.0)) throw DomainError("quadratic: a = " + std::to_string(a) + " escapes [-1, 1]");
    MapFamily f = MapFamily::quadratic(a);
    QuadraticRow row;
    row.a = a;
    const std::int64_t burn = n_steps / 10;
    ExactSum total;
    std::int64_t used = 0;
    double last = 0.0;
    for (int s = 0; s < seeds; ++s) {
      double x = -1.0 + 2.0 * uniform01(child_seed(seed, static_cast<std::uint64_t>(s)), stream::start, 0);
      for (std::int64_t n = 0; n < burn; ++n) x = f.eval(a, x);
      ExactSum part;
      for (std::int64_t n = 0; n < n_steps; ++n) {
        double d = std::fabs(f.derivative(a, x));
        if (d > 0) {
          part.add(std::log(d));
          ++used;
        }
        x = f.eval(a, x);
      }
      total.add(part.value());
      last = x;
    }
    row.exponent = used ? total.value() / static_cast<double>(used) : -INFINITY;
    // smallest p with |f^p(x) - x| < 1e-8, checked at several consecutive points
    for (int p = 1; p <= 64 && row.period == 0; ++p) {
      bool ok = true;
      double x = last;
      for (int rep = 0; rep < 4 && ok; ++rep) {
        double y = x;
        for (int i = 0; i < p; ++i) y = f.eval(a, y);
        ok = std::fabs(y - x) < 1e-8;
        x = f.eval(a, x);
      }
      if (ok) row.period = p;
    }
    if (row.period > 0) {
      double m = 1.0, x = last;
      for (int i = 0; i < row.period; ++i) {
        m *= std::fabs(f.derivative(a, x));
        x = f.eval(a, x);
      }
      row.cycle_multiplier = m;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<double> stationarity_residuals(const MapFamily& f, const NoiseKernel& k, const Density& mu, int modes,
                                           int t_nodes, int x_nodes) {
  if (!f.is_circle()) throw UnsupportedError("stationarity_residuals: Fourier observables need a circle family");
  const auto nodes = k.nodes(k.is_dirac() ? 1 : t_nodes);
  const double h = mu.bin_width(), mass = mu.total_mass();
  std::vector<double> out;
  for (int m = 1; m <= modes; ++m)
    for (int kind = 0; kind < 2; ++kind) {
      auto phi = [&](double x) { return kind == 0 ? std::cos(kTwoPi * m * x) : std::sin(kTwoPi * m * x); };
      ExactSum lhs, rhs;
      for (int i = 0; i < mu.bins(); ++i) {
        if (mu.weights[i] == 0.0) continue;
        const double a = mu.lo + i * h, b = a + h;
        // exact bin integral of phi
        double I = kind == 0 ? (std::sin(kTwoPi * m * b) - std::sin(kTwoPi * m * a)) / (kTwoPi * m)
                             : (std::cos(kTwoPi * m * a) - std::cos(kTwoPi * m * b)) / (kTwoPi * m);
        rhs.add(mu.weights[i] * I);
        double acc = 0.0;
        for (double t : nodes)
          for (int q = 0; q < x_nodes; ++q) acc += phi(f.eval(t, a + (q + 0.5) / x_nodes * h));
        lhs.add(mu.weights[i] * h * acc / (static_cast<double>(nodes.size()) * x_nodes));
      }
      out.push_back(std::fabs(lhs.value() - rhs.value()) / mass);
    }
  return out;
}

}  // namespace rgl
