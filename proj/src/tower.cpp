#include "rgl/tower.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "rgl/hyperbolic.hpp"
#include "rgl/numeric.hpp"
#include "rgl/rng.hpp"

namespace rgl {

std::vector<double> shift_window(const Realization& w, std::int64_t s, int count, std::int64_t mask_from) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = s + i >= mask_from ? w.kernel.center : w.param(s + i);
  return out;
}

namespace {

GmyOptions floor_options(const GmyOptions& gopt, double floor) {
  GmyOptions o = gopt;
  o.min_element = floor;
  return o;
}

// Full partitions by parameter window. Dirac kernels give one window for every shift.
class PartitionSource {
 public:
  PartitionSource(const MapFamily& f, const GmyConstants& c, const GmyOptions& gopt, const TowerOptions& topt)
      : f_(f), c_(c), opt_(floor_options(gopt, topt.min_element)), n_max_(topt.n_max) {}

  std::shared_ptr<const GmyPartition> at(const Realization& w, std::int64_t s, std::int64_t mask_from = INT64_MAX) {
    auto params = shift_window(w, s, n_max_ + c_.N0 + 1, mask_from);
    auto it = cache_.find(params);
    if (it != cache_.end()) return it->second;
    auto P = std::make_shared<const GmyPartition>(build_partition(f_, params, c_, n_max_, opt_));
    ++built_;
    if (cache_.size() >= 4) cache_.clear();
    cache_.emplace(std::move(params), P);
    return P;
  }
  int built() const { return built_; }

 private:
  const MapFamily& f_;
  GmyConstants c_;
  GmyOptions opt_;
  int n_max_;
  int built_ = 0;
  std::map<std::vector<double>, std::shared_ptr<const GmyPartition>> cache_;
};

struct ElementMass {
  int R;  // 0 marks the residual (no return within the horizon)
  double mass;
};

// Pushes the densities in `src` (on the inducing interval) through the partition. For every
// element, each source restricted to it lands on the inducing interval after R steps through
// land(channel, R, a, b, mass). With mu set, source 0 is also spread along the first
// min(R, T) images (the j-sum of the projection); residual intervals are spread for T steps.
void push_partition(const MapFamily& f, const GmyPartition& P, const TowerOptions& topt,
                    const std::vector<const Density*>& src,
                    const std::function<void(int, int, double, double, double)>& land, Density* mu, int T,
                    std::vector<ElementMass>* masses) {
  const auto& c = P.c;
  const long double dlo = c.lo();
  const int k = std::max(1, static_cast<int>(std::ceil(2.0 * c.delta0 / topt.max_piece)));
  const int nsrc = static_cast<int>(src.size());
  std::vector<long double> xs;
  std::vector<double> m;
  auto run = [&](long double a, long double b, int pieces, int steps, int R) {
    xs.resize(pieces + 1);
    m.assign(static_cast<std::size_t>(nsrc) * pieces, 0.0);
    bool any = false;
    for (int i = 0; i <= pieces; ++i) xs[i] = a + (b - a) * i / pieces;
    for (int ch = 0; ch < nsrc; ++ch)
      for (int i = 0; i < pieces; ++i) {
        double v = src[ch]->mass_between(static_cast<double>(xs[i]), static_cast<double>(xs[i + 1]));
        m[ch * pieces + i] = v;
        any = any || v != 0.0;
      }
    if (masses) {
      ExactSum s;
      for (int i = 0; i < pieces; ++i) s.add(m[i]);
      masses->push_back({R, s.value()});
    }
    if (!any) return;
    long double base = fast_floor(xs[0]);
    for (auto& x : xs) x -= base;
    for (int j = 0; j < steps; ++j) {
      if (mu && j < T)
        for (int i = 0; i < pieces; ++i)
          if (m[i] != 0.0) mu->deposit_circle_interval(static_cast<double>(xs[i]), static_cast<double>(xs[i + 1]), m[i]);
      const double t = P.params[j];
      for (auto& x : xs) x = f.lift<long double>(t, x);
      base = fast_floor(xs[0]);
      for (auto& x : xs) x -= base;
    }
    if (R > 0) {
      long double sh = fast_round(xs[0] - dlo);
      for (int ch = 0; ch < nsrc; ++ch)
        for (int i = 0; i < pieces; ++i) {
          double v = m[ch * pieces + i];
          if (v != 0.0) land(ch, R, static_cast<double>(xs[i] - sh), static_cast<double>(xs[i + 1] - sh), v);
        }
    }
  };
  for (const auto& e : P.elements) run(e.a, e.b, k, e.R, e.R);
  if (mu || masses)
    for (const auto& J : P.residual) run(J.first, J.second, 8, mu ? T : 0, 0);
}

double max_weight(const Density& d) { return *std::max_element(d.weights.begin(), d.weights.end()); }

Density lebesgue_on(const GmyConstants& c, int bins) {
  Density d(c.lo(), c.hi(), bins);
  for (auto& w : d.weights) w = 1.0;
  return d;
}

}  // namespace

InducedMeasure induced_measure(const MapFamily& f, const Realization& w, const GmyConstants& c, const GmyOptions& gopt,
                               const TowerOptions& topt) {
  if (topt.depth < 2) throw std::invalid_argument("tower.depth must be at least 2");
  PartitionSource src(f, c, gopt, topt);
  const int ring = topt.n_max + 1;
  const int D[2] = {topt.depth, topt.depth / 2};
  // accumulators for the two runs, indexed by shift mod ring
  std::vector<Density> acc[2];
  for (auto& a : acc) a.assign(ring, Density(c.lo(), c.hi(), topt.bins));
  const Density leb = lebesgue_on(c, topt.bins);
  InducedMeasure out;
  out.K1 = 1.0;
  for (std::int64_t s = -topt.depth - topt.n_max; s < 0; ++s) {
    const int slot = static_cast<int>(((s % ring) + ring) % ring);
    Density cur[2];
    for (int r = 0; r < 2; ++r) {
      cur[r] = s < -D[r] ? leb : acc[r][slot];
      acc[r][slot] = Density(c.lo(), c.hi(), topt.bins);
    }
    out.K1 = std::max(out.K1, max_weight(cur[0]));
    // elements returning at or before shift 0 only read coordinates below 0
    auto P = src.at(w, s, 0);
    push_partition(
        f, *P, topt, {&cur[0], &cur[1]},
        [&](int ch, int R, double a, double b, double mass) {
          if (s + R > 0) return;
          const int t = static_cast<int>((((s + R) % ring) + ring) % ring);
          acc[ch][t].deposit_interval(a, b, mass);
        },
        nullptr, 0, nullptr);
  }
  out.nu = acc[0][0];
  out.K1 = std::max(out.K1, max_weight(out.nu));
  out.partitions = src.built();
  Density a = acc[0][0], b = acc[1][0];
  if (a.total_mass() > 0 && b.total_mass() > 0) {
    a.normalize();
    b.normalize();
    out.convergence_l1 = l1_distance(a, b);
  } else {
    out.convergence_l1 = INFINITY;
  }
  if (!(out.convergence_l1 <= topt.convergence_tol)) {
    std::ostringstream os;
    os << "induced_measure: runs from depth " << D[0] << " and " << D[1] << " differ by L1 " << out.convergence_l1
       << " > " << topt.convergence_tol;
    throw ConvergenceError(os.str());
  }
  return out;
}

namespace {

struct OrbitTrack {
  long double y = 0;  // current point, lift coordinates of the inducing interval
  int s = 0;          // start of the current segment
  bool excluded = false;
  std::vector<double> ld;      // log|f'| along the orbit
  std::vector<char> sat;       // sat[j] for j in 1..horizon
  std::vector<int> returns;    // return times j_k <= horizon
};

long double into_delta(const GmyConstants& c, double z) {
  long double y = z - fast_round(static_cast<long double>(z) - c.p);
  // rounding at an element edge can leave the image a hair outside
  const long double lo = c.lo(), hi = c.hi();
  if (y < lo && lo - y < 1e-9L) y = lo;
  if (y >= hi && y - hi < 1e-9L) y = std::nextafter(hi, lo);
  if (y < lo || y >= hi) throw std::logic_error("tower orbit left the inducing interval");
  return y;
}

// Advances all tracks to the horizon shift by shift. Returns the number of partitions built.
int run_tracks(const MapFamily& f, const Realization& w, const GmyConstants& c, const GmyOptions& gopt,
               const TowerOptions& topt, std::vector<OrbitTrack>& tracks, int horizon) {
  const GmyOptions opt = floor_options(gopt, topt.orbit_min_element);
  std::vector<std::vector<int>> bucket(horizon + 1);
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i) {
    auto& tr = tracks[i];
    tr.sat.assign(horizon + 1, 0);
    tr.ld.clear();
    tr.returns.clear();
    bucket[0].push_back(i);
  }
  int built = 0;
  for (int s = 0; s < horizon; ++s) {
    if (bucket[s].empty()) continue;
    std::vector<long double> q;
    for (int i : bucket[s]) q.push_back(tracks[i].y);
    auto P = build_partition(f, shift_window(w, s, topt.n_max + c.N0 + 1), c, topt.n_max, opt, &q);
    ++built;
    for (int i : bucket[s]) {
      auto& tr = tracks[i];
      const PartitionElement* e = P.locate(tr.y);
      if (!e) {
        tr.excluded = true;
        continue;
      }
      const int R = e->R;
      const int stop = std::min(R, horizon - s);
      for (int l = 1; l <= stop; ++l) tr.sat[s + l] = P.in_satellite(l, tr.y) ? 1 : 0;
      double z = wrap01(static_cast<double>(tr.y));
      for (int j = 0; j < stop; ++j) {
        const double t = P.params[j];
        tr.ld.push_back(std::log(std::fabs(f.derivative(t, z))));
        z = f.eval(t, z);
      }
      if (s + R <= horizon) {
        tr.returns.push_back(s + R);
        tr.y = into_delta(c, z);
        tr.s = s + R;
        if (s + R < horizon) bucket[s + R].push_back(i);
      }
    }
    std::vector<int>().swap(bucket[s]);
  }
  return built;
}

std::vector<TowerOrbitStats> series_of(const OrbitTrack& tr, int horizon, double lambda) {
  auto flags = hyperbolic_flags(tr.ld, lambda);
  std::vector<TowerOrbitStats> out(horizon);
  int H = 0, S = 0, R = 0;
  std::size_t ri = 0;
  for (int n = 1; n <= horizon; ++n) {
    H += flags[n] ? 1 : 0;
    S += tr.sat[n];
    while (ri < tr.returns.size() && tr.returns[ri] <= n) ++ri, ++R;
    out[n - 1] = {n, H, S, R};
  }
  return out;
}

}  // namespace

TowerStep tower_map_step(const MapFamily& f, const Realization& w, long double x, const GmyConstants& c,
                         const GmyOptions& gopt, const TowerOptions& topt) {
  if (x < c.lo() || x >= c.hi()) throw std::invalid_argument("tower_map_step: point outside the inducing interval");
  std::vector<long double> q{x};
  auto P = build_partition(f, shift_window(w, 0, topt.n_max + c.N0 + 1), c, topt.n_max,
                           floor_options(gopt, topt.orbit_min_element), &q);
  const PartitionElement* e = P.locate(x);
  if (!e) throw NoReturnError("tower_map_step: point lies in the unresolved residual");
  double z = wrap01(static_cast<double>(x));
  for (int j = 0; j < e->R; ++j) z = f.eval(P.params[j], z);
  TowerStep st;
  st.R = e->R;
  st.y = into_delta(c, z);
  st.next = w.shifted(e->R);
  return st;
}

std::vector<TowerOrbitStats> orbit_stats_series(const MapFamily& f, const Realization& w, long double x, int n,
                                                const GmyConstants& c, double lambda, const GmyOptions& gopt,
                                                const TowerOptions& topt) {
  if (n < 1) throw std::invalid_argument("orbit_stats: horizon must be positive");
  std::vector<OrbitTrack> tr(1);
  tr[0].y = x;
  run_tracks(f, w, c, gopt, topt, tr, n);
  if (tr[0].excluded) throw NoReturnError("orbit_stats: orbit fell into the unresolved residual");
  return series_of(tr[0], n, lambda);
}

TowerOrbitStats orbit_stats(const MapFamily& f, const Realization& w, long double x, int n, const GmyConstants& c,
                            double lambda, const GmyOptions& gopt, const TowerOptions& topt) {
  return orbit_stats_series(f, w, x, n, c, lambda, gopt, topt).back();
}

bool counting_inequality_check(const TowerOrbitStats& s, double eta) {
  // eta is 1 + R0 + N0, an integer
  const long long e = std::llround(eta);
  return e * static_cast<long long>(s.R_n) + s.S_n >= s.H_n;
}

CountingReport counting_experiment(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c,
                                   const GmyOptions& gopt, const TowerOptions& topt, int n_orbits, int horizon,
                                   double lambda, std::uint64_t seed) {
  CountingReport rep;
  rep.min_margin = INT32_MAX;
  long double sumH = 0, sumS = 0, sumR = 0;
  const long double dlo = c.lo(), width = 2.0L * c.delta0;
  for (int batch = 0; rep.orbits < n_orbits && batch < 16; ++batch) {
    const int need = n_orbits - rep.orbits;
    const int size = batch == 0 ? need : need + need / 4 + 8;
    const std::uint64_t bseed = child_seed(seed, static_cast<std::uint64_t>(batch));
    Realization w = make_realization(k, bseed, horizon + topt.n_max + c.N0 + 2);
    std::vector<OrbitTrack> tracks(size);
    for (int i = 0; i < size; ++i) tracks[i].y = dlo + width * static_cast<long double>(uniform01(bseed, stream::start, i));
    rep.partitions += run_tracks(f, w, c, gopt, topt, tracks, horizon);
    for (auto& tr : tracks) {
      if (tr.excluded) {
        ++rep.excluded;
        continue;
      }
      if (rep.orbits >= n_orbits) break;
      ++rep.orbits;
      auto ser = series_of(tr, horizon, lambda);
      bool prefix_bad = false;
      for (auto& st : ser) prefix_bad = prefix_bad || !counting_inequality_check(st, c.eta);
      const auto& last = ser.back();
      if (!counting_inequality_check(last, c.eta)) ++rep.violations;
      if (prefix_bad) ++rep.prefix_violations;
      rep.min_margin = std::min<int>(rep.min_margin, static_cast<int>(std::llround(c.eta)) * last.R_n + last.S_n - last.H_n);
      sumH += last.H_n;
      sumS += last.S_n;
      sumR += last.R_n;
    }
  }
  if (rep.orbits > 0) {
    rep.mean_H = static_cast<double>(sumH / rep.orbits);
    rep.mean_S = static_cast<double>(sumS / rep.orbits);
    rep.mean_R = static_cast<double>(sumR / rep.orbits);
  } else {
    rep.min_margin = 0;
  }
  return rep;
}

TowerProjection tower_projection(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c,
                                 const GmyOptions& gopt, const TowerOptions& topt, std::uint64_t seed) {
  if (!f.is_circle()) throw UnsupportedError("tower_projection: needs a circle family");
  if (topt.n_realizations < 1) throw std::invalid_argument("tower.n_realizations must be positive");
  const int S = topt.n_realizations, n_max = topt.n_max, ring = n_max + 1;
  Realization w = make_realization(k, seed, S + n_max + c.N0 + 2, Sidedness::TwoSided, topt.depth + n_max);
  PartitionSource src(f, c, gopt, topt);
  std::vector<Density> acc(ring, Density(c.lo(), c.hi(), topt.bins));
  const Density leb = lebesgue_on(c, topt.bins);

  TowerProjection out;
  out.mu = Density(0.0, 1.0, topt.bins);
  out.nu_mean = Density(c.lo(), c.hi(), topt.bins);
  Density pushed(c.lo(), c.hi(), topt.bins);
  out.return_hist.assign(n_max + 2, 0.0);  // last slot: residual
  out.K1 = 1.0;
  int T = topt.truncation;
  std::vector<ExactSum> tail_acc;
  ExactSum integral_acc, nu_mass_acc, mu_mass_acc, beyond_acc;
  std::vector<ExactSum> partial_acc;

  for (std::int64_t s = -topt.depth - n_max; s < S; ++s) {
    const int slot = static_cast<int>(((s % ring) + ring) % ring);
    Density cur = s < -topt.depth ? leb : acc[slot];
    acc[slot] = Density(c.lo(), c.hi(), topt.bins);
    out.K1 = std::max(out.K1, max_weight(cur));
    auto P = src.at(w, s);
    const bool measured = s >= 0;
    if (measured && T <= 0) {
      // 99th percentile of the return times seen so far, Lebesgue weighted
      double total = 0, cum = 0;
      for (double v : out.return_hist) total += v;
      T = n_max;
      for (int n = 0; n <= n_max; ++n) {
        cum += out.return_hist[n];
        if (cum >= 0.99 * total) {
          T = std::max(n, 1);
          break;
        }
      }
    }
    if (measured && tail_acc.empty()) {
      tail_acc.resize(T);
      partial_acc.resize(T + 1);
    }
    if (!measured) {
      for (auto& e : P->elements) out.return_hist[e.R] += e.length();
      out.return_hist[n_max + 1] += P->residual_mass[n_max];
    }
    std::vector<ElementMass> masses;
    Density mu_s(0.0, 1.0, topt.bins);
    push_partition(
        f, *P, topt, {&cur},
        [&](int, int R, double a, double b, double mass) {
          acc[static_cast<int>((((s + R) % ring) + ring) % ring)].deposit_interval(a, b, mass);
          if (measured) pushed.deposit_interval(a, b, mass);
        },
        measured ? &mu_s : nullptr, T, measured ? &masses : nullptr);
    if (!measured) continue;
    ++out.shifts;
    for (int i = 0; i < topt.bins; ++i) {
      out.mu.weights[i] += mu_s.weights[i];
      out.nu_mean.weights[i] += cur.weights[i];
    }
    mu_mass_acc.add(mu_s.total_mass());
    for (auto& em : masses) {
      const int R = em.R == 0 ? INT32_MAX : em.R;  // residual never returns within the horizon
      nu_mass_acc.add(em.mass);
      for (int n = 0; n < T && n < R; ++n) tail_acc[n].add(em.mass);
      if (R > T) beyond_acc.add(em.mass);
      const int capped = std::min(R, T);
      integral_acc.add(capped * em.mass);
      if (R <= T) partial_acc[R].add(R * em.mass);
      else partial_acc[T].add(T * em.mass);
    }
  }
  out.partitions = src.built();
  out.truncation = T;
  const double nS = out.shifts;
  out.tail.resize(T);
  ExactSum tail_sum;
  for (int n = 0; n < T; ++n) {
    out.tail[n] = tail_acc[n].value() / nS;
    tail_sum.add(tail_acc[n].value());
  }
  out.tail_sum = tail_sum.value() / nS;
  out.return_integral = integral_acc.value() / nS;
  out.fubini_gap = std::fabs(out.tail_sum - out.return_integral);
  out.integral_partial.resize(T + 1);
  ExactSum run;
  for (int n = 0; n <= T; ++n) {
    run.add(partial_acc[n].value());
    out.integral_partial[n] = run.value() / nS;
  }
  const double nu_mass = nu_mass_acc.value() / nS;
  out.truncation_residual = nu_mass > 0 ? beyond_acc.value() / nS / nu_mass : 1.0;
  out.warning_truncation = out.truncation_residual > 0.05;
  out.mu_mass = mu_mass_acc.value() / nS;
  out.mu.normalize();
  if (out.nu_mean.total_mass() > 0 && pushed.total_mass() > 0) {
    Density a = out.nu_mean, b = pushed;
    a.normalize();
    b.normalize();
    out.invariance_l1 = l1_distance(a, b);
  }
  for (auto& v : out.nu_mean.weights) v /= nS;
  return out;
}

double return_time_integral(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c, const GmyOptions& gopt,
                            const TowerOptions& topt, std::uint64_t seed) {
  return tower_projection(f, k, c, gopt, topt, seed).return_integral;
}

Density project_stationary(const MapFamily& f, const NoiseKernel& k, const GmyConstants& c, const GmyOptions& gopt,
                           const TowerOptions& topt, std::uint64_t seed) {
  return tower_projection(f, k, c, gopt, topt, seed).mu;
}

}  // namespace rgl
