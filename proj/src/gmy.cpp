#include "rgl/gmy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rgl/hyperbolic.hpp"
#include "rgl/rng.hpp"

namespace rgl {

namespace {

constexpr double kDenseTol = 1e-12;
constexpr long double kAcceptTol = 1e-15L;

double max_circle_gap(std::vector<double> pts) {
  for (double& v : pts) v = wrap01(v);
  std::sort(pts.begin(), pts.end());
  double g = pts.front() + 1.0 - pts.back();
  for (std::size_t i = 1; i < pts.size(); ++i) g = std::max(g, pts[i] - pts[i - 1]);
  return g;
}

std::vector<std::vector<double>> density_words(const MapFamily& f, const NoiseKernel& k, int max_depth, int n_random,
                                               std::uint64_t seed) {
  std::vector<std::vector<double>> words;
  if (k.is_dirac()) {
    words.emplace_back(max_depth, k.center);
    return words;
  }
  (void)f;
  words.emplace_back(max_depth, k.support_lo());
  words.emplace_back(max_depth, k.support_hi());
  words.emplace_back(max_depth, k.center);
  for (int w = 0; w < n_random; ++w) {
    std::vector<double> word(max_depth);
    for (int i = 0; i < max_depth; ++i) word[i] = k.sample(child_seed(seed, w), stream::aux, i);
    words.push_back(std::move(word));
  }
  return words;
}

// Inducing interval pulled back m steps: lift interval plus the preimage of p inside it.
// Branches are named by an integer offset A with F^R(U) = Delta + A on the real line, so
// the same return branch found from different sweep points is pulled back once.
using BranchKey = __int128;

struct Component {
  long double lo, hi, q;
  int m;
  BranchKey off;  // F^m maps the component onto Delta + off
};

// Preimages of a lift interval under one map: one copy per branch, left ends in [0,1).
void pull1(const MapFamily& f, double t, const Component& c, BranchKey dm, std::vector<Component>& out) {
  const int dd = f.degree();
  long double f0 = f.lift<long double>(t, 0.0L);
  long double k0 = std::ceil(f0 - c.lo);
  for (int i = 0; i < dd; ++i) {
    long double s = k0 + i;
    out.push_back({f.inverse_lift<long double>(t, c.lo + s), f.inverse_lift<long double>(t, c.hi + s),
                   f.inverse_lift<long double>(t, c.q + s), c.m + 1,
                   c.off + static_cast<BranchKey>(static_cast<long long>(s)) * dm});
  }
}

struct Candidate {
  long double lo, hi;
  int n, m;
};

class Residual {
 public:
  explicit Residual(long double lo, long double hi) { set_[lo] = hi; }
  // Removes [lo, hi] when it lies inside one residual interval.
  bool take(long double lo, long double hi) {
    auto it = set_.upper_bound(lo + kAcceptTol);
    if (it == set_.begin()) return false;
    --it;
    long double jl = it->first, jh = it->second;
    if (lo < jl - kAcceptTol || hi > jh + kAcceptTol) return false;
    set_.erase(it);
    if (lo > jl) set_[jl] = lo;
    if (jh > hi) set_[hi] = jh;
    return true;
  }
  long double mass() const {
    long double s = 0;
    for (auto& [a, b] : set_) s += b - a;
    return s;
  }
  std::vector<LInterval> intervals() const { return {set_.begin(), set_.end()}; }

 private:
  std::map<long double, long double> set_;
};

std::vector<LInterval> merge_intervals(std::vector<LInterval> v) {
  std::sort(v.begin(), v.end());
  std::vector<LInterval> out;
  for (auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second) out.back().second = std::max(out.back().second, iv.second);
    else out.push_back(iv);
  }
  return out;
}

long double interval_mass(const std::vector<LInterval>& v) {
  long double s = 0;
  for (auto& iv : v) s += iv.second - iv.first;
  return s;
}

// Orbit into a reused buffer; returns whether n is a lambda-hyperbolic time.
bool orbit_hyperbolic(const MapFamily& f, const std::vector<double>& params, long double x0, int n, double log_lambda,
                      LiftedOrbit& o, double& log_dfn, BranchKey* lift_int = nullptr) {
  const int dd = f.degree();
  BranchKey L = 0;
  o.x.resize(n + 1);
  o.t.resize(n);
  o.ld.resize(n);
  o.F.resize(n);
  o.dF.resize(n);
  o.x[0] = x0;
  long double x = x0;
  for (int k = 0; k < n; ++k) {
    const double t = params[k];
    o.t[k] = t;
    long double v, dv;
    f.lift_deriv<long double>(t, x, v, dv);
    o.ld[k] = std::log(std::fabs(static_cast<double>(dv)));
    o.F[k] = v;
    o.dF[k] = dv;
    long double fl = fast_floor(v);
    x = v - fl;
    if (x >= 1.0L) x = 0.0L, fl += 1.0L;
    L = L * dd + static_cast<long long>(fl);
    o.x[k + 1] = x;
  }
  if (lift_int) *lift_int = L;
  // tail sums of -log|f'| - log lambda must all be <= 0
  double tail = 0.0, s = 0.0;
  bool ok = true;
  for (int k = n - 1; k >= 0; --k) {
    tail += -o.ld[k] - log_lambda;
    if (tail > 1e-12 * (1.0 + (n - k))) ok = false;
  }
  for (int k = 0; k < n; ++k) s += o.ld[k];
  log_dfn = s;
  return ok;
}

long double pull_point(const MapFamily& f, const LiftedOrbit& o, int n, long double v) {
  for (int k = n - 1; k >= 0; --k) {
    const double t = o.t[k];
    const long double s = fast_round(o.F[k] - o.x[k + 1]);
    v = f.inverse_lift_from<long double>(t, v + s, o.x[k], o.F[k], o.dF[k]);
  }
  return v;
}

std::vector<std::uint8_t> itinerary(const MapFamily& f, const std::vector<double>& params, long double x, int R) {
  std::vector<std::uint8_t> out(R);
  for (int k = 0; k < R; ++k) {
    const double t = params[k];
    long double v = f.lift<long double>(t, x);
    long double base = f.lift<long double>(t, 0.0L);
    out[k] = static_cast<std::uint8_t>(std::clamp<long double>(fast_floor(v - base), 0, f.degree() - 1));
    x = wrap01(v);
  }
  return out;
}

// A restricted build can stop once every query is captured, or sits in a frozen interval
// that no pending candidate can still claim.
bool done_querying(const std::vector<long double>& live, const std::vector<LInterval>& frozen,
                   const std::map<int, std::vector<Candidate>>& pending, int n) {
  for (long double q : live) {
    auto it = std::upper_bound(frozen.begin(), frozen.end(), LInterval{q, INFINITY});
    if (it == frozen.begin() || q >= std::prev(it)->second) return false;
    for (auto& [R, cands] : pending) {
      if (R <= n) continue;
      for (auto& cd : cands)
        if (q >= cd.lo && q < cd.hi) return false;
    }
  }
  return true;
}

}  // namespace

int least_dense_depth(const MapFamily& f, const std::vector<std::vector<double>>& words, double p, double radius,
                      int max_depth, double* achieved) {
  const std::size_t cap = std::size_t(1) << 22;
  for (int j = 0; j <= max_depth; ++j) {
    double worst = 0.0;
    bool too_big = false;
    for (auto& w : words) {
      std::vector<double> pts{p};
      for (int i = 1; i <= j; ++i) {
        std::vector<double> word(w.begin(), w.begin() + i);
        auto pre = f.preimages_word(word, p);
        pts.insert(pts.end(), pre.begin(), pre.end());
        if (pts.size() > cap) {
          too_big = true;
          break;
        }
      }
      if (too_big) break;
      worst = std::max(worst, max_circle_gap(pts) / 2.0);
    }
    if (too_big) return -1;
    if (worst <= radius + kDenseTol) {
      if (achieved) *achieved = worst;
      return j;
    }
  }
  return -1;
}

GmyConstants choose_inducing_domain(const MapFamily& f, const NoiseKernel& k, const GmyOptions& opt) {
  if (!f.is_circle()) throw UnsupportedError("inducing domain needs a full-branch circle family");
  if (!(opt.delta1 > 0.0 && opt.delta1 < 0.5)) throw DomainError("gmy.delta1 must lie in (0, 0.5)");
  if (!(opt.lambda > 0.0 && opt.lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  GmyConstants c;
  c.delta1 = opt.delta1;
  c.lambda = opt.lambda;
  const int max_depth = 30;
  auto words = density_words(f, k, max_depth, opt.density_words, opt.density_seed);
  const double radius = opt.delta1 / 4.0;

  if (std::isfinite(opt.p)) {
    c.p = wrap01(opt.p);
    c.N0 = least_dense_depth(f, words, c.p, radius, max_depth, &c.max_preimage_distance);
  } else {
    // smallest depth wins, then the tighter preimage net, then the smaller point
    int best = -1;
    double best_dist = 0.0;
    for (int i = 0; i < 64; ++i) {
      double p = i / 64.0, dist = 0.0;
      int n0 = least_dense_depth(f, words, p, radius, best < 0 ? max_depth : best, &dist);
      if (n0 < 0) continue;
      if (best < 0 || n0 < best || (n0 == best && dist < best_dist - 1e-12)) {
        best = n0;
        best_dist = dist;
        c.p = p;
      }
    }
    c.N0 = best;
    c.max_preimage_distance = best_dist;
  }
  if (c.N0 < 0) throw DomainError("no preimage depth <= 30 is delta1/4-dense");

  auto b = derivative_bounds(f, k);
  c.sigma = b.inf_abs;
  c.K0 = std::max(std::pow(b.sup_abs, c.N0), std::pow(b.inf_abs, -c.N0));
  c.delta0 = opt.delta0 > 0.0 ? opt.delta0 : 2.0 * opt.delta1 / 3.0;
  if (!(c.delta0 + opt.delta1 / 4.0 < opt.delta1))
    throw DomainError("delta0 too large: every return ball must hold a pulled-back inducing interval");
  // literal gap condition 2 d0 K0^N0 sigma^-N0 < d1 K0^-N0, sigma read as inf|f'|
  c.delta0_gap_bound =
      opt.delta1 * std::pow(c.K0, -c.N0) * std::pow(c.sigma, c.N0) / (2.0 * std::pow(c.K0, c.N0));
  c.gap_condition_holds = c.delta0 < c.delta0_gap_bound;

  int R0 = std::max(c.N0, 1);
  while (c.K0 * std::pow(opt.lambda, (R0 - c.N0) / 2.0) >= opt.kappa_target) ++R0;
  c.R0 = R0;
  c.kappa = c.K0 * std::pow(opt.lambda, (R0 - c.N0) / 2.0);
  c.eta = 1.0 + c.R0 + c.N0;
  double s = 0.0;
  for (int i = 1; i <= c.N0; ++i) s += std::pow(c.sigma, -i);
  c.D0 = b.sup_log_slope * s;
  c.C0 = preball_distortion_bound(b.sup_log_slope, opt.lambda);
  c.C2 = std::exp(c.C0 * 2.0 * opt.delta1);
  c.K = c.D0 + c.C0 * c.K0;
  return c;
}

GmyPartition build_partition(const MapFamily& f, const Realization& w, const GmyConstants& c, int n_max,
                             const GmyOptions& opt, const std::vector<long double>* queries) {
  return build_partition(f, w.one_sided().window(0, n_max + c.N0 + 1), c, n_max, opt, queries);
}

GmyPartition build_partition(const MapFamily& f, const std::vector<double>& params, const GmyConstants& c, int n_max,
                             const GmyOptions& opt, const std::vector<long double>* queries) {
  if (static_cast<int>(params.size()) < n_max + c.N0)
    throw std::invalid_argument("build_partition: realization shorter than n_max + N0");
  GmyPartition P;
  P.c = c;
  P.n_max = n_max;
  P.params = params;
  const long double dlo = c.lo(), dhi = c.hi();
  const long double d1 = c.delta1;
  const double log_lambda = std::log(c.lambda);
  const long double grid = static_cast<long double>(c.delta0) / std::ldexp(1.0L, opt.grid_pow);

  P.satellites.assign(n_max + 1, {});
  P.satellite_mass.assign(n_max + 1, 0.0);
  P.residual_mass.assign(n_max + 1, 2.0 * c.delta0);
  P.unresolved_mass.assign(n_max + 1, 0.0);

  // pulled-back inducing intervals per start index: table[n][m] for m <= N0
  const int last = n_max + c.N0;
  std::vector<BranchKey> dpow(last + 2, 1);
  for (int i = 1; i < last + 2; ++i) dpow[i] = dpow[i - 1] * f.degree();
  std::vector<std::vector<std::vector<Component>>> table(last + 1, std::vector<std::vector<Component>>(c.N0 + 1));
  for (int n = last; n >= 0; --n) {
    table[n][0] = {{dlo, dhi, static_cast<long double>(c.p), 0, 0}};
    for (int m = 1; m <= c.N0 && n + 1 <= last; ++m)
      for (auto& comp : table[n + 1][m - 1]) pull1(f, params[n], comp, dpow[m - 1], table[n][m]);
  }

  Residual residual(dlo, dhi);
  std::map<int, std::vector<Candidate>> pending;
  std::map<int, std::set<BranchKey>> seen;  // per return time
  LiftedOrbit o, oa;

  // the inducing interval, copied around y, that fits in the ball of radius delta1
  auto choose = [&](int n, long double y, long double& wlo, long double& whi, BranchKey& key) -> int {
    for (int m = 0; m <= c.N0; ++m) {
      bool found = false;
      long double best = 0;
      for (auto& comp : table[n][m]) {
        long double s = fast_round(y - comp.q);
        long double lo = comp.lo + s, hi = comp.hi + s;
        if (lo > y - d1 && hi < y + d1) {
          long double dist = std::fabs(comp.q + s - y);
          if (!found || dist < best) {
            found = true;
            best = dist;
            wlo = lo;
            whi = hi;
            key = comp.off + static_cast<BranchKey>(static_cast<long long>(s)) * dpow[m];
          }
        }
      }
      if (found) return m;
    }
    return -1;
  };

  // Residual intervals evolve independently: candidates and satellites of an interval stay
  // inside it, and an interval whose sweep fell below the precision floor stays frozen.
  // A query-restricted build therefore reproduces the full build on the intervals it sweeps.
  std::vector<LInterval> frozen;
  auto is_frozen = [&](const LInterval& J) {
    auto it = std::upper_bound(frozen.begin(), frozen.end(), LInterval{J.first, INFINITY});
    if (it == frozen.begin()) return false;
    --it;
    return J.first >= it->first && J.second <= it->second;
  };
  std::vector<long double> live;  // uncaptured query points, sorted
  if (queries) {
    P.restricted = true;
    for (long double q : *queries)
      if (q >= dlo && q < dhi) live.push_back(q);
    std::sort(live.begin(), live.end());
  }
  auto has_live = [&](const LInterval& J) {
    auto it = std::lower_bound(live.begin(), live.end(), J.first);
    return it != live.end() && *it < J.second;
  };
  P.n_built = n_max;
  for (int n = c.R0; n <= n_max; ++n) {
    std::vector<LInterval> sat, rests;
    long double unresolved = 0;
    for (auto& J : residual.intervals()) {
      if (is_frozen(J)) {
        sat.push_back(J);
        unresolved += J.second - J.first;
        continue;
      }
      if (queries && !has_live(J)) continue;
      std::set<std::pair<int, BranchKey>> outside;  // branches whose return domain leaves J
      auto offer = [&](int R, BranchKey key, long double ulo, long double uhi, int m) {
        if (uhi - ulo < opt.min_element) {
          seen[R].insert(key);
        } else if (ulo >= J.first && uhi <= J.second) {
          seen[R].insert(key);
          pending[R].push_back({ulo, uhi, n, m});
          ++P.candidates;
        } else {
          outside.insert({R, key});
        }
      };
      auto known = [&](int R, BranchKey key) { return seen[R].count(key) || outside.count({R, key}); };
      long double x = J.first;
      bool run = false;  // x is the right end of the previous pre-ball, so its left part is covered
      while (x < J.second) {
        long double x0 = wrap01(x), shift = x - x0;
        double ldn = 0;
        BranchKey An = 0;
        bool hyp = orbit_hyperbolic(f, params, x0, n, log_lambda, o, ldn, &An);
        An += static_cast<BranchKey>(static_cast<long long>(shift)) * dpow[n];
        if (hyp) {
          long double y = o.x[n];
          long double vhi = pull_point(f, o, n, y + d1) + shift;
          long double vlo = run ? x : pull_point(f, o, n, y - d1) + shift;
          if (vhi - x < opt.min_element / 2) {
            // below the precision floor: the rest of J stands in for its pre-balls
            rests.push_back({x, J.second});
            break;
          }
          sat.push_back({std::max(vlo, J.first), std::min(vhi, J.second)});
          // points of the ball sitting over a copy of p are swept too: their own balls hold
          // the full inducing interval, so they return with m = 0
          for (long double s = fast_floor(y - d1 - c.p) + 1; c.p + s < y + d1; s += 1) {
            long double q = c.p + s;
            // its branch is known before any pullback
            BranchKey key = An + static_cast<BranchKey>(static_cast<long long>(s));
            if (known(n, key)) continue;
            long double xa = pull_point(f, o, n, q) + shift;
            if (!(xa >= J.first && xa < J.second)) continue;
            long double xa0 = wrap01(xa);
            double lda = 0;
            if (!orbit_hyperbolic(f, params, xa0, n, log_lambda, oa, lda)) continue;
            long double sa = fast_round(oa.x[n] - static_cast<long double>(c.p));
            auto [ulo, uhi] = pull_back(f, oa, n, dlo + sa, dhi + sa);
            offer(n, key, ulo + (xa - xa0), uhi + (xa - xa0), 0);
          }
          long double wlo = 0, whi = 0;
          BranchKey wkey = 0;
          int m = choose(n, y, wlo, whi, wkey);
          if (m < 0) {
            ++P.no_return;
          } else if (BranchKey key = wkey + An * dpow[m]; !known(n + m, key)) {
            auto [ulo, uhi] = pull_back(f, o, n, wlo, whi);
            offer(n + m, key, ulo + shift, uhi + shift, m);
          }
          // rounding can stall the chain on very thin balls
          x = vhi > x ? vhi : x + std::max<long double>(opt.min_element, std::fabs(x) * 1e-15L);
          run = true;
        } else {
          run = false;
          long double scale = 2.0L * d1 / std::exp(static_cast<long double>(ldn));  // pre-ball size here
          long double step = std::min<long double>(grid, scale / 8.0L);
          if (scale < opt.min_element) {
            rests.push_back({x, J.second});
            break;
          }
          long double x2 = x + step;
          if (x2 >= J.second) break;
          double ld2 = 0;
          if (orbit_hyperbolic(f, params, wrap01(x2), n, log_lambda, o, ld2)) {
            // refine to the first hyperbolic point after x
            long double a = x, b = x2;
            for (int it = 0; it < 60 && b - a > step * 1e-9L; ++it) {
              long double mid = (a + b) / 2;
              if (orbit_hyperbolic(f, params, wrap01(mid), n, log_lambda, o, ld2)) b = mid;
              else a = mid;
            }
            x = b;
          } else {
            x = x2;
          }
        }
      }
    }
    for (auto& r : rests) {
      sat.push_back(r);
      unresolved += r.second - r.first;
      frozen.push_back(r);
    }
    frozen = merge_intervals(std::move(frozen));
    P.satellites[n] = merge_intervals(std::move(sat));
    P.satellite_mass[n] = static_cast<double>(interval_mass(P.satellites[n]));
    P.unresolved_mass[n] = static_cast<double>(unresolved);

    // candidates whose return time is n join the partition now, left to right
    auto it = pending.find(n);
    if (it != pending.end()) {
      auto& cands = it->second;
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
      });
      for (auto& cd : cands) {
        if (!residual.take(cd.lo, cd.hi)) continue;
        PartitionElement e;
        e.a = cd.lo;
        e.b = cd.hi;
        e.n = cd.n;
        e.m = cd.m;
        e.R = cd.n + cd.m;
        e.itinerary = itinerary(f, params, wrap01((cd.lo + cd.hi) / 2), e.R);
        if (queries) {
          auto lo = std::lower_bound(live.begin(), live.end(), e.a);
          auto hi = std::lower_bound(lo, live.end(), e.b);
          live.erase(lo, hi);
        }
        P.elements.push_back(std::move(e));
      }
      pending.erase(it);
    }
    seen.erase(n);
    P.residual_mass[n] = static_cast<double>(residual.mass());
    if (queries && done_querying(live, frozen, pending, n)) {
      P.n_built = n;
      break;
    }
  }
  for (int n = 0; n < c.R0 && n <= n_max; ++n) {
    P.satellites[n] = {{dlo, dhi}};
    P.satellite_mass[n] = 2.0 * c.delta0;
  }
  for (int n = P.n_built + 1; n <= n_max; ++n) P.residual_mass[n] = P.residual_mass[P.n_built];
  P.residual = residual.intervals();
  std::sort(P.elements.begin(), P.elements.end(),
            [](const PartitionElement& a, const PartitionElement& b) { return a.a < b.a; });
  P.warning_large_residual = P.residual_mass[n_max] > 0.5 * P.delta_mass();
  double L = 0.0;
  for (int n = c.R0; n <= n_max; ++n) L += P.satellite_mass[n];
  P.c.L = L;
  return P;
}

const PartitionElement* GmyPartition::locate(long double x) const {
  auto it = std::upper_bound(elements.begin(), elements.end(), x,
                             [](long double v, const PartitionElement& e) { return v < e.a; });
  if (it == elements.begin()) return nullptr;
  --it;
  return x < it->b ? &*it : nullptr;
}

bool GmyPartition::in_satellite(int n, long double x) const {
  if (x < c.lo() || x >= c.hi()) return false;
  if (n < c.R0) return true;
  if (n > n_built) {
    // beyond the horizon the unresolved residual stands in for the satellite
    auto it = std::upper_bound(residual.begin(), residual.end(), LInterval{x, INFINITY});
    if (it == residual.begin()) return false;
    --it;
    return x < it->second;
  }
  const auto& s = satellites[n];
  auto it = std::upper_bound(s.begin(), s.end(), LInterval{x, INFINITY});
  if (it == s.begin()) return false;
  --it;
  return x <= it->second;
}

int GmyPartition::satellite_count(long double x, int upto) const {
  int c0 = 0;
  for (int l = 1; l <= upto; ++l) c0 += in_satellite(l, x) ? 1 : 0;
  return c0;
}

double GmyPartition::element_mass() const {
  long double s = 0;
  for (auto& e : elements) s += e.b - e.a;
  return static_cast<double>(s);
}

std::vector<double> satellite_mass_series(const GmyPartition& P) {
  std::vector<double> out;
  double s = 0.0;
  for (int n = P.c.R0; n <= P.n_max; ++n) {
    s += P.satellite_mass[n];
    out.push_back(s);
  }
  return out;
}

GmyVerifyReport verify_gmy(const MapFamily& f, const GmyPartition& P, int probes) {
  GmyVerifyReport rep;
  const auto& c = P.c;
  const double log_kappa = std::log(c.kappa);
  const long double dlo = c.lo();
  rep.min_R = P.elements.empty() ? 0 : P.elements.front().R;
  auto fail = [&](const PartitionElement& e, const std::string& what) {
    ++rep.failures;
    rep.ok = false;
    if (rep.first_failure.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << what << " on element (" << static_cast<double>(e.a) << ", " << static_cast<double>(e.b) << ") R=" << e.R;
      rep.first_failure = os.str();
    }
  };
  for (const auto& e : P.elements) {
    ++rep.elements;
    rep.min_R = std::min<double>(rep.min_R, e.R);
    bool weak = false;
    if (e.R < c.R0) {
      fail(e, "return time below R0");
      continue;
    }
    // endpoint images: left end onto the left end of the inducing interval, length 2 delta0
    auto [ia, ib] = push_interval(f, P.params, 0, e.R, e.a, e.b);
    long double off = ia - dlo;
    off -= fast_round(off);
    double err = static_cast<double>(std::max(std::fabs(off), std::fabs((ib - ia) - 2.0L * c.delta0)));
    rep.max_endpoint_error = std::max(rep.max_endpoint_error, err);
    if (err > 1e-9) fail(e, "endpoint image misses the inducing interval");

    std::vector<long double> img(probes);
    std::vector<double> lsum(probes);
    for (int i = 0; i < probes; ++i) {
      long double x = e.a + (e.b - e.a) * (i + 0.5L) / probes;
      // image tracked relative to the left end so it stays a lift inside the inducing interval
      auto [ja, jb] = push_interval(f, P.params, 0, e.R, e.a, x);
      (void)ja;
      img[i] = jb - ia;
      double s = 0.0;
      long double y = wrap01(x);
      for (int k = 0; k < e.R; ++k) {
        s += std::log(std::fabs(static_cast<double>(f.deriv<long double>(P.params[k], y))));
        y = wrap01(f.lift<long double>(P.params[k], y));
      }
      lsum[i] = s;
      rep.min_log_expansion_margin = std::min(rep.min_log_expansion_margin, s + log_kappa);
      if (!(s + log_kappa > 0.0)) weak = true;
    }
    if (weak) fail(e, "|DF| <= 1/kappa");
    for (int i = 1; i < probes; ++i)
      if (!(img[i] > img[i - 1])) {
        fail(e, "image not monotone");
        break;
      }
    for (int i = 0; i < probes; ++i)
      for (int j = i + 1; j < probes; ++j) {
        double dist = static_cast<double>(std::fabs(img[j] - img[i]));
        double lr = std::fabs(lsum[i] - lsum[j]);
        if (dist > 0) rep.empirical_K = std::max(rep.empirical_K, lr / dist);
        // the affine case has lr == 0; allow rounding noise in the log sums
        double allowed = c.K * dist + 1e-12 * e.R;
        if (allowed > 0) rep.max_distortion_ratio = std::max(rep.max_distortion_ratio, lr / allowed);
        if (lr > allowed) fail(e, "distortion exceeds K dist");
      }
  }
  return rep;
}

}  // namespace rgl

namespace rgl {

std::vector<long double> covering_points(const GmyConstants& c, std::int64_t count, std::uint64_t seed) {
  std::vector<long double> out;
  for (std::int64_t i = 0; i < count; ++i)
    out.push_back(c.lo() + (c.hi() - c.lo()) * static_cast<long double>(uniform01(seed, stream::start, i)));
  return out;
}

CoveringReport covering_check(const MapFamily& f, const GmyPartition& P, int n_samples, std::uint64_t seed,
                              std::int64_t max_draws) {
  CoveringReport rep;
  const auto& c = P.c;
  const int horizon = P.n_max;
  if (max_draws <= 0) max_draws = 50LL * n_samples;
  for (std::int64_t i = 0; rep.samples < n_samples && i < max_draws; ++i) {
    long double x = c.lo() + (c.hi() - c.lo()) * static_cast<long double>(uniform01(seed, stream::start, i));
    long double x0 = x - std::floor(x);
    LiftedOrbit o = lifted_orbit(f, P.params, x0, horizon);
    auto flags = hyperbolic_flags(o.ld, c.lambda);
    std::vector<int> times;
    for (int n = c.R0; n <= horizon; ++n)
      if (flags[n]) times.push_back(n);
    if (times.empty()) continue;
    int n = times[static_cast<std::size_t>(uniform01(seed, stream::aux, i) * times.size())];
    ++rep.samples;
    const PartitionElement* e = P.locate(x);
    if (e && e->n <= n) {
      ++rep.in_elements;
    } else if (P.in_satellite(n, x)) {
      ++rep.in_satellites;
    } else {
      if (rep.misses++ == 0) {
        rep.first_miss_x = x;
        rep.first_miss_n = n;
      }
    }
  }
  return rep;
}

}  // namespace rgl
