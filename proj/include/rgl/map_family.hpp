#pragma once
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgl {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sin(2 pi x) and cos(2 pi x): fold the argument into [-pi/4, pi/4] and sum the Taylor
// series there (terms to degree 22 are below long double epsilon). glibc's sinl/cosl
// dominated the partition sweep.
template <class R>
inline void sincos_2pi(R x, R& s, R& c) {
  R r = x - std::floor(x + R(0.5));
  R q = std::floor(R(4) * r + R(0.5));
  const R two_pi = R(6.283185307179586476925286766559005768L);
  R th = (r - q / R(4)) * two_pi;
  R t2 = th * th;
  R ps = R(1), pc = R(1);
  for (int k = 22; k >= 2; k -= 2) {
    ps = R(1) - t2 / R((k) * (k + 1)) * ps;
    pc = R(1) - t2 / R((k - 1) * (k)) * pc;
  }
  R sn = th * ps, cs = pc;
  switch (static_cast<int>(q)) {
    case 1: s = cs, c = -sn; break;
    case 2: case -2: s = -sn, c = -cs; break;
    case -1: s = -cs, c = sn; break;
    default: s = sn, c = cs; break;
  }
}

enum class FamilyKind { DoublingAdditive, ExpandingNonlinear, Quadratic, CustomPiecewise };

FamilyKind parse_family_kind(const std::string& s);
std::string to_string(FamilyKind k);

// Circle kinds act on [0,1) through an increasing lift F_t with F_t(x+1) = F_t(x) + d.
//   doubling-additive:   F_t(x) = d x + t
//   expanding-nonlinear: F_t(x) = d x + t + alpha sin(2 pi x)
//   custom-piecewise:    affine full branches on the cells cut by `breaks`, F_t = k + (x-b_k)/(b_{k+1}-b_k) + t
// The quadratic kind is f_t(x) = 1 - t x^2 on [-1, 1].
class MapFamily {
 public:
  FamilyKind kind = FamilyKind::DoublingAdditive;
  double t_star = 0.0;
  int d = 2;
  double alpha = 0.0;
  std::vector<double> breaks;  // custom-piecewise cell boundaries, 0 = b_0 < ... < b_d = 1

  static MapFamily doubling(double t_star = 0.0, int d = 2);
  static MapFamily nonlinear(int d, double alpha, double t_star = 0.0);
  static MapFamily quadratic(double t_star);
  static MapFamily custom(std::vector<double> interior_breaks, double t_star = 0.0);

  bool is_circle() const { return kind != FamilyKind::Quadratic; }
  int degree() const;
  double lo() const { return is_circle() ? 0.0 : -1.0; }
  double hi() const { return 1.0; }
  bool in_domain(double x) const;

  double eval(double t, double x) const;        // f_t(x), reduced mod 1 for circle kinds
  double derivative(double t, double x) const;  // signed f_t'(x)

  // Unchecked kernels, templated so the partition code can run in long double.
  template <class R>
  R lift(double t, R x) const;
  template <class R>
  R deriv(double t, R x) const;
  template <class R>
  R inverse_lift(double t, R v) const;  // unique u with lift(t,u) = v (circle kinds)
  // Same root, Newton started at `hint` (a nearby preimage, e.g. the orbit point being pulled back).
  template <class R>
  R inverse_lift_near(double t, R v, R hint) const;
  // Lift and derivative together (one trig evaluation for the nonlinear kind).
  template <class R>
  void lift_deriv(double t, R x, R& F, R& dF) const;
  // Root of lift(t,u) = v given a nearby x with known lift Fx and slope dFx.
  template <class R>
  R inverse_lift_from(double t, R v, R x, R Fx, R dFx) const;

  // Second derivative over first, used for distortion constants.
  double log_deriv_slope(double t, double x) const;

  std::vector<double> preimages(double t, double y, int depth) const;
  // Preimages of y under f_{w[k-1]} o ... o f_{w[0]}.
  std::vector<double> preimages_word(const std::vector<double>& word, double y) const;
  // Preimages of y under a single f_t, in increasing order.
  std::vector<double> preimages1(double t, double y) const;

 private:
  void require_circle(const char* what) const;
};

// floor through an integer cast; the libm long double versions dominate the partition sweep
template <class R>
inline R fast_floor(R x) {
  R r = static_cast<R>(static_cast<long long>(x));
  return r > x ? r - R(1) : r;
}

template <class R>
inline R fast_round(R x) {
  return fast_floor(x + R(0.5));
}

template <class R>
R wrap01(R x) {
  R r = x - fast_floor(x);
  if (r >= R(1)) r = R(0);
  return r;
}

enum class NoiseShape { Uniform, Dirac };

struct NoiseKernel {
  NoiseShape shape = NoiseShape::Dirac;
  double center = 0.0;
  double epsilon = 0.0;

  static NoiseKernel dirac(double c) { return {NoiseShape::Dirac, c, 0.0}; }
  static NoiseKernel uniform(double c, double eps) { return {NoiseShape::Uniform, c, eps}; }

  bool is_dirac() const { return shape == NoiseShape::Dirac || epsilon == 0.0; }
  double support_lo() const { return is_dirac() ? center : center - epsilon; }
  double support_hi() const { return is_dirac() ? center : center + epsilon; }
  // Map a uniform [0,1) variate to a draw from the kernel.
  double from_uniform(double u) const { return is_dirac() ? center : center - epsilon + 2.0 * epsilon * u; }
  double sample(std::uint64_t seed, std::uint64_t stream, std::int64_t index) const;
  // Midpoint quadrature nodes (equal weights); a single node for dirac.
  std::vector<double> nodes(int k) const;
};

NoiseShape parse_noise_shape(const std::string& s);
std::string to_string(NoiseShape s);

struct DerivativeBounds {
  double inf_abs = 0.0;
  double sup_abs = 0.0;
  double sup_log_slope = 0.0;  // sup |f''/f'|
};

// Grid bounds over the kernel support (n_t parameter samples, n_x points).
DerivativeBounds derivative_bounds(const MapFamily& f, const NoiseKernel& k, int n_x = 10000, int n_t = 100);

// Throws DomainError when an expanding kind fails inf|f'| > 1 on the grid, or when
// the quadratic parameter leaves [0, 2].
void check_family(const MapFamily& f, const NoiseKernel& k);

// ---- template definitions ----

template <class R>
R MapFamily::lift(double t, R x) const {
  switch (kind) {
    case FamilyKind::DoublingAdditive:
      return R(d) * x + R(t);
    case FamilyKind::ExpandingNonlinear: {
      R sn, cs;
      sincos_2pi(x, sn, cs);
      return R(d) * x + R(t) + R(alpha) * sn;
    }
    case FamilyKind::CustomPiecewise: {
      R n = std::floor(x);
      R r = x - n;
      int k = 0;
      const int dd = static_cast<int>(breaks.size()) - 1;
      while (k + 1 < dd && r >= R(breaks[k + 1])) ++k;
      R bl = R(breaks[k]), br = R(breaks[k + 1]);
      return R(dd) * n + R(k) + (r - bl) / (br - bl) + R(t);
    }
    case FamilyKind::Quadratic:
      return R(1) - R(t) * x * x;
  }
  return x;
}

template <class R>
R MapFamily::deriv(double t, R x) const {
  switch (kind) {
    case FamilyKind::DoublingAdditive:
      return R(d);
    case FamilyKind::ExpandingNonlinear: {
      const R two_pi = R(2) * std::acos(R(-1));
      R sn, cs;
      sincos_2pi(x, sn, cs);
      return R(d) + two_pi * R(alpha) * cs;
    }
    case FamilyKind::CustomPiecewise: {
      R r = x - std::floor(x);
      int k = 0;
      const int dd = static_cast<int>(breaks.size()) - 1;
      while (k + 1 < dd && r >= R(breaks[k + 1])) ++k;
      return R(1) / (R(breaks[k + 1]) - R(breaks[k]));
    }
    case FamilyKind::Quadratic:
      return R(-2) * R(t) * x;
  }
  return R(0);
}

template <class R>
R MapFamily::inverse_lift(double t, R v) const {
  switch (kind) {
    case FamilyKind::DoublingAdditive:
      return (v - R(t)) / R(d);
    case FamilyKind::CustomPiecewise: {
      const int dd = static_cast<int>(breaks.size()) - 1;
      R w = v - R(t);
      R n = std::floor(w / R(dd));
      R r = w - n * R(dd);
      int k = static_cast<int>(std::floor(r));
      if (k < 0) k = 0;
      if (k > dd - 1) k = dd - 1;
      return n + R(breaks[k]) + (r - R(k)) * (R(breaks[k + 1]) - R(breaks[k]));
    }
    case FamilyKind::ExpandingNonlinear: {
      const R a = std::fabs(R(alpha));
      R lo = (v - R(t) - a) / R(d), hi = (v - R(t) + a) / R(d);
      R u = (v - R(t)) / R(d);
      for (int it = 0; it < 100; ++it) {
        R g = lift<R>(t, u) - v;
        if (g == R(0)) return u;
        if (g > 0) hi = u; else lo = u;
        R step = g / deriv<R>(t, u);
        R nu = u - step;
        if (!(nu > lo && nu < hi)) nu = (lo + hi) / R(2);
        if (nu == u || hi - lo <= std::fabs(u) * R(4) * std::numeric_limits<R>::epsilon()) return nu;
        u = nu;
      }
      return u;
    }
    case FamilyKind::Quadratic:
      break;
  }
  throw UnsupportedError("inverse_lift: quadratic family has no global inverse branch");
}

template <class R>
R MapFamily::inverse_lift_near(double t, R v, R hint) const {
  if (kind != FamilyKind::ExpandingNonlinear) return inverse_lift<R>(t, v);
  const R a = std::fabs(R(alpha));
  R lo = (v - R(t) - a) / R(d), hi = (v - R(t) + a) / R(d);
  R u = (hint > lo && hint < hi) ? hint : (v - R(t)) / R(d);
  const R two_pi = R(6.283185307179586476925286766559005768L);
  for (int it = 0; it < 100; ++it) {
    R sn, cs;
    sincos_2pi(u, sn, cs);
    R g = R(d) * u + R(t) + R(alpha) * sn - v;
    if (g == R(0)) return u;
    if (g > 0) hi = u; else lo = u;
    R nu = u - g / (R(d) + two_pi * R(alpha) * cs);
    if (!(nu > lo && nu < hi)) nu = (lo + hi) / R(2);
    // one Newton step from |g| < 1e-10 leaves an error near 1e-20
    else if (std::fabs(g) < R(1e-10)) return nu;
    if (nu == u || std::fabs(nu - u) <= std::fabs(u) * R(4) * std::numeric_limits<R>::epsilon()) return nu;
    u = nu;
  }
  return u;
}

template <class R>
void MapFamily::lift_deriv(double t, R x, R& F, R& dF) const {
  if (kind != FamilyKind::ExpandingNonlinear) {
    F = lift<R>(t, x);
    dF = deriv<R>(t, x);
    return;
  }
  const R two_pi = R(6.283185307179586476925286766559005768L);
  R sn, cs;
  sincos_2pi(x, sn, cs);
  F = R(d) * x + R(t) + R(alpha) * sn;
  dF = R(d) + two_pi * R(alpha) * cs;
}

template <class R>
R MapFamily::inverse_lift_from(double t, R v, R x, R Fx, R dFx) const {
  if (kind != FamilyKind::ExpandingNonlinear) return inverse_lift<R>(t, v);
  return inverse_lift_near<R>(t, v, x + (v - Fx) / dFx);
}

}  // namespace rgl
