#include "rgl/map_family.hpp"

#include <algorithm>
#include <sstream>

#include "rgl/rng.hpp"

namespace rgl {

FamilyKind parse_family_kind(const std::string& s) {
  if (s == "doubling-additive") return FamilyKind::DoublingAdditive;
  if (s == "expanding-nonlinear") return FamilyKind::ExpandingNonlinear;
  if (s == "quadratic") return FamilyKind::Quadratic;
  if (s == "custom-piecewise") return FamilyKind::CustomPiecewise;
  throw std::invalid_argument("unknown family kind '" + s + "'");
}

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::DoublingAdditive: return "doubling-additive";
    case FamilyKind::ExpandingNonlinear: return "expanding-nonlinear";
    case FamilyKind::Quadratic: return "quadratic";
    case FamilyKind::CustomPiecewise: return "custom-piecewise";
  }
  return "?";
}

NoiseShape parse_noise_shape(const std::string& s) {
  if (s == "uniform") return NoiseShape::Uniform;
  if (s == "dirac") return NoiseShape::Dirac;
  throw std::invalid_argument("unknown noise shape '" + s + "'");
}

std::string to_string(NoiseShape s) { return s == NoiseShape::Uniform ? "uniform" : "dirac"; }

MapFamily MapFamily::doubling(double t_star, int d) {
  MapFamily f;
  f.kind = FamilyKind::DoublingAdditive;
  f.t_star = t_star;
  f.d = d;
  return f;
}

MapFamily MapFamily::nonlinear(int d, double alpha, double t_star) {
  if (d < 2) throw std::invalid_argument("expanding-nonlinear needs degree >= 2");
  if (std::fabs(alpha) >= (d - 1) / (2.0 * M_PI))
    throw std::invalid_argument("expanding-nonlinear needs |alpha| < (d-1)/(2 pi)");
  MapFamily f;
  f.kind = FamilyKind::ExpandingNonlinear;
  f.d = d;
  f.alpha = alpha;
  f.t_star = t_star;
  return f;
}

MapFamily MapFamily::quadratic(double t_star) {
  MapFamily f;
  f.kind = FamilyKind::Quadratic;
  f.t_star = t_star;
  f.d = 2;
  return f;
}

MapFamily MapFamily::custom(std::vector<double> interior, double t_star) {
  MapFamily f;
  f.kind = FamilyKind::CustomPiecewise;
  f.t_star = t_star;
  f.breaks.push_back(0.0);
  for (double b : interior) {
    if (!(b > f.breaks.back() && b < 1.0))
      throw std::invalid_argument("custom-piecewise breaks must increase strictly inside (0,1)");
    f.breaks.push_back(b);
  }
  f.breaks.push_back(1.0);
  f.d = static_cast<int>(f.breaks.size()) - 1;
  if (f.d < 2) throw std::invalid_argument("custom-piecewise needs at least one interior break");
  return f;
}

int MapFamily::degree() const {
  return kind == FamilyKind::CustomPiecewise ? static_cast<int>(breaks.size()) - 1 : d;
}

bool MapFamily::in_domain(double x) const {
  if (is_circle()) return x >= 0.0 && x < 1.0;
  return x >= -1.0 && x <= 1.0;
}

static void domain_check(const MapFamily& f, double x) {
  if (!f.in_domain(x)) {
    std::ostringstream os;
    os << "point " << x << " outside phase space of " << to_string(f.kind);
    throw DomainError(os.str());
  }
}

double MapFamily::eval(double t, double x) const {
  domain_check(*this, x);
  if (is_circle()) return wrap01(lift<double>(t, x));
  double y = lift<double>(t, x);
  if (y < -1.0 || y > 1.0) throw DomainError("orbit escaped [-1,1] (quadratic parameter above 2?)");
  return y;
}

double MapFamily::derivative(double t, double x) const {
  domain_check(*this, x);
  return deriv<double>(t, x);
}

double MapFamily::log_deriv_slope(double t, double x) const {
  switch (kind) {
    case FamilyKind::ExpandingNonlinear: {
      const double w = 2.0 * M_PI;
      return -w * w * alpha * std::sin(w * x) / deriv<double>(t, x);
    }
    case FamilyKind::Quadratic:
      return 1.0 / x;
    default:
      return 0.0;
  }
}

void MapFamily::require_circle(const char* what) const {
  if (!is_circle())
    throw UnsupportedError(std::string(what) + ": needs a full-branch circle family, got quadratic");
}

std::vector<double> MapFamily::preimages1(double t, double y) const {
  require_circle("preimages");
  const int dd = degree();
  double f0 = lift<double>(t, 0.0);
  // The lift maps [0,1) onto [f0, f0 + dd); the values congruent to y in that window
  // are y + k for dd consecutive integers k.
  double k0 = std::ceil(f0 - y);
  std::vector<double> out;
  out.reserve(dd);
  for (int i = 0; i < dd; ++i) {
    double v = y + k0 + i;
    out.push_back(wrap01(inverse_lift<double>(t, v)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> MapFamily::preimages_word(const std::vector<double>& word, double y) const {
  require_circle("preimages");
  std::vector<double> cur{y};
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    std::vector<double> next;
    next.reserve(cur.size() * degree());
    for (double c : cur) {
      auto p = preimages1(*it, c);
      next.insert(next.end(), p.begin(), p.end());
    }
    cur.swap(next);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

std::vector<double> MapFamily::preimages(double t, double y, int depth) const {
  require_circle("preimages");
  if (depth < 0) throw std::invalid_argument("preimages: negative depth");
  return preimages_word(std::vector<double>(depth, t), y);
}

double NoiseKernel::sample(std::uint64_t seed, std::uint64_t stream, std::int64_t index) const {
  if (is_dirac()) return center;
  return from_uniform(uniform01(seed, stream, index));
}

std::vector<double> NoiseKernel::nodes(int k) const {
  if (is_dirac() || k <= 1) return {center};
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = center - epsilon + (2.0 * i + 1.0) * epsilon / k;
  return out;
}

DerivativeBounds derivative_bounds(const MapFamily& f, const NoiseKernel& k, int n_x, int n_t) {
  DerivativeBounds b;
  b.inf_abs = std::numeric_limits<double>::infinity();
  std::vector<double> ts;
  if (k.is_dirac()) ts = {k.center};
  else
    for (int i = 0; i < n_t; ++i) ts.push_back(k.support_lo() + (k.support_hi() - k.support_lo()) * i / (n_t - 1));
  for (double t : ts) {
    for (int i = 0; i < n_x; ++i) {
      double x = f.lo() + (f.hi() - f.lo()) * (i + 0.5) / n_x;
      double a = std::fabs(f.deriv<double>(t, x));
      b.inf_abs = std::min(b.inf_abs, a);
      b.sup_abs = std::max(b.sup_abs, a);
      if (f.is_circle()) b.sup_log_slope = std::max(b.sup_log_slope, std::fabs(f.log_deriv_slope(t, x)));
    }
    // derivative does not depend on t for the circle kinds
    if (f.is_circle()) break;
  }
  return b;
}

void check_family(const MapFamily& f, const NoiseKernel& k) {
  if (f.kind == FamilyKind::Quadratic) {
    if (k.support_lo() < 0.0 || k.support_hi() > 2.0)
      throw DomainError("quadratic parameter support must lie in [0, 2]");
    return;
  }
  auto b = derivative_bounds(f, k);
  if (!(b.inf_abs > 1.0)) {
    std::ostringstream os;
    os << "expansion certificate failed: min |f'| = " << b.inf_abs;
    throw DomainError(os.str());
  }
}

}  // namespace rgl
