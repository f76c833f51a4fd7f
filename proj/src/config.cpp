#include "rgl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rgl {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "auto" || v == "nan") return NAN;
  char* end = nullptr;
  errno = 0;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key + ": '" + v + "' is not a number");
  return x;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::defaults() {
  Config c;
  c.values_ = {
      {"run.seed", "1"},
      {"run.workers", "1"},
      {"run.output_dir", "out"},

      {"family.kind", "doubling-additive"},
      {"family.d", "2"},
      {"family.alpha", "0.1"},
      {"family.t_star", "0"},
      {"family.breaks", ""},
      {"noise.shape", "uniform"},
      {"noise.epsilon", "0.1"},

      {"orbit.n", "1000"},
      {"orbit.seed", "1"},
      {"orbit.x0", "0.123456789"},
      {"orbit.N", "1"},

      {"lyap.N_list", "1,2,3,4,8"},
      {"lyap.n_steps", "120000"},
      {"lyap.n_orbits", "16"},

      {"hyp.lambda", "0.75"},
      {"hyp.a0", "0.5"},
      {"hyp.delta1", "0.45"},
      {"hyp.n_orbits", "1000"},
      {"hyp.n_steps", "1000"},

      {"gmy.delta1", "0.45"},
      {"gmy.delta0", "auto"},
      {"gmy.p", "auto"},
      {"gmy.lambda", "0.55"},
      {"gmy.kappa", "0.9"},
      {"gmy.n_max", "60"},
      {"gmy.grid_pow", "10"},
      {"gmy.min_element", "3e-7"},
      {"gmy.realizations", "3"},
      {"gmy.probes", "10"},
      {"gmy.covering_realizations", "20"},
      {"gmy.covering_samples", "1000"},

      {"tower.depth", "40"},
      {"tower.bins", "256"},
      {"tower.n_realizations", "16"},
      {"tower.n_max", "30"},
      {"tower.min_element", "1e-5"},
      {"tower.orbit_min_element", "3e-8"},
      {"tower.truncation", "0"},
      {"tower.max_piece", "0.0078125"},
      {"tower.lambda", "0.75"},
      {"tower.n_orbits", "1000"},
      {"tower.horizon", "1000"},

      {"ulam.bins", "1024"},
      {"ulam.kernel_samples", "32"},
      {"birkhoff.seeds", "8"},
      {"birkhoff.n_steps", "200000"},
      {"compare.bins", "64"},

      {"comp.N_list", "1,2,4"},
      {"comp.starts", "16"},
      {"comp.n_steps", "20000"},
      {"comp.bins", "64"},

      {"stab.eps_list", "0.1,0.05,0.02,0.01"},
      {"stab.bins", "512"},
      {"stab.kernel_samples", "16"},

      {"quad.a_list", "0.5,1.76,2.0"},
      {"quad.n_steps", "200000"},
      {"quad.seeds", "4"},
  };
  return c;
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    set(key, trim(line.substr(eq + 1)));
  }
}

void Config::set_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double Config::num(const std::string& key) const { return parse_double(key, str(key)); }

std::int64_t Config::integer(const std::string& key) const {
  const auto& v = str(key);
  char* end = nullptr;
  errno = 0;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key + ": '" + v + "' is not an integer");
  return x;
}

std::uint64_t Config::u64(const std::string& key) const {
  const auto& v = str(key);
  char* end = nullptr;
  errno = 0;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE)
    throw ConfigError(key + ": '" + v + "' is not an unsigned integer");
  return x;
}

std::vector<double> Config::nums(const std::string& key) const {
  std::vector<double> out;
  for (auto& s : split_list(str(key))) out.push_back(parse_double(key, s));
  return out;
}

std::vector<int> Config::ints(const std::string& key) const {
  std::vector<int> out;
  for (double x : nums(key)) {
    if (x != std::floor(x) || x < 1 || x > 1e6) throw ConfigError(key + ": entries must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::string Config::resolved() const {
  std::string out, section;
  for (auto& [k, v] : values_) {
    auto dot = k.find('.');
    std::string sec = k.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(resolved()); }

MapFamily Config::family() const {
  FamilyKind kind;
  try {
    kind = parse_family_kind(str("family.kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("family.kind: ") + e.what());
  }
  const double t = num("family.t_star");
  const int d = static_cast<int>(integer("family.d"));
  switch (kind) {
    case FamilyKind::DoublingAdditive: return MapFamily::doubling(t, d);
    case FamilyKind::ExpandingNonlinear: return MapFamily::nonlinear(d, num("family.alpha"), t);
    case FamilyKind::Quadratic: return MapFamily::quadratic(t);
    case FamilyKind::CustomPiecewise: return MapFamily::custom(nums("family.breaks"), t);
  }
  throw ConfigError("family.kind: unhandled kind");
}

NoiseKernel Config::kernel() const {
  NoiseShape shape;
  try {
    shape = parse_noise_shape(str("noise.shape"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise.shape: ") + e.what());
  }
  const double t = num("family.t_star");
  if (shape == NoiseShape::Dirac) return NoiseKernel::dirac(t);
  const double eps = num("noise.epsilon");
  if (!(eps >= 0)) throw ConfigError("noise.epsilon must be >= 0");
  return NoiseKernel::uniform(t, eps);
}

GmyOptions Config::gmy_options() const {
  GmyOptions o;
  o.delta1 = num("gmy.delta1");
  double d0 = num("gmy.delta0");
  o.delta0 = std::isnan(d0) ? 0.0 : d0;
  o.p = num("gmy.p");
  o.lambda = num("gmy.lambda");
  o.kappa_target = num("gmy.kappa");
  o.grid_pow = static_cast<int>(integer("gmy.grid_pow"));
  o.min_element = num("gmy.min_element");
  if (!(o.delta1 > 0 && o.delta1 < 0.5)) throw ConfigError("gmy.delta1 must lie in (0, 0.5)");
  if (!(o.lambda > 0 && o.lambda < 1)) throw ConfigError("gmy.lambda must lie in (0, 1)");
  if (!(o.kappa_target > 0 && o.kappa_target < 1)) throw ConfigError("gmy.kappa must lie in (0, 1)");
  if (!(o.min_element > 0)) throw ConfigError("gmy.min_element must be positive");
  return o;
}

TowerOptions Config::tower_options() const {
  TowerOptions t;
  t.depth = static_cast<int>(integer("tower.depth"));
  t.bins = static_cast<int>(integer("tower.bins"));
  t.n_realizations = static_cast<int>(integer("tower.n_realizations"));
  t.n_max = static_cast<int>(integer("tower.n_max"));
  t.min_element = num("tower.min_element");
  t.orbit_min_element = num("tower.orbit_min_element");
  t.truncation = static_cast<int>(integer("tower.truncation"));
  t.max_piece = num("tower.max_piece");
  if (t.depth < 2 || t.bins < 1 || t.n_realizations < 1 || t.n_max < 1)
    throw ConfigError("tower.depth, tower.bins, tower.n_realizations and tower.n_max must be positive");
  if (!(t.min_element > 0 && t.orbit_min_element > 0 && t.max_piece > 0))
    throw ConfigError("tower floors must be positive");
  return t;
}

}  // namespace rgl
