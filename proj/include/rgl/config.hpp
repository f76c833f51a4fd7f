#pragma once
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgl/gmy.hpp"
#include "rgl/map_family.hpp"
#include "rgl/tower.hpp"

namespace rgl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value store with dotted keys. A "[tower]" header prefixes the keys below it
// with "tower.". Only keys present in the defaults are accepted.
class Config {
 public:
  static Config defaults();

  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  // "key=value", as passed to --set
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  std::vector<double> nums(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;

  // Canonical text, one "key = value" per line grouped by section; hashing and the
  // resolved-config copy both use it.
  std::string resolved() const;
  std::uint64_t hash() const;

  MapFamily family() const;
  NoiseKernel kernel() const;
  GmyOptions gmy_options() const;
  TowerOptions tower_options() const;

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& s);

}  // namespace rgl
