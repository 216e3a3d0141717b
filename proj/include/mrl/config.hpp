#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrl/dataset.hpp"

namespace mrl {

// Bad configuration or unreadable input: the command exits with code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A checked mathematical invariant failed: the command exits with code 3.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration. Files hold one pair per line ('#' comments,
// blank lines allowed); command-line flags mirror the keys as --key value or
// --key=value, later sources overriding earlier ones.
struct Config {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key,
                      const std::string& fallback) const;
  std::string require_str(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Norm get_norm(const std::string& key, Norm fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::string& fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::string& fallback) const;
  std::vector<std::string> get_str_list(const std::string& key,
                                        const std::string& fallback) const;
};

Config load_config_file(const std::string& path);

// --key value / --key=value pairs, applied onto cfg. "--config path" is
// handled by the caller, not here.
void apply_overrides(Config& cfg, const std::vector<std::string>& args);

// Rejects any configured key outside `allowed`.
void reject_unknown_keys(const Config& cfg,
                         const std::set<std::string>& allowed);

std::string norm_name(Norm p);

}  // namespace mrl
