#include "mrl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mrl {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& s) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0')
    throw ConfigError(key + ": bad number '" + s + "'");
  return v;
}

long long to_ll(const std::string& key, const std::string& s) {
  const char* c = s.c_str();
  char* end = nullptr;
  long long v = std::strtoll(c, &end, 10);
  if (end == c || *end != '\0')
    throw ConfigError(key + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

}  // namespace

bool Config::has(const std::string& key) const {
  return values.count(key) != 0;
}

std::string Config::get_str(const std::string& key,
                            const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::string Config::require_str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : to_double(key, it->second);
}

double Config::require_double(const std::string& key) const {
  return to_double(key, require_str(key));
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  long long v = to_ll(key, it->second);
  if (v < INT32_MIN || v > INT32_MAX)
    throw ConfigError(key + ": integer out of range");
  return static_cast<int>(v);
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const char* c = it->second.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(c, &end, 10);
  if (end == c || *end != '\0' || it->second[0] == '-')
    throw ConfigError(key + ": bad unsigned integer '" + it->second + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& s = it->second;
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

Norm Config::get_norm(const std::string& key, Norm fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "2") return Norm::L2;
  if (it->second == "inf") return Norm::Linf;
  throw ConfigError(key + ": expected 2 or inf, got '" + it->second + "'");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::string& fallback) const {
  std::vector<double> out;
  for (const auto& cell : split_list(get_str(key, fallback)))
    out.push_back(to_double(key, cell));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::string& fallback) const {
  std::vector<int> out;
  for (const auto& cell : split_list(get_str(key, fallback)))
    out.push_back(static_cast<int>(to_ll(key, cell)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::string> Config::get_str_list(
    const std::string& key, const std::string& fallback) const {
  auto out = split_list(get_str(key, fallback));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

Config load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (!cfg.values.emplace(key, val).second)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
  }
  return cfg;
}

void apply_overrides(Config& cfg, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0)
      throw ConfigError("expected --key, got '" + a + "'");
    std::string key = a.substr(2);
    std::string val;
    auto eq = key.find('=');
    if (eq != std::string::npos) {
      val = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size())
        throw ConfigError("flag '" + a + "' is missing a value");
      val = args[++i];
    }
    if (key.empty()) throw ConfigError("empty flag name");
    cfg.values[key] = val;
  }
}

void reject_unknown_keys(const Config& cfg,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : cfg.values)
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "'");
}

std::string norm_name(Norm p) { return p == Norm::L2 ? "2" : "inf"; }

}  // namespace mrl
