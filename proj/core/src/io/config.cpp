#include "gatenav/io/config.hpp"

#include <algorithm>
#include <fstream>

#include "gatenav/common/error.hpp"

namespace gatenav {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config " + path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config " + path.string() + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::lookup(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  const std::string value = it == values_.end() ? fallback : it->second;
  resolved_[key] = value;
  return value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return lookup(key, fallback);
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
  const std::string v = lookup(key, std::to_string(fallback));
  try {
    size_t used = 0;
    const int64_t parsed = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", fallback);
  const std::string v = lookup(key, buf);
  try {
    size_t used = 0;
    const double parsed = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  std::string v = lookup(key, fallback ? "true" : "false");
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

void KeyValueConfig::write_resolved(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  os << "# resolved configuration (all keys read by this run)\n";
  for (const auto& [k, v] : resolved_) os << k << " = " << v << "\n";
}

}  // namespace gatenav
