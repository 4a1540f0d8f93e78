#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace gatenav {

// Flat, typed key=value experiment configuration. '#' starts a comment.
// Every key that a run reads is recorded with its final value, so the
// resolved config written next to the outputs reproduces the run exactly.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Everything read so far, with the values actually used.
  void write_resolved(const std::filesystem::path& path) const;

 private:
  std::string lookup(const std::string& key, const std::string& fallback) const;

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace gatenav
