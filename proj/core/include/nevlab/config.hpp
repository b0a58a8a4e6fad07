#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nevlab::config {

// Flat key=value configuration with dotted keys ("grid.r_min = 2").
// '#' starts a comment, blank lines are skipped. Serialization emits sorted
// "key = value" lines, so parse(serialize()) is the identity and the hash is
// stable across runs.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // "[1,2,3]" (or bare "1,2,3")
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;
  std::string require_string(const std::string& key) const;

  std::string serialize() const;
  std::uint64_t hash() const;  // FNV-1a over the serialized form
  std::string hash_hex() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Radius grid shared by the subcommands: grid.r_min, grid.r_max, grid.count,
// grid.spacing in {linear, log}.
std::vector<double> radius_grid(const Config& cfg, double def_min, double def_max, int def_count,
                                const std::string& def_spacing = "log");

}  // namespace nevlab::config
