#include "nevlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nevlab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("config key " + key + ": not a number: " + it->second);
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::size_t pos = 0;
  const long long v = std::stoll(it->second, &pos, 10);
  if (pos != it->second.size())
    throw std::invalid_argument("config key " + key + ": not an integer: " + it->second);
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key " + key + ": not a boolean: " + v);
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::string v = trim(it->second);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']')
      throw std::invalid_argument("config key " + key + ": unbalanced brackets");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size())
      throw std::invalid_argument("config key " + key + ": bad list entry: " + item);
  }
  return out;
}

std::string Config::require_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw std::invalid_argument("config key " + key + " is required");
  return it->second;
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
  return out.str();
}

std::uint64_t Config::hash() const {
  const std::string s = serialize();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
  return std::string(buf);
}

std::vector<double> radius_grid(const Config& cfg, double def_min, double def_max, int def_count,
                                const std::string& def_spacing) {
  const double r_min = cfg.get_double("grid.r_min", def_min);
  const double r_max = cfg.get_double("grid.r_max", def_max);
  const int count = static_cast<int>(cfg.get_int("grid.count", def_count));
  const std::string spacing = cfg.get_string("grid.spacing", def_spacing);
  if (!(r_min > 0.0) || !(r_max > r_min)) throw std::invalid_argument("bad radius grid bounds");
  if (count < 2) throw std::invalid_argument("radius grid needs at least two points");
  std::vector<double> out(count);
  if (spacing == "linear") {
    for (int i = 0; i < count; ++i)
      out[i] = r_min + (r_max - r_min) * i / (count - 1);
  } else if (spacing == "log") {
    const double lmin = std::log(r_min), lmax = std::log(r_max);
    for (int i = 0; i < count; ++i)
      out[i] = std::exp(lmin + (lmax - lmin) * i / (count - 1));
  } else {
    throw std::invalid_argument("grid.spacing must be linear or log");
  }
  out.back() = r_max;
  return out;
}

}  // namespace nevlab::config
