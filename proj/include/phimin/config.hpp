#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phimin/error.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

/// Key = value settings. Lines starting with '#' are comments; later
/// assignments win.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::InvalidParameter, "config line " + std::to_string(no) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw Error(ErrorKind::InvalidParameter, "config line " + std::to_string(no) + ": empty key");
      c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidParameter, "cannot read config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double num(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }

  int integer(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      const int v = std::stoi(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParameter, "config key " + key + ": not an integer: " + it->second);
    }
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
  }

  /// Positive number, defaulting when absent.
  double positive(const std::string& key, double fallback) const {
    const double v = num(key, fallback);
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidParameter, "config key " + key + " must be positive");
    return v;
  }

  /// "NxM" grid size, each at least 3.
  std::pair<int, int> grid(const std::string& key, std::pair<int, int> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int a = 0, b = 0;
    char x = 0, extra = 0;
    if (std::sscanf(it->second.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || (x != 'x' && x != 'X'))
      throw Error(ErrorKind::InvalidParameter, "config key " + key + ": expected NxM, got " + it->second);
    if (a < 3 || b < 3) throw Error(ErrorKind::InvalidParameter, "grids need at least 3 nodes per axis");
    return {a, b};
  }

  /// Sorted key=value lines; the input of the hash.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
  }

  /// FNV-1a 64 of the canonical form, as 16 hex digits.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// The profile given by profile.kind, profile.params and profile.domain.
  WeightProfile profile(const std::string& default_kind = "linear", const std::string& default_params = "1") const {
    const std::string name = str("profile.kind", default_kind);
    const auto kind = profile_kind_from_string(name);
    if (!kind || *kind == ProfileKind::Custom || *kind == ProfileKind::Dual)
      throw Error(ErrorKind::InvalidParameter, "unsupported profile.kind: " + name);
    RunConfig tmp;
    tmp.set("p", str("profile.params", default_params));
    const std::vector<double> params = tmp.list("p");
    std::optional<Interval> dom;
    if (has("profile.domain")) {
      const auto d = list("profile.domain");
      if (d.size() != 2) throw Error(ErrorKind::InvalidParameter, "profile.domain needs two values lo,hi");
      dom = Interval{d[0], d[1]};
    }
    return make_builtin(*kind, std::span<const double>(params), dom);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
      throw Error(ErrorKind::InvalidParameter, "config key " + key + ": not a number: " + text);
    return v;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace phimin
