#ifndef DISLOSIM_CONFIG_HPP
#define DISLOSIM_CONFIG_HPP

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/tensor.hpp"

namespace dislosim
{

/// Flat typed key-value configuration with [section] headers.
///
///   [geometry]
///   lengths = 32 32 8      # comment
///
/// Keys are addressed as "section.key". Every key must be read by the
/// consumer; check_all_used() rejects the leftovers.
class Config
{
public:
  struct Entry
  {
    std::string value;
    int line = 0;
  };

  static Config parse(std::istream& is, const std::string& source = "<config>")
  {
    Config c;
    c.source_ = source;
    std::string section;
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw))
    {
      ++lineno;
      std::string line = raw;
      const auto hash = line.find('#');
      if (hash != std::string::npos)
        line.erase(hash);
      line = trim(line);
      if (line.empty())
        continue;
      if (line.front() == '[')
      {
        if (line.back() != ']' || line.size() < 3)
          c.fail(lineno, "malformed section header '" + line + "'");
        section = trim(line.substr(1, line.size() - 2));
        if (section.find_first_of(" \t.=") != std::string::npos)
          c.fail(lineno, "invalid section name '" + section + "'");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        c.fail(lineno, "expected 'key = value'");
      if (section.empty())
        c.fail(lineno, "key outside of any [section]");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || key.find_first_of(" \t.") != std::string::npos)
        c.fail(lineno, "invalid key '" + key + "'");
      if (value.empty())
        c.fail(lineno, "empty value for '" + key + "'");
      const std::string full = section + "." + key;
      if (auto it = c.entries_.find(full); it != c.entries_.end())
        c.fail(lineno, "duplicate key '" + full + "' (first defined on line " + std::to_string(it->second.line) + ")");
      c.entries_[full] = {value, lineno};
    }
    return c;
  }

  static Config load(const std::string& path)
  {
    std::ifstream is(path);
    if (!is)
      throw ConfigError(path + ": cannot open config file");
    return parse(is, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  bool has_section(const std::string& section) const
  {
    const std::string prefix = section + ".";
    for (const auto& [k, e] : entries_)
      if (k.rfind(prefix, 0) == 0)
        return true;
    return false;
  }

  std::string get_string(const std::string& key) const { return entry(key).value; }

  std::string get_string(const std::string& key, const std::string& fallback) const
  {
    return has(key) ? get_string(key) : fallback;
  }

  double get_double(const std::string& key) const
  {
    const auto v = numbers(key, 1);
    return v[0];
  }

  double get_double(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }

  long get_int(const std::string& key) const
  {
    const Entry& e = entry(key);
    long v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || p != end)
      fail(e.line, "'" + key + "' must be an integer, got '" + e.value + "'");
    return v;
  }

  long get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

  bool get_bool(const std::string& key, bool fallback) const
  {
    if (!has(key))
      return fallback;
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes")
      return true;
    if (e.value == "false" || e.value == "0" || e.value == "no")
      return false;
    fail(e.line, "'" + key + "' must be true or false");
  }

  Vec3 get_vec3(const std::string& key) const
  {
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }

  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const { return has(key) ? get_vec3(key) : fallback; }

  std::array<int, 3> get_int3(const std::string& key) const
  {
    const auto v = numbers(key, 3);
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i)
    {
      if (v[i] != static_cast<int>(v[i]))
        fail(entry(key).line, "'" + key + "' must contain integers");
      r[i] = static_cast<int>(v[i]);
    }
    return r;
  }

  /// Whitespace separated list of exactly `count` numbers.
  std::vector<double> numbers(const std::string& key, std::size_t count) const
  {
    const Entry& e = entry(key);
    std::istringstream is(e.value);
    std::vector<double> v;
    std::string tok;
    while (is >> tok)
    {
      double x = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || p != tok.data() + tok.size())
        fail(e.line, "'" + key + "': '" + tok + "' is not a number");
      v.push_back(x);
    }
    if (v.size() != count)
      fail(e.line, "'" + key + "' expects " + std::to_string(count) + " number(s), got " + std::to_string(v.size()));
    return v;
  }

  int line_of(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  /// Throws ConfigError naming a key that no consumer read.
  void check_all_used() const
  {
    for (const auto& [k, e] : entries_)
      if (!used_.count(k))
        fail(e.line, "unknown key '" + k + "'");
  }

  [[noreturn]] void fail(int line, const std::string& msg) const
  {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  const std::string& source() const noexcept { return source_; }

private:
  static std::string trim(const std::string& s)
  {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  const Entry& entry(const std::string& key) const
  {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError(source_ + ": missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

} // namespace dislosim

#endif // DISLOSIM_CONFIG_HPP
