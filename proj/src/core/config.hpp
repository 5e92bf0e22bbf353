#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wg {

// Strict `key = value` configuration with `[section]` headers: a section
// header prefixes the following keys as "section.key". Values keep interior
// whitespace (surrounding whitespace trimmed); `#` starts a comment.
// Duplicate keys and malformed lines are errors; typed access raises
// TypeMismatch, absent required keys raise MissingRequired, and commands
// reject keys outside their schema with UnknownKey.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  // Emits `key = value` lines grouped into sections; parse(serialize())
  // compares equal.
  std::string serialize() const;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Whitespace-separated list of doubles.
  std::vector<double> get_doubles(const std::string& key) const;

  // UnknownKey unless every stored key matches an allowed name ("grid.nu")
  // or an allowed prefix given as "grid.*".
  void require_known(std::span<const std::string_view> allowed) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  bool operator==(const Config& o) const;

 private:
  const std::string* find(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> entries_;  // in file order
};

}  // namespace wg
