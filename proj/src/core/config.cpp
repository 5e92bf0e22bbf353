#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace wg {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  return true;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        raise(Status::InvalidArgument,
              "config line " + std::to_string(lineno) +
                  ": unterminated section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!valid_name(section))
        raise(Status::InvalidArgument,
              "config line " + std::to_string(lineno) +
                  ": bad section name '" + section + "'");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      raise(Status::InvalidArgument,
            "config line " + std::to_string(lineno) +
                ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!valid_name(key))
      raise(Status::InvalidArgument, "config line " + std::to_string(lineno) +
                                         ": bad key name '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    if (cfg.find(key))
      raise(Status::InvalidArgument,
            "config line " + std::to_string(lineno) + ": duplicate key '" +
                key + "'");
    cfg.entries_.emplace_back(std::move(key), value);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Status::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::serialize() const {
  // Section-less keys first, then each section in first-appearance order.
  std::ostringstream out;
  std::vector<std::string> sections;
  for (const auto& [key, value] : entries_) {
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos) {
      out << key << " = " << value << "\n";
    } else {
      const std::string sec = key.substr(0, dot);
      if (std::find(sections.begin(), sections.end(), sec) == sections.end())
        sections.push_back(sec);
    }
  }
  for (const std::string& sec : sections) {
    out << "\n[" << sec << "]\n";
    for (const auto& [key, value] : entries_)
      if (key.size() > sec.size() + 1 && key.compare(0, sec.size(), sec) == 0 &&
          key[sec.size()] == '.')
        out << key.substr(sec.size() + 1) << " = " << value << "\n";
  }
  return out.str();
}

const std::string* Config::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

std::string Config::get_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) raise(Status::MissingRequired, "missing required key '" + key + "'");
  return *v;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    raise(Status::TypeMismatch,
          "key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    raise(Status::TypeMismatch,
          "key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  raise(Status::TypeMismatch,
        "key '" + key + "': expected a boolean, got '" + v + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const std::string v = get_string(key);
  std::istringstream in(v);
  std::vector<double> xs;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      raise(Status::TypeMismatch,
            "key '" + key + "': expected numbers, got '" + v + "'");
    xs.push_back(x);
  }
  if (xs.empty())
    raise(Status::TypeMismatch, "key '" + key + "': expected numbers");
  return xs;
}

void Config::require_known(
    std::span<const std::string_view> allowed) const {
  for (const auto& [key, value] : entries_) {
    bool ok = false;
    for (std::string_view pat : allowed) {
      if (pat.size() >= 2 && pat.substr(pat.size() - 2) == ".*") {
        const std::string_view prefix = pat.substr(0, pat.size() - 1);
        if (key.size() > prefix.size() &&
            std::string_view(key).substr(0, prefix.size()) == prefix) {
          ok = true;
          break;
        }
      } else if (key == pat) {
        ok = true;
        break;
      }
    }
    if (!ok) raise(Status::UnknownKey, "unknown config key '" + key + "'");
  }
}

bool Config::operator==(const Config& o) const {
  auto a = entries_, b = o.entries_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace wg
