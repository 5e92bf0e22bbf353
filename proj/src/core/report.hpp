#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/config.hpp"

namespace wg {

// Insertion-ordered JSON tree. Numbers print with %.17g so convergence
// tables reproduce bit-identically across runs; non-finite values are
// emitted as quoted strings.
class Json {
 public:
  Json() = default;
  static Json object();
  static Json array();
  static Json number(double v);
  static Json integer(std::int64_t v);
  static Json boolean(bool v);
  static Json text(std::string v);

  Json& set(const std::string& key, Json v);  // object member (replaces)
  Json& push(Json v);                         // array element
  bool empty() const;                         // no members/elements

  std::string dump(int indent = 0) const;

 private:
  enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };
  void emit(std::string& out, int indent, int depth) const;

  Kind kind_ = Kind::Null;
  bool b_ = false;
  std::int64_t i_ = 0;
  double d_ = 0;
  std::string s_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
};

// A run report: command, config echo, named scalar results, convergence
// tables, pass/fail verdicts (each carrying the tolerance it was judged
// against), output files, and the error if one interrupted the run.
class Report {
 public:
  explicit Report(std::string command);

  void echo_config(const Config& cfg);
  void value(const std::string& key, double v);
  void value_int(const std::string& key, std::int64_t v);
  void value_text(const std::string& key, const std::string& v);
  void value_bool(const std::string& key, bool v);
  void table(const std::string& name, const std::vector<double>& h,
             const std::vector<double>& error,
             const std::vector<double>& order);
  void verdict(const std::string& name, bool pass, double measured,
               double tol);
  void file(const std::string& path);
  void set_error(const std::string& status, const std::string& message);

  bool all_pass() const { return all_pass_; }
  bool failed() const { return failed_; }
  std::string to_json(double seconds) const;
  void write(const std::string& path, double seconds) const;

 private:
  std::string command_;
  Json config_ = Json::object();
  Json values_ = Json::object();
  Json tables_ = Json::array();
  Json verdicts_ = Json::array();
  Json files_ = Json::array();
  std::string error_status_, error_message_;
  bool all_pass_ = true;
  bool failed_ = false;
};

}  // namespace wg
