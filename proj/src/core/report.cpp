#include "core/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/errors.hpp"

namespace wg {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) {
    if (std::isnan(v)) return "\"nan\"";
    return v > 0 ? "\"inf\"" : "\"-inf\"";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json Json::object() {
  Json j;
  j.kind_ = Kind::Obj;
  return j;
}

Json Json::array() {
  Json j;
  j.kind_ = Kind::Arr;
  return j;
}

Json Json::number(double v) {
  Json j;
  j.kind_ = Kind::Num;
  j.d_ = v;
  return j;
}

Json Json::integer(std::int64_t v) {
  Json j;
  j.kind_ = Kind::Int;
  j.i_ = v;
  return j;
}

Json Json::boolean(bool v) {
  Json j;
  j.kind_ = Kind::Bool;
  j.b_ = v;
  return j;
}

Json Json::text(std::string v) {
  Json j;
  j.kind_ = Kind::Str;
  j.s_ = std::move(v);
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  if (kind_ != Kind::Obj) raise(Status::Internal, "Json::set on non-object");
  for (auto& [k, old] : obj_) {
    if (k == key) {
      old = std::move(v);
      return *this;
    }
  }
  obj_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  if (kind_ != Kind::Arr) raise(Status::Internal, "Json::push on non-array");
  arr_.push_back(std::move(v));
  return *this;
}

bool Json::empty() const {
  if (kind_ == Kind::Obj) return obj_.empty();
  if (kind_ == Kind::Arr) return arr_.empty();
  return kind_ == Kind::Null;
}

void Json::emit(std::string& out, int indent, int depth) const {
  const std::string pad =
      indent > 0 ? std::string(static_cast<size_t>(indent) * (depth + 1), ' ')
                 : std::string();
  const std::string close_pad =
      indent > 0 ? std::string(static_cast<size_t>(indent) * depth, ' ')
                 : std::string();
  const char* nl = indent > 0 ? "\n" : "";
  const char* kv = indent > 0 ? ": " : ":";
  switch (kind_) {
    case Kind::Null:
      out += "null";
      break;
    case Kind::Bool:
      out += b_ ? "true" : "false";
      break;
    case Kind::Int: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(i_));
      out += buf;
      break;
    }
    case Kind::Num:
      out += format_number(d_);
      break;
    case Kind::Str:
      out += '"';
      out += escape(s_);
      out += '"';
      break;
    case Kind::Arr: {
      if (arr_.empty()) {
        out += "[]";
        break;
      }
      out += '[';
      out += nl;
      for (size_t k = 0; k < arr_.size(); ++k) {
        out += pad;
        arr_[k].emit(out, indent, depth + 1);
        if (k + 1 < arr_.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += ']';
      break;
    }
    case Kind::Obj: {
      if (obj_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      out += nl;
      for (size_t k = 0; k < obj_.size(); ++k) {
        out += pad;
        out += '"';
        out += escape(obj_[k].first);
        out += '"';
        out += kv;
        obj_[k].second.emit(out, indent, depth + 1);
        if (k + 1 < obj_.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += '}';
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  emit(out, indent, 0);
  return out;
}

Report::Report(std::string command) : command_(std::move(command)) {}

void Report::echo_config(const Config& cfg) {
  config_ = Json::object();
  for (const auto& [key, value] : cfg.entries()) {
    config_.set(key, Json::text(value));
  }
}

void Report::value(const std::string& key, double v) {
  values_.set(key, Json::number(v));
}

void Report::value_int(const std::string& key, std::int64_t v) {
  values_.set(key, Json::integer(v));
}

void Report::value_text(const std::string& key, const std::string& v) {
  values_.set(key, Json::text(v));
}

void Report::value_bool(const std::string& key, bool v) {
  values_.set(key, Json::boolean(v));
}

void Report::table(const std::string& name, const std::vector<double>& h,
                   const std::vector<double>& error,
                   const std::vector<double>& order) {
  Json t = Json::object();
  t.set("name", Json::text(name));
  Json hs = Json::array(), es = Json::array(), os = Json::array();
  for (double v : h) hs.push(Json::number(v));
  for (double v : error) es.push(Json::number(v));
  for (double v : order) os.push(Json::number(v));
  t.set("h", std::move(hs));
  t.set("error", std::move(es));
  t.set("order", std::move(os));
  tables_.push(std::move(t));
}

void Report::verdict(const std::string& name, bool pass, double measured,
                     double tol) {
  Json v = Json::object();
  v.set("name", Json::text(name));
  v.set("pass", Json::boolean(pass));
  v.set("measured", Json::number(measured));
  v.set("tol", Json::number(tol));
  verdicts_.push(std::move(v));
  all_pass_ = all_pass_ && pass;
}

void Report::file(const std::string& path) { files_.push(Json::text(path)); }

void Report::set_error(const std::string& status, const std::string& message) {
  error_status_ = status;
  error_message_ = message;
  failed_ = true;
}

std::string Report::to_json(double seconds) const {
  Json root = Json::object();
  root.set("command", Json::text(command_));
  if (!config_.empty()) root.set("config", config_);
  if (failed_) {
    root.set("status", Json::text("error"));
    Json err = Json::object();
    err.set("code", Json::text(error_status_));
    err.set("message", Json::text(error_message_));
    root.set("error", std::move(err));
  } else {
    root.set("status", Json::text(all_pass_ ? "pass" : "fail"));
  }
  root.set("timing_seconds", Json::number(seconds));
  if (!values_.empty()) root.set("values", values_);
  if (!tables_.empty()) root.set("tables", tables_);
  if (!verdicts_.empty()) root.set("verdicts", verdicts_);
  if (!files_.empty()) root.set("files", files_);
  return root.dump(2) + "\n";
}

void Report::write(const std::string& path, double seconds) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Status::Io, "cannot open report file: " + path);
  out << to_json(seconds);
  if (!out) raise(Status::Io, "failed writing report file: " + path);
}

}  // namespace wg
