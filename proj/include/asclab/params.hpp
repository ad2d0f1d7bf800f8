#pragma once

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "asclab/errors.hpp"

namespace asclab {

enum class ParamKind { integer, real, real_list, flag, choice };

struct ParamSpec {
  std::string name;
  ParamKind kind;
  std::string default_value;
  std::string help;
  std::vector<std::string> choices = {};
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view key, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw ConfigurationError("parameter " + std::string(key) + ": '" +
                             std::string(s) + "' is not a number");
  }
  return v;
}

inline long parse_int(std::string_view key, std::string_view s) {
  s = trim(s);
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
    throw ConfigurationError("parameter " + std::string(key) + ": '" +
                             std::string(s) + "' is not an integer");
  }
  return v;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_real(key, s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline bool parse_flag(std::string_view key, std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigurationError("parameter " + std::string(key) + " expects true/false");
}

}  // namespace detail

/// Resolved parameter set: defaults overlaid with user values, validated
/// against the parameter table before any experiment starts computing.
class Params {
 public:
  Params(const std::vector<ParamSpec>& specs,
         const std::map<std::string, std::string>& user) {
    for (const auto& [k, v] : user) {
      bool known = false;
      for (const auto& s : specs) known = known || s.name == k;
      if (!known) throw ConfigurationError("unknown parameter '" + k + "'");
    }
    for (const auto& s : specs) {
      auto it = user.find(s.name);
      const std::string v = it == user.end() ? s.default_value : it->second;
      validate(s, v);
      values_[s.name] = v;
      kinds_[s.name] = s.kind;
    }
  }

  long integer(const std::string& k) const { return detail::parse_int(k, raw(k)); }
  double real(const std::string& k) const { return detail::parse_real(k, raw(k)); }
  std::vector<double> list(const std::string& k) const {
    return detail::parse_list(k, raw(k));
  }
  bool flag(const std::string& k) const { return detail::parse_flag(k, raw(k)); }
  const std::string& text(const std::string& k) const { return raw(k); }
  const std::map<std::string, std::string>& echo() const { return values_; }

 private:
  static void validate(const ParamSpec& s, const std::string& v) {
    switch (s.kind) {
      case ParamKind::integer: detail::parse_int(s.name, v); break;
      case ParamKind::real: detail::parse_real(s.name, v); break;
      case ParamKind::real_list: detail::parse_list(s.name, v); break;
      case ParamKind::flag: detail::parse_flag(s.name, v); break;
      case ParamKind::choice: {
        bool ok = false;
        for (const auto& c : s.choices) ok = ok || c == v;
        if (!ok) throw ConfigurationError("parameter " + s.name + ": invalid value '" + v + "'");
        break;
      }
    }
  }

  const std::string& raw(const std::string& k) const {
    auto it = values_.find(k);
    if (it == values_.end()) throw ConfigurationError("parameter '" + k + "' not defined");
    return it->second;
  }

  std::map<std::string, std::string> values_;
  std::map<std::string, ParamKind> kinds_;
};

}  // namespace asclab
