#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "asclab/errors.hpp"
#include "asclab/rate_fit.hpp"
#include "json.hpp"

namespace asclab {

/// 17 significant digits, '.' decimal separator, locale independent.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw NumericError("number formatting failed");
  return std::string(buf, end);
}

/// Shortest round-trip form, used for column tags and config echo.
inline std::string format_short(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericError("number formatting failed");
  return std::string(buf, end);
}

using Cell = std::variant<double, std::string>;

struct Dataset {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Dataset() = default;
  Dataset(std::string n, std::vector<std::string> cols)
      : name(std::move(n)), columns(std::move(cols)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw DimensionError("row width does not match columns of " + name);
    }
    rows.push_back(std::move(row));
  }

  std::size_t column_index(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == col) return i;
    throw ConfigurationError("dataset " + name + " has no column " + col);
  }

  std::vector<double> numeric_column(const std::string& col) const {
    const auto j = column_index(col);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(std::get<double>(r[j]));
    return out;
  }

  std::string to_csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) s += ',';
      s += columns[i];
    }
    s += '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ',';
        if (const auto* d = std::get_if<double>(&r[i])) s += format_double(*d);
        else s += std::get<std::string>(r[i]);
      }
      s += '\n';
    }
    return s;
  }
};

struct ExperimentReport {
  std::string id;
  std::vector<Dataset> datasets;
  std::map<std::string, RateEstimate> fits;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> config_echo;
  std::uint64_t seed = 0;

  const Dataset& dataset(const std::string& name) const {
    for (const auto& d : datasets)
      if (d.name == name) return d;
    throw ConfigurationError("report has no dataset " + name);
  }
  const RateEstimate& fit(const std::string& name) const {
    auto it = fits.find(name);
    if (it == fits.end()) throw ConfigurationError("report has no fit " + name);
    return it->second;
  }
  double metric(const std::string& name) const {
    auto it = metrics.find(name);
    if (it == metrics.end()) throw ConfigurationError("report has no metric " + name);
    return it->second;
  }
};

inline nlohmann::ordered_json summary_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.id;
  auto& fits = j["fits"] = nlohmann::ordered_json::object();
  for (const auto& [k, f] : r.fits) {
    fits[k] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
  }
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config_echo) cfg[k] = v;
  j["seed"] = r.seed;
  auto& m = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) m[k] = v;
  return j;
}

/// Writes <name>.csv per dataset and summary.json; returns the paths written.
inline std::vector<std::filesystem::path> write_report(
    const ExperimentReport& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  auto dump = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigurationError("cannot write " + p.string());
    f << text;
    paths.push_back(p);
  };
  for (const auto& d : r.datasets) dump(out_dir / (d.name + ".csv"), d.to_csv());
  dump(out_dir / "summary.json", summary_json(r).dump(2) + "\n");
  return paths;
}

}  // namespace asclab
