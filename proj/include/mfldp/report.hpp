#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfldp/space.hpp"

namespace mfldp {

inline constexpr const char* kVersion = "0.1.0";

/// %.17g, with inf / -inf / nan spelled out.
std::string format_double(double x);

/// FNV-1a 64-bit hash, printed as 16 hex digits by `hash_hex`.
std::uint64_t fnv1a(std::string_view data);
std::string hash_hex(std::uint64_t h);

class Table {
 public:
  Table(std::string name, std::vector<std::string> columns);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  Table& add_row(std::vector<std::string> cells);

  /// Helper for numeric cells.
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

  void write_csv(std::ostream& out) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

/// Self-contained SVG line plot; non-finite points are skipped.
std::string svg_line_plot(const PlotSpec& plot);

/// "MFLD" magic, u16 version, u32 n, u32 d, then n*d little-endian f64.
void write_frame(std::ostream& out, const Configuration& x);
Configuration read_frame(std::istream& in);

/// Writes report.json, one CSV per table and one SVG per plot into `dir`.
void write_bundle(const std::filesystem::path& dir, const nlohmann::json& manifest, const std::vector<Table>& tables,
                  const std::vector<PlotSpec>& plots);

}  // namespace mfldp
