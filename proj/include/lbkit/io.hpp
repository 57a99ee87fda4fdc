#pragma once

// Output writers (VTK ImageData, CSV, PPM heatmaps) and the flat config format:
//
//   # comment
//   [Application.Discretization]
//   Resolution = 128
//
// Keys become dotted paths (Application.Discretization.Resolution).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lbkit/analysis.hpp"
#include "lbkit/error.hpp"
#include "lbkit/log.hpp"

namespace lbkit {

// -- VTI ------------------------------------------------------------------------

/// One point-data array; values interleaved per point, x fastest.
struct VtiArray {
  std::string name;
  int components = 1;
  std::vector<double> values;
};

template <int C>
VtiArray toVtiArray(std::string name, const GridField<C>& field) {
  VtiArray a{std::move(name), C, {}};
  a.values.reserve(field.data.size());
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      for (int k = 0; k < C; ++k) {
        a.values.push_back(field.at(ix, iy, k));
      }
    }
  }
  return a;
}

struct VtiGrid {
  int nx = 1;
  int ny = 1;
  Vec2 origin{0.0, 0.0};
  double deltaX = 1.0;
};

template <int C>
VtiGrid vtiGridOf(const GridField<C>& field) {
  return {field.nx, field.ny, field.origin, field.deltaX};
}

/// `name_iT00000042.vti`
inline std::string vtiFileName(const std::string& name, long long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_iT%08lld.vti", step);
  return name + buf;
}

namespace detail {

inline std::string formatDouble(double v, int precision = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline std::ofstream openForWrite(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!os) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  return os;
}

} // namespace detail

inline void writeVTI(const std::string& path, const VtiGrid& grid,
                     const std::vector<VtiArray>& arrays) {
  const auto points = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  for (const auto& a : arrays) {
    if (a.components < 1 || a.values.size() != points * static_cast<std::size_t>(a.components)) {
      throw ValidationError("VTI array '" + a.name + "' does not match the grid");
    }
  }
  auto os = detail::openForWrite(path);
  const std::string extent = "0 " + std::to_string(grid.nx - 1) + " 0 " +
                             std::to_string(grid.ny - 1) + " 0 0";
  const std::string dx = detail::formatDouble(grid.deltaX);
  os << "<?xml version=\"1.0\"?>\n";
  os << "<VTKFile type=\"ImageData\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
  os << "  <ImageData WholeExtent=\"" << extent << "\" Origin=\""
     << detail::formatDouble(grid.origin[0]) << ' ' << detail::formatDouble(grid.origin[1])
     << " 0\" Spacing=\"" << dx << ' ' << dx << ' ' << dx << "\">\n";
  os << "    <Piece Extent=\"" << extent << "\">\n";
  os << "      <PointData>\n";
  for (const auto& a : arrays) {
    os << "        <DataArray type=\"Float64\" Name=\"" << a.name << "\" NumberOfComponents=\""
       << a.components << "\" format=\"ascii\">\n";
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      os << (k % 8 == 0 ? "          " : " ") << detail::formatDouble(a.values[k]);
      if (k % 8 == 7 || k + 1 == a.values.size()) {
        os << '\n';
      }
    }
    os << "        </DataArray>\n";
  }
  os << "      </PointData>\n";
  os << "    </Piece>\n";
  os << "  </ImageData>\n";
  os << "</VTKFile>\n";
  if (!os) {
    throw IoError("failed writing '" + path + "'");
  }
}

/// Reads back the values of one ascii DataArray written by writeVTI.
inline std::vector<double> readVTIArray(const std::string& path, const std::string& name) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  const std::string text = buffer.str();
  const std::string tag = "Name=\"" + name + "\"";
  const auto at = text.find(tag);
  if (at == std::string::npos) {
    throw IoError("no DataArray '" + name + "' in '" + path + "'");
  }
  const auto begin = text.find('>', at);
  const auto end = text.find("</DataArray>", begin);
  if (begin == std::string::npos || end == std::string::npos) {
    throw IoError("malformed DataArray '" + name + "'");
  }
  std::istringstream body(text.substr(begin + 1, end - begin - 1));
  std::vector<double> values;
  std::string token;
  while (body >> token) {
    values.push_back(std::stod(token));
  }
  return values;
}

// -- CSV ------------------------------------------------------------------------

inline void writeCSV(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, int precision = 16) {
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw ValidationError("CSV row width does not match the header");
    }
  }
  auto os = detail::openForWrite(path);
  for (std::size_t k = 0; k < header.size(); ++k) {
    os << (k ? "," : "") << header[k];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      os << (k ? "," : "") << detail::formatDouble(row[k], precision);
    }
    os << '\n';
  }
  if (!os) {
    throw IoError("failed writing '" + path + "'");
  }
}

// -- PPM --------------------------------------------------------------------------

enum class Colormap { Grey, Rainbow };

inline Colormap colormapFromString(std::string_view name) {
  if (name == "grey" || name == "gray") {
    return Colormap::Grey;
  }
  if (name == "rainbow") {
    return Colormap::Rainbow;
  }
  throw ValidationError("unknown colormap '" + std::string(name) + "' (grey, rainbow)");
}

/// t in [0,1] to an RGB triple.
inline std::array<std::uint8_t, 3> colormapColor(Colormap map, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto byte = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  if (map == Colormap::Grey) {
    const auto g = byte(t);
    return {g, g, g};
  }
  // blue -> cyan -> green -> yellow -> red
  const double s = 4.0 * t;
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  if (s < 1.0) {
    g = s;
    b = 1.0;
  } else if (s < 2.0) {
    g = 1.0;
    b = 2.0 - s;
  } else if (s < 3.0) {
    r = s - 2.0;
    g = 1.0;
  } else {
    r = 1.0;
    g = 4.0 - s;
  }
  return {byte(r), byte(g), byte(b)};
}

/// Binary P6 image, one pixel per cell, top row = largest y. Bounds default to
/// the field range; a degenerate range maps everything to the midpoint color.
inline void writePPMHeatmap(const std::string& path, const ScalarField& field,
                            Colormap map = Colormap::Rainbow,
                            std::optional<double> minValue = std::nullopt,
                            std::optional<double> maxValue = std::nullopt) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : field.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (minValue) {
    lo = *minValue;
  }
  if (maxValue) {
    hi = *maxValue;
  }
  auto os = detail::openForWrite(path, true);
  os << "P6\n" << field.nx << ' ' << field.ny << "\n255\n";
  for (int iy = field.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      const double t = hi > lo ? (field.at(ix, iy) - lo) / (hi - lo) : 0.5;
      const auto rgb = colormapColor(map, t);
      os.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
  if (!os) {
    throw IoError("failed writing '" + path + "'");
  }
}

// -- config -----------------------------------------------------------------------

class ConfigTree {
public:
  bool contains(const std::string& key) const { return values_.contains(key); }
  std::size_t size() const noexcept { return values_.size(); }
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

  void set(const std::string& key, const std::string& value) {
    if (key.empty()) {
      throw ValidationError("config keys must be nonempty");
    }
    values_[key] = value;
  }

  /// Inserts a new key; duplicates are an error.
  void insert(const std::string& key, const std::string& value, int line = 0) {
    if (key.empty()) {
      throw ParseError("empty config key", line);
    }
    if (!values_.emplace(key, value).second) {
      throw ParseError("duplicate config key '" + key + "'", line);
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::string getString(const std::string& key, const std::string& fallback) const {
    if (auto v = raw(key)) {
      return *v;
    }
    warnMissing(key, fallback);
    return fallback;
  }

  double getDouble(const std::string& key, double fallback) const {
    if (auto v = raw(key)) {
      return convert<double>(key, *v);
    }
    warnMissing(key, detail::formatDouble(fallback));
    return fallback;
  }

  long long getInt(const std::string& key, long long fallback) const {
    if (auto v = raw(key)) {
      return convert<long long>(key, *v);
    }
    warnMissing(key, std::to_string(fallback));
    return fallback;
  }

  bool getBool(const std::string& key, bool fallback) const {
    if (auto v = raw(key)) {
      std::string s = *v;
      std::transform(s.begin(), s.end(), s.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
      }
      if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
      }
      throw ValidationError("config key '" + key + "' is not a boolean: '" + *v + "'");
    }
    warnMissing(key, fallback ? "true" : "false");
    return fallback;
  }

  /// Keys that were read but missing, each with the default it fell back to.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::string serialize() const {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& [key, value] : values_) {
      const auto dot = key.rfind('.');
      if (dot == std::string::npos) {
        sections[""].emplace_back(key, value);
      } else {
        sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
      }
    }
    std::ostringstream os;
    for (const auto& [section, items] : sections) {
      if (!section.empty()) {
        os << '[' << section << "]\n";
      }
      for (const auto& [k, v] : items) {
        os << k << " = " << v << '\n';
      }
    }
    return os.str();
  }

private:
  template <typename T>
  static T convert(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T value{};
    is >> value;
    if (!is || !(is >> std::ws).eof()) {
      throw ValidationError("config key '" + key + "' has invalid value '" + text + "'");
    }
    return value;
  }

  void warnMissing(const std::string& key, const std::string& fallback) const {
    warnings_.push_back(key + " (default " + fallback + ")");
    Logger("ConfigTree").warn("parameter ", key, " not found, using default ", fallback);
  }

  std::map<std::string, std::string> values_;
  mutable std::vector<std::string> warnings_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

inline ConfigTree parseConfigString(std::string_view text) {
  ConfigTree tree;
  std::string section;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string s = detail::trim(line);
    if (s.empty()) {
      continue;
    }
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw ParseError("malformed section header '" + s + "'", lineNo);
      }
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      if (section.empty() || section.find_first_of(" \t=") != std::string::npos) {
        throw ParseError("malformed section header '" + s + "'", lineNo);
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'Key = value', got '" + s + "'", lineNo);
    }
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t[]") != std::string::npos) {
      throw ParseError("malformed key in '" + s + "'", lineNo);
    }
    tree.insert(section.empty() ? key : section + "." + key, value, lineNo);
  }
  return tree;
}

inline ConfigTree parseConfig(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot read config '" + path + "'");
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parseConfigString(buffer.str());
}

} // namespace lbkit
