#pragma once

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace piezonet {

// Parses a real number with optional scientific notation and one trailing SI
// suffix: k (1e3), m (1e-3), u (1e-6), n (1e-9). The whole token must be
// consumed. Returns nullopt on malformed input or non-finite result.
inline std::optional<double> parse_si_number(std::string_view token) {
  if (token.empty()) return std::nullopt;
  double scale = 1.0;
  switch (token.back()) {
    case 'k': scale = 1e3; break;
    case 'm': scale = 1e-3; break;
    case 'u': scale = 1e-6; break;
    case 'n': scale = 1e-9; break;
    default: break;
  }
  if (scale != 1.0) token.remove_suffix(1);
  if (token.empty()) return std::nullopt;

  const std::string buf(token);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE) return std::nullopt;
  // strtod accepts "inf"/"nan" and hex floats; neither belongs in a netlist.
  for (char c : buf) {
    if (c == 'x' || c == 'X' || c == 'i' || c == 'I' || c == 'N') return std::nullopt;
  }
  const double out = value * scale;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

}  // namespace piezonet
