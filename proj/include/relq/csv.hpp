#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace relq {

// %.17g renders doubles round-trip exactly; '.' decimal regardless of locale.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC 4180: quote fields containing comma, quote, or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << csv_field(cells[i]);
  }
  os << "\r\n";
}

}  // namespace relq
