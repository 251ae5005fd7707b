#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace clusterdev {

// Shortest round-trip representation; "nan"/"inf" spelled out.
inline std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string fmt_num(long x) { return std::to_string(x); }

}  // namespace clusterdev
