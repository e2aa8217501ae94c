#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "magnitude/error.hpp"
#include "magnitude/table.hpp"

namespace magnitude {

/// `count` points spaced uniformly in log t, endpoints exact.
inline std::vector<double> log_scales(double t_min, double t_max, int count) {
  detail::require(t_min > 0.0 && t_max > t_min, "log scales need 0 < min < max");
  detail::require(count >= 2, "log scales need count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(t_min), b = std::log(t_max);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

/// Parses "min:max:log:count", "min:max:lin:count" or a literal "a,b,c".
inline std::vector<double> parse_scales(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::invalid_argument,
                 "bad scale list '" + std::string(text) +
                     "'; expected min:max:log:count, min:max:lin:count or a,b,c");
  };
  std::vector<std::string_view> parts;
  const char sep = text.find(':') != std::string_view::npos ? ':' : ',';
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  try {
    if (sep == ':') {
      if (parts.size() != 4) throw fail();
      const double lo = parse_number(parts[0]);
      const double hi = parse_number(parts[1]);
      const double count_d = parse_number(parts[3]);
      const int count = static_cast<int>(count_d);
      if (count_d != count) throw fail();
      if (parts[2] == "log") return log_scales(lo, hi, count);
      if (parts[2] == "lin") {
        detail::require(lo > 0.0 && hi > lo && count >= 2, "linear scales need 0 < min < max, count >= 2");
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
        out.back() = hi;
        return out;
      }
      throw fail();
    }
    std::vector<double> out;
    for (auto p : parts) out.push_back(parse_number(p));
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::table_format) throw fail();
    throw;
  }
}

}  // namespace magnitude
