#include "abshr/hr.hpp"

#include <string>

#include "abshr/error.hpp"

namespace abshr {

std::string_view to_string(HrKind kind) {
  switch (kind) {
    case HrKind::instantaneous:
      return "instantaneous";
    case HrKind::window_average:
      return "window_average";
  }
  return "unknown";
}

HrKind hr_kind_from_string(std::string_view s) {
  if (s == "instantaneous") return HrKind::instantaneous;
  if (s == "window_average") return HrKind::window_average;
  throw ArgumentError("unknown heart-rate kind '" + std::string(s) + "'");
}

HrSeries filter_kind(const HrSeries& series, HrKind kind) {
  HrSeries out;
  out.missingness = series.missingness;
  for (const auto& s : series.samples) {
    if (s.kind == kind) out.samples.push_back(s);
  }
  return out;
}

}  // namespace abshr
