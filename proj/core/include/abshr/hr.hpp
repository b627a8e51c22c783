#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace abshr {

enum class HrKind { instantaneous, window_average };

std::string_view to_string(HrKind kind);
HrKind hr_kind_from_string(std::string_view s);

struct HrSample {
  double time_s = 0.0;  // interval midpoint (iHR) or window centre (aHR)
  double bpm = 0.0;
  HrKind kind = HrKind::instantaneous;
};

/// Counts behind the two exclusion mechanisms: the window-level artifact gate
/// and the interval-level heart-rate floor.
struct Missingness {
  std::size_t windows_total = 0;
  std::size_t windows_rejected = 0;
  std::size_t intervals_total = 0;
  std::size_t intervals_rejected = 0;
  // Accepted windows that produced no aHR (fewer than two usable beats in the
  // counted span). Reported alongside, not folded into fraction_missing().
  std::size_t windows_without_ahr = 0;

  double window_fraction() const {
    return windows_total == 0 ? 0.0
                              : static_cast<double>(windows_rejected) /
                                    static_cast<double>(windows_total);
  }
  double interval_fraction() const {
    return intervals_total == 0 ? 0.0
                                : static_cast<double>(intervals_rejected) /
                                      static_cast<double>(intervals_total);
  }
  // Interval rejections apply to data that survived the window gate, so the
  // two fractions compose multiplicatively.
  double fraction_missing() const {
    return 1.0 - (1.0 - window_fraction()) * (1.0 - interval_fraction());
  }

  Missingness& operator+=(const Missingness& o) {
    windows_total += o.windows_total;
    windows_rejected += o.windows_rejected;
    intervals_total += o.intervals_total;
    intervals_rejected += o.intervals_rejected;
    windows_without_ahr += o.windows_without_ahr;
    return *this;
  }
  bool operator==(const Missingness&) const = default;
};

struct HrSeries {
  std::vector<HrSample> samples;
  Missingness missingness;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// Restrict to samples of one kind, preserving order.
HrSeries filter_kind(const HrSeries& series, HrKind kind);

}  // namespace abshr
