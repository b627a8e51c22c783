#include "abshr/peaks.hpp"

#include <algorithm>
#include <numeric>

namespace abshr {

std::vector<std::size_t> find_peaks(std::span<const double> x, double min_height,
                                    std::size_t min_distance) {
  std::vector<std::size_t> cand;
  const std::size_t n = x.size();
  if (n < 3) return cand;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        const std::size_t mid = (i + ahead - 1) / 2;
        if (x[mid] >= min_height) cand.push_back(mid);
        i = ahead;
        continue;
      }
      i = ahead;
      continue;
    }
    ++i;
  }
  if (min_distance <= 1 || cand.size() < 2) return cand;

  std::vector<std::size_t> order(cand.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[cand[a]] > x[cand[b]]; });

  std::vector<char> keep(cand.size(), 1);
  for (std::size_t k : order) {
    if (!keep[k]) continue;
    const std::size_t pos = cand[k];
    for (std::size_t j = k; j-- > 0 && pos - cand[j] < min_distance;) keep[j] = 0;
    for (std::size_t j = k + 1; j < cand.size() && cand[j] - pos < min_distance; ++j) keep[j] = 0;
  }

  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    if (keep[k]) out.push_back(cand[k]);
  }
  return out;
}

}  // namespace abshr
