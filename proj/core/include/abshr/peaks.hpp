#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace abshr {

/// Indices of local maxima with height >= min_height, thinned so that no two
/// survivors are closer than min_distance samples.
///
/// A maximum is a sample (or flat run of equal samples) strictly higher than
/// both neighbours; a flat run reports its midpoint, rounded down. The first
/// and last samples are never maxima. Conflicts are resolved greedily by
/// descending height, earlier index first among equal heights. Output is
/// sorted by index.
std::vector<std::size_t> find_peaks(std::span<const double> x, double min_height,
                                    std::size_t min_distance);

}  // namespace abshr
