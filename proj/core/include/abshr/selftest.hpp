#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abshr/wavelet.hpp"

namespace abshr {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  // Basis under test; coif4 when unset.
  std::optional<WaveletBasis> basis;
  unsigned seed = 12345;
};

/// Embedded invariant suite: basis identities, perfect reconstruction,
/// Parseval, filter response, threshold law, soft-threshold law, peak
/// spacing, metric identities and missingness composition.
std::vector<SelftestCheck> run_selftest(const SelftestOptions& options = {});

/// Copy of `basis` with one synthesis-lowpass tap perturbed, for fault
/// injection.
WaveletBasis corrupted_basis(const WaveletBasis& basis);

}  // namespace abshr
