#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace abshr {

/// Orthogonal two-channel filter bank.
///
/// `reconstruction_lowpass` is the scaling filter h (Σh = √2) and
/// `reconstruction_highpass` its quadrature mirror g[n] = (-1)^n h[L-1-n].
/// The decomposition filters are their time reversals.
struct WaveletBasis {
  std::string name;
  std::vector<double> decomposition_lowpass;
  std::vector<double> decomposition_highpass;
  std::vector<double> reconstruction_lowpass;
  std::vector<double> reconstruction_highpass;

  std::size_t length() const { return reconstruction_lowpass.size(); }

  // Builds all four filters from the scaling filter.
  static WaveletBasis from_scaling_filter(std::string name, std::vector<double> h);
};

/// Coiflet with 4 vanishing moments (24 taps).
const WaveletBasis& coif4();

/// Look up a basis by identifier; only "coif4" is provided.
const WaveletBasis& wavelet_by_name(const std::string& name);

/// Result of checking a basis against the orthogonal-filter-bank identities.
struct BasisCheck {
  double lowpass_sum_error = 0.0;      // |Σh - √2|
  double highpass_sum_error = 0.0;     // |Σg|
  double orthonormality_error = 0.0;   // max_k |Σ h[n]h[n-2k] - δ(k)|
  double qmf_error = 0.0;              // max_n |g[n] - (-1)^n h[L-1-n]|
  double reversal_error = 0.0;         // decomposition filters vs reversed synthesis filters
  bool ok(double tol = 1e-10) const {
    return lowpass_sum_error <= tol && highpass_sum_error <= tol &&
           orthonormality_error <= tol && qmf_error <= tol && reversal_error <= tol;
  }
};
BasisCheck check_basis(const WaveletBasis& basis);

/// Periodized multilevel decomposition. details[0] is the finest level.
struct WaveletDecomposition {
  std::vector<double> approximation;
  std::vector<std::vector<double>> details;
  std::size_t original_length = 0;
  const WaveletBasis* basis = nullptr;

  std::size_t levels() const { return details.size(); }
};

/// Band length produced at `level` (1-based) for a signal of `length`:
/// each level halves with ceiling.
std::size_t band_length(std::size_t length, int level);

/// Deepest level allowed for `length` samples: floor(log2(length)).
int max_dwt_level(std::size_t length);

/// Periodized pyramid DWT. An odd-length intermediate signal is extended by
/// repeating its last sample before filtering, so band lengths are
/// ceil(n/2) per level. Throws ArgumentError when 2^levels > signal length.
WaveletDecomposition dwt(std::span<const double> signal, const WaveletBasis& basis, int levels);

/// Inverse of dwt; throws StructuralError when band lengths do not match
/// original_length.
std::vector<double> idwt(const WaveletDecomposition& decomp);

enum class SigmaEstimator {
  mean_abs_dev,          // mean |x - mean(x)|
  median_abs_dev_scaled  // median |x| / 0.6745
};

struct ThresholdPolicy {
  SigmaEstimator sigma_estimator = SigmaEstimator::mean_abs_dev;
  bool threshold_approximation_band = false;
};

double estimate_sigma(std::span<const double> band, SigmaEstimator estimator);

/// Universal ("sqtwolog") threshold σ·√(2 ln N) for one band of length N.
double sqtwolog_threshold(std::span<const double> band, SigmaEstimator estimator);

/// sign(x)·max(|x| - th, 0) elementwise.
std::vector<double> soft_threshold(std::span<const double> band, double th);

/// dwt -> per-band sqtwolog soft thresholding -> idwt. Output length equals
/// input length.
std::vector<double> denoise_window(std::span<const double> window, const WaveletBasis& basis,
                                   int levels, const ThresholdPolicy& policy = {});

}  // namespace abshr
