#pragma once

#include <complex>
#include <span>
#include <vector>

#include "abshr/audio.hpp"

namespace abshr {

/// One second-order section, a0 normalized to 1. A first-order section is a
/// Biquad with b2 == a2 == 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z_inv) const;
  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

/// Cascade of second-order sections plus design metadata.
struct IirFilter {
  std::vector<Biquad> sections;
  int order = 0;
  double cutoff_hz = 0.0;
  double sample_rate_hz = 0.0;

  // Complex single-pass frequency response at `freq_hz`.
  std::complex<double> response(double freq_hz) const;
  double magnitude(double freq_hz) const { return std::abs(response(freq_hz)); }
  // All denominator roots of the cascade.
  std::vector<std::complex<double>> poles() const;
  bool is_stable() const;
};

/// Digital Butterworth lowpass by bilinear transform with cutoff pre-warping,
/// realized as ⌊order/2⌋ biquads plus one first-order section for odd order.
/// |H(0)| = 1 and |H(cutoff_hz)| = 1/√2 for a single pass.
IirFilter design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

// Single causal pass, zero initial state (transposed direct form II).
std::vector<double> filter_causal(const IirFilter& filter, std::span<const double> x);

/// Minimum input length accepted by filter_zero_phase for this filter.
std::size_t zero_phase_min_length(const IirFilter& filter);

/// Forward-backward filtering with zero group delay.
///
/// The input is extended at both ends by odd reflection of 3·order samples and
/// each section starts in its steady state for the first extended sample. The
/// result is the mean of the forward-then-backward and backward-then-forward
/// passes, which makes the operator commute exactly with time reversal. The
/// effective magnitude response is |H|².
AudioSegment filter_zero_phase(const IirFilter& filter, const AudioSegment& segment);
std::vector<double> filter_zero_phase(const IirFilter& filter, std::span<const double> x);

}  // namespace abshr
