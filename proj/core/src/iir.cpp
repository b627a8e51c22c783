#include "abshr/iir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "abshr/error.hpp"

namespace abshr {

std::complex<double> Biquad::response(std::complex<double> z_inv) const {
  const auto z_inv2 = z_inv * z_inv;
  return (b0 + b1 * z_inv + b2 * z_inv2) / (1.0 + a1 * z_inv + a2 * z_inv2);
}

std::complex<double> IirFilter::response(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const std::complex<double> z_inv = std::polar(1.0, -w);
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections) h *= s.response(z_inv);
  return h;
}

std::vector<std::complex<double>> IirFilter::poles() const {
  std::vector<std::complex<double>> out;
  for (const auto& s : sections) {
    if (s.a2 == 0.0) {
      out.emplace_back(-s.a1, 0.0);
      continue;
    }
    // Roots of z² + a1 z + a2.
    const std::complex<double> disc = std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

bool IirFilter::is_stable() const {
  const auto p = poles();
  return std::all_of(p.begin(), p.end(), [](auto z) { return std::abs(z) < 1.0; });
}

IirFilter design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) {
    throw ArgumentError("Butterworth order must be >= 1, got " + std::to_string(order));
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ArgumentError("sample rate must be positive");
  }
  const double nyquist = sample_rate_hz / 2.0;
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < nyquist)) {
    throw DesignError("Butterworth cutoff " + std::to_string(cutoff_hz) +
                      " Hz must lie strictly between 0 and Nyquist (" +
                      std::to_string(nyquist) + " Hz)");
  }

  IirFilter f;
  f.order = order;
  f.cutoff_hz = cutoff_hz;
  f.sample_rate_hz = sample_rate_hz;

  // Pre-warped analog cutoff, normalized by 2·fs.
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const double k2 = k * k;
  for (int i = 0; i < order / 2; ++i) {
    // Analog section s² + q·s + 1 from the conjugate pole pair at angle theta.
    const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order);
    const double q = 2.0 * std::sin(theta);
    const double d = 1.0 + q * k + k2;
    Biquad s;
    s.b0 = k2 / d;
    s.b1 = 2.0 * k2 / d;
    s.b2 = k2 / d;
    s.a1 = 2.0 * (k2 - 1.0) / d;
    s.a2 = (1.0 - q * k + k2) / d;
    f.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double d = 1.0 + k;
    Biquad s;
    s.b0 = k / d;
    s.b1 = k / d;
    s.a1 = (k - 1.0) / d;
    f.sections.push_back(s);
  }
  return f;
}

namespace {

// In-place cascade pass. With `steady_start`, every section's state is the
// steady state for a constant input equal to buf[0].
void run_cascade(const IirFilter& filter, std::vector<double>& buf, bool steady_start) {
  if (buf.empty()) return;
  double level = buf.front();
  for (const auto& s : filter.sections) {
    double z1 = 0.0, z2 = 0.0;
    if (steady_start) {
      const double y = s.dc_gain() * level;
      z1 = y - s.b0 * level;
      z2 = s.b2 * level - s.a2 * y;
      level = y;
    }
    for (double& v : buf) {
      const double x = v;
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      v = y;
    }
  }
}

}  // namespace

std::vector<double> filter_causal(const IirFilter& filter, std::span<const double> x) {
  std::vector<double> buf(x.begin(), x.end());
  run_cascade(filter, buf, false);
  return buf;
}

std::size_t zero_phase_min_length(const IirFilter& filter) {
  return 3 * static_cast<std::size_t>(filter.order) + 1;
}

std::vector<double> filter_zero_phase(const IirFilter& filter, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < zero_phase_min_length(filter)) {
    throw ArgumentError("zero-phase filtering needs at least " +
                        std::to_string(zero_phase_min_length(filter)) +
                        " samples (more than 3 x order), got " + std::to_string(n));
  }
  const std::size_t pad = 3 * static_cast<std::size_t>(filter.order);

  // Odd reflection about each endpoint.
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * x[0] - x[pad - i];
    ext[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  std::vector<double> fwd_bwd = ext;
  run_cascade(filter, fwd_bwd, true);
  std::reverse(fwd_bwd.begin(), fwd_bwd.end());
  run_cascade(filter, fwd_bwd, true);
  std::reverse(fwd_bwd.begin(), fwd_bwd.end());

  std::vector<double> bwd_fwd = std::move(ext);
  std::reverse(bwd_fwd.begin(), bwd_fwd.end());
  run_cascade(filter, bwd_fwd, true);
  std::reverse(bwd_fwd.begin(), bwd_fwd.end());
  run_cascade(filter, bwd_fwd, true);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.5 * (fwd_bwd[i + pad] + bwd_fwd[i + pad]);
  }
  return out;
}

AudioSegment filter_zero_phase(const IirFilter& filter, const AudioSegment& segment) {
  if (std::abs(segment.sample_rate_hz() - filter.sample_rate_hz) >
      1e-9 * filter.sample_rate_hz) {
    throw ArgumentError("filter designed for " + std::to_string(filter.sample_rate_hz) +
                        " Hz applied to a " + std::to_string(segment.sample_rate_hz()) +
                        " Hz segment");
  }
  return segment.with_samples(filter_zero_phase(filter, segment.view()));
}

}  // namespace abshr
