#include "abshr/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "abshr/error.hpp"

namespace abshr {

namespace {

constexpr double kStopbandAttenuationDb = 70.0;
constexpr double kTransitionFraction = 0.1;

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9 * std::max(1.0, v); }

// Whole-sample symmetric reflection into [0, n).
std::size_t reflect(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - i);
}

}  // namespace

RationalRatio rational_ratio(double source_hz, double target_hz) {
  if (is_integral(source_hz) && is_integral(target_hz)) {
    const auto s = static_cast<std::int64_t>(std::llround(source_hz));
    const auto t = static_cast<std::int64_t>(std::llround(target_hz));
    const auto g = std::gcd(s, t);
    return {t / g, s / g};
  }
  // Continued-fraction convergents of target/source, denominator capped.
  constexpr std::int64_t kMaxDenominator = 10000;
  const double ratio = target_hz / source_hz;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = ratio;
  for (int iter = 0; iter < 64; ++iter) {
    const auto a = static_cast<std::int64_t>(std::floor(r));
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > kMaxDenominator) break;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    const double frac = r - static_cast<double>(a);
    if (frac < 1e-12) break;
    r = 1.0 / frac;
  }
  return {p1, q1};
}

std::vector<double> design_antialias_fir(double upsampled_rate_hz, double stopband_hz) {
  const double transition_hz = kTransitionFraction * stopband_hz;
  const double cutoff_hz = stopband_hz - transition_hz / 2.0;
  const double dw = 2.0 * std::numbers::pi * transition_hz / upsampled_rate_hz;
  const double beta = 0.1102 * (kStopbandAttenuationDb - 8.7);
  auto taps = static_cast<std::size_t>(
      std::ceil((kStopbandAttenuationDb - 7.95) / (2.285 * dw))) + 1;
  if (taps % 2 == 0) ++taps;

  const double fc = cutoff_hz / upsampled_rate_hz;  // cycles per sample
  const double mid = static_cast<double>(taps - 1) / 2.0;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(taps);
  for (std::size_t n = 0; n < taps; ++n) {
    const double t = static_cast<double>(n) - mid;
    const double arg = 2.0 * fc * t;
    const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double r = t / mid;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[n] = 2.0 * fc * sinc * window;
  }
  return h;
}

AudioSegment resample(const AudioSegment& segment, double target_hz,
                      std::optional<double> antialias_cutoff_hz) {
  const double source_hz = segment.sample_rate_hz();
  if (!(target_hz > 0.0)) {
    throw ArgumentError("target sample rate must be positive");
  }
  if (std::abs(target_hz - source_hz) <= 1e-9 * source_hz) {
    return segment;
  }
  if (target_hz > source_hz) {
    throw UnsupportedError("upsampling from " + std::to_string(source_hz) + " Hz to " +
                           std::to_string(target_hz) + " Hz is not supported");
  }

  const RationalRatio ratio = rational_ratio(source_hz, target_hz);
  double stopband = target_hz / 2.0;
  if (antialias_cutoff_hz) {
    if (!(*antialias_cutoff_hz > 0.0)) {
      throw ArgumentError("anti-alias cutoff must be positive");
    }
    stopband = std::min(stopband, *antialias_cutoff_hz);
  }
  const double upsampled_rate = source_hz * static_cast<double>(ratio.up);
  std::vector<double> h = design_antialias_fir(upsampled_rate, stopband);
  // Zero-stuffing by `up` scales the spectrum by 1/up.
  for (double& v : h) v *= static_cast<double>(ratio.up);

  const auto n_in = static_cast<std::int64_t>(segment.size());
  if (n_in == 0) return AudioSegment({}, target_hz, segment.start_time_s());
  const std::int64_t up = ratio.up;
  const std::int64_t down = ratio.down;
  const auto taps = static_cast<std::int64_t>(h.size());
  const std::int64_t delay = (taps - 1) / 2;
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  const auto& x = segment.samples();
  std::vector<double> y(static_cast<std::size_t>(n_out));
  for (std::int64_t m = 0; m < n_out; ++m) {
    // Upsampled-grid index aligned with the filter's centre tap.
    const std::int64_t c = m * down + delay;
    // Input samples i with 0 <= c - i·up < taps.
    std::int64_t i_hi = c / up;
    std::int64_t lo_num = c - taps + 1;
    std::int64_t i_lo = lo_num <= 0 ? -((-lo_num) / up) : (lo_num + up - 1) / up;
    double acc = 0.0;
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
      const double xi = (i >= 0 && i < n_in) ? x[static_cast<std::size_t>(i)]
                                             : x[reflect(i, n_in)];
      acc += xi * h[static_cast<std::size_t>(c - i * up)];
    }
    y[static_cast<std::size_t>(m)] = acc;
  }
  return AudioSegment(std::move(y), target_hz, segment.start_time_s());
}

}  // namespace abshr
