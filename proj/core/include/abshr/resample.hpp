#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abshr/audio.hpp"

namespace abshr {

struct RationalRatio {
  std::int64_t up = 1;
  std::int64_t down = 1;
};

// up/down ≈ target/source; exact when both rates are integers.
RationalRatio rational_ratio(double source_hz, double target_hz);

/// Kaiser-windowed sinc anti-alias lowpass for the polyphase resampler,
/// designed at the upsampled rate source·up. The stopband starts at
/// `stopband_hz` with at least 60 dB attenuation; passband edge is 0.9 of it.
std::vector<double> design_antialias_fir(double upsampled_rate_hz, double stopband_hz);

/// Rational polyphase downsampling with symmetric extension at the edges.
///
/// Output rate is exactly `target_hz`; output length is ceil(n·up/down). The
/// anti-alias stopband edge is min(antialias_cutoff_hz, target_hz / 2). A
/// target equal to the input rate returns the samples unchanged. Upsampling
/// throws UnsupportedError.
AudioSegment resample(const AudioSegment& segment, double target_hz,
                      std::optional<double> antialias_cutoff_hz = std::nullopt);

}  // namespace abshr
