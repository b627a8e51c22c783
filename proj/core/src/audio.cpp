#include "abshr/audio.hpp"

#include <cmath>
#include <string>

#include "abshr/error.hpp"

namespace abshr {

AudioSegment::AudioSegment(std::vector<double> samples, double sample_rate_hz,
                           double start_time_s)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      start_time_s_(start_time_s) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw ArgumentError("sample rate must be positive and finite, got " +
                        std::to_string(sample_rate_hz_));
  }
  if (!std::isfinite(start_time_s_)) {
    throw ArgumentError("segment start time must be finite");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw ArgumentError("non-finite sample at index " + std::to_string(i));
    }
  }
}

AudioSegment AudioSegment::slice(std::size_t first, std::size_t count) const {
  if (first > samples_.size() || count > samples_.size() - first) {
    throw ArgumentError("slice [" + std::to_string(first) + ", " +
                        std::to_string(first + count) +
                        ") exceeds segment of length " +
                        std::to_string(samples_.size()));
  }
  std::vector<double> out(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                          samples_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return AudioSegment(std::move(out), sample_rate_hz_,
                      start_time_s_ + static_cast<double>(first) / sample_rate_hz_);
}

NormalizationStats compute_stats(std::span<const double> samples) {
  if (samples.empty()) {
    throw ArgumentError("cannot compute statistics of an empty segment");
  }
  const double first = samples.front();
  bool constant = true;
  for (double x : samples) {
    if (x != first) {
      constant = false;
      break;
    }
  }
  if (constant) return {first, 0.0};

  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / n)};
}

AudioSegment zscore(const AudioSegment& segment, const NormalizationStats& stats) {
  if (!(stats.std_dev > 0.0)) {
    throw DegenerateInputError(
        "z-score undefined: standard deviation is zero (constant input)");
  }
  std::vector<double> out(segment.size());
  const auto& in = segment.samples();
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = (in[i] - stats.mean) / stats.std_dev;
  }
  return segment.with_samples(std::move(out));
}

}  // namespace abshr
