#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace abshr {

/// Uniformly sampled mono signal anchored on the recording clock.
///
/// Construction validates the invariants (positive rate, finite samples), so
/// every AudioSegment in circulation is well formed.
class AudioSegment {
 public:
  AudioSegment() = default;
  AudioSegment(std::vector<double> samples, double sample_rate_hz,
               double start_time_s = 0.0);

  const std::vector<double>& samples() const noexcept { return samples_; }
  std::span<const double> view() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double start_time_s() const noexcept { return start_time_s_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  // Same rate and clock, new sample values.
  AudioSegment with_samples(std::vector<double> samples) const {
    return AudioSegment(std::move(samples), sample_rate_hz_, start_time_s_);
  }
  // Copy of [first, first + count) with the start time advanced accordingly.
  AudioSegment slice(std::size_t first, std::size_t count) const;
  AudioSegment shifted(double dt_s) const {
    return AudioSegment(samples_, sample_rate_hz_, start_time_s_ + dt_s);
  }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_ = 1.0;
  double start_time_s_ = 0.0;
};

struct NormalizationStats {
  double mean = 0.0;
  double std_dev = 0.0;  // population convention (divide by N)
};

NormalizationStats compute_stats(std::span<const double> samples);
inline NormalizationStats compute_stats(const AudioSegment& segment) {
  return compute_stats(segment.view());
}

/// (x - mean) / std_dev per sample. Throws DegenerateInputError when
/// std_dev == 0; the caller is expected to reject such windows.
AudioSegment zscore(const AudioSegment& segment, const NormalizationStats& stats);

}  // namespace abshr
