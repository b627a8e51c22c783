#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "abshr/audio.hpp"
#include "abshr/hr.hpp"
#include "abshr/wavelet.hpp"

namespace abshr {

/// Every tunable of the estimator; defaults reproduce the published setup.
struct PipelineConfig {
  double window_len_s = 10.0;
  double overlap_s = 2.0;
  double artifact_sigma = 10.0;
  int butter_order = 5;
  double butter_cutoff_hz = 200.0;
  double antialias_cutoff_hz = 2000.0;
  double target_rate_hz = 4000.0;
  std::string wavelet = "coif4";
  int levels = 5;
  std::string sigma_estimator = "mean_abs_dev";
  double min_peak_distance_s = 0.65;
  double min_peak_height = 1.2;
  double min_hr_bpm = 45.0;
  double outlier_sigma = 2.0;
  int std_window_len = 5;
  int smooth_window_len = 5;

  // Throws ArgumentError naming the first offending field.
  void validate() const;

  double hop_s() const { return window_len_s - overlap_s; }
  // Fastest rate the distance constraint lets through (≈92.3 BPM by default).
  double max_hr_bpm() const { return 60.0 / min_peak_distance_s; }
  ThresholdPolicy threshold_policy() const;

  bool operator==(const PipelineConfig&) const = default;
};

enum class WindowStatus { accepted, rejected_motion_artifact, rejected_constant, rejected_error };

std::string_view to_string(WindowStatus status);
WindowStatus window_status_from_string(std::string_view s);

struct AnalysisWindow {
  std::size_t index = 0;
  AudioSegment segment;  // z-scored samples; raw samples when rejected_constant
  WindowStatus status = WindowStatus::accepted;
  NormalizationStats stats;

  double start_time_s() const { return segment.start_time_s(); }
};

struct BeatSeries {
  std::vector<double> beat_times_s;  // absolute recording time
  std::size_t window_index = 0;
};

/// Half-open interval of absolute time.
struct TimeRange {
  double begin = -INFINITY;
  double end = INFINITY;
  bool contains(double t) const { return t >= begin && t < end; }
};

/// Splits a segment already at the target rate into overlapping windows,
/// z-scores each with its own statistics, and applies the artifact gate
/// (any |z| > artifact_sigma rejects the window). A trailing partial window
/// is dropped; a segment shorter than one window yields no windows.
std::vector<AnalysisWindow> segment_windows(const AudioSegment& segment,
                                            const PipelineConfig& config);

/// Butterworth lowpass followed by the wavelet denoiser on one window.
AudioSegment denoise(const AnalysisWindow& window, const PipelineConfig& config);

/// Peak picking on a denoised window (in z-score units), returning absolute
/// beat times.
BeatSeries detect_peaks(const AudioSegment& denoised, std::size_t window_index,
                        const PipelineConfig& config);

/// One iHR sample (60 / P-P) per consecutive beat pair, stamped at the
/// interval midpoint. Intervals below min_hr_bpm are dropped and counted as
/// rejected. Only intervals whose midpoint lies in `owned` are considered.
HrSeries compute_ihr(const BeatSeries& beats, const PipelineConfig& config,
                     const TimeRange& owned = {});

/// Mean of the window's iHR samples whose midpoints fall in its first
/// window_len_s - overlap_s seconds, stamped at the window centre.
std::optional<HrSample> compute_ahr(const HrSeries& window_ihr, const AnalysisWindow& window,
                                    const PipelineConfig& config);
std::optional<HrSample> compute_ahr(const HrSeries& window_ihr, double window_start_s,
                                    const PipelineConfig& config);

/// Outlier replacement then smoothing over a window-average series.
///
/// Pass 1 flags x[i] when |x[i] - mean(neighbours)| > outlier_sigma·σ, where
/// the neighbourhood is the centred std_window_len window (shrunk at the
/// edges), σ its population deviation, and the mean excludes x[i] itself.
/// Flagged samples take the neighbourhood median. Pass 2 is a centred moving
/// average of smooth_window_len samples, shrunk at the edges.
HrSeries postprocess_ahr(const HrSeries& series, const PipelineConfig& config);

/// Persisted per-window outcome, sufficient to recount missingness.
struct WindowRecord {
  std::size_t index = 0;
  double start_s = 0.0;
  WindowStatus status = WindowStatus::accepted;
  NormalizationStats stats;
  std::size_t beats = 0;
  std::size_t intervals_total = 0;
  std::size_t intervals_rejected = 0;
  std::optional<double> ahr_bpm;  // before post-processing
};

Missingness recount_missingness(const std::vector<WindowRecord>& records);

struct PipelineResult {
  HrSeries ihr;
  HrSeries ahr;      // post-processed
  HrSeries ahr_raw;  // per-window means before post-processing
  std::vector<WindowRecord> windows;
  std::vector<BeatSeries> beats;  // accepted windows only, by window index
  Missingness missingness;
};

struct RunOptions {
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// The full estimator: resample, window and gate, Butterworth, wavelet
/// denoising, peak detection, iHR with the HR floor, aHR with overlap
/// exclusion, aHR post-processing. A failing window is recorded as
/// rejected_error and never aborts the run. Output is independent of
/// `options.threads`.
PipelineResult run_pipeline(const AudioSegment& raw, const PipelineConfig& config,
                            const RunOptions& options = {});

}  // namespace abshr
