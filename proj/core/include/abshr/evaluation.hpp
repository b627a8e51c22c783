#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "abshr/hr.hpp"
#include "abshr/pipeline.hpp"

namespace abshr {

/// ECG R-peak timestamps on the audio clock.
class RPeakAnnotations {
 public:
  // Minimum accepted spacing between consecutive R peaks.
  static constexpr double kRefractorySeconds = 0.2;

  RPeakAnnotations() = default;
  // Throws ArgumentError unless strictly increasing with spacing > 0.2 s.
  explicit RPeakAnnotations(std::vector<double> peak_times_s);

  const std::vector<double>& peak_times_s() const { return peaks_; }
  std::size_t size() const { return peaks_.size(); }

 private:
  std::vector<double> peaks_;
};

/// Ground-truth iHR: 60/RR per consecutive pair at the interval midpoint.
/// No heart-rate floor is applied. Fewer than two peaks gives an empty series.
HrSeries ecg_hr(const RPeakAnnotations& annotations);

/// Ground-truth aHR on the pipeline's window grid: for each window start, the
/// mean iHR over midpoints in the first window_len_s - overlap_s seconds.
HrSeries windowed_ahr(const HrSeries& ihr, const std::vector<double>& window_starts_s,
                      const PipelineConfig& config);

/// Window start times the pipeline produces for `sample_count` samples at
/// `sample_rate_hz` starting at `start_time_s`.
std::vector<double> window_grid(std::size_t sample_count, double sample_rate_hz,
                                double start_time_s, const PipelineConfig& config);

struct PairedSample {
  double time_s = 0.0;
  double hr_audio = 0.0;
  double hr_ecg = 0.0;
};

struct Alignment {
  std::vector<PairedSample> pairs;  // ordered by prediction time
  std::size_t unpaired_predictions = 0;
  std::size_t unpaired_truths = 0;
};

/// One-to-one nearest-in-time matching within `tolerance_s`. Candidate pairs
/// are accepted in order of increasing time gap, so every truth sample is used
/// at most once and each prediction takes the closest truth still available.
Alignment align(const HrSeries& pred, const HrSeries& truth, double tolerance_s);

struct BlandAltmanRecord {
  double gt_bpm = 0.0;
  double mean_bpm = 0.0;  // (audio + ecg) / 2
  double diff_bpm = 0.0;  // audio - ecg
};

struct GroupKeys {
  std::string participant;
  std::string day;
};

enum class GroupBy { participant, day };

struct EvalReport {
  double mde_bpm = 0.0;
  double mae_bpm = 0.0;
  double mape_pct = 0.0;
  std::size_t n_pairs = 0;
  std::vector<PairedSample> pairs;
  std::vector<BlandAltmanRecord> bland_altman;
  std::optional<Missingness> missingness;
  std::optional<GroupKeys> group_keys;
};

/// Mean directional, mean absolute and mean absolute percentage error of
/// audio-derived against ECG-derived rates. Throws ArgumentError on zero pairs.
EvalReport metrics(const std::vector<PairedSample>& pairs);

struct GroupReport {
  std::string key;
  EvalReport report;
};

/// Pools the pairs of every report sharing a key and recomputes the metrics
/// over each pool. Groups are returned sorted by key. Reports without
/// group_keys throw ArgumentError.
std::vector<GroupReport> aggregate(const std::vector<EvalReport>& reports, GroupBy key);

// Default pairing tolerance for instantaneous rates.
inline constexpr double kIhrPairingToleranceS = 0.5;

}  // namespace abshr
