#include "abshr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "abshr/error.hpp"
#include "abshr/iir.hpp"
#include "abshr/peaks.hpp"
#include "abshr/resample.hpp"

namespace abshr {

namespace {

std::size_t to_samples(double seconds, double rate_hz) {
  return static_cast<std::size_t>(std::llround(seconds * rate_hz));
}

void require(bool cond, const char* field, const std::string& what) {
  if (!cond) throw ArgumentError(std::string("config field '") + field + "' " + what);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct WindowOutcome {
  std::optional<BeatSeries> beats;
  HrSeries ihr;
  std::optional<HrSample> ahr;
  WindowStatus status = WindowStatus::accepted;
};

}  // namespace

void PipelineConfig::validate() const {
  require(window_len_s > 0.0, "window_len_s", "must be positive");
  require(overlap_s >= 0.0 && overlap_s < window_len_s, "overlap_s",
          "must lie in [0, window_len_s)");
  require(artifact_sigma > 0.0, "artifact_sigma", "must be positive");
  require(butter_order >= 1, "butter_order", "must be >= 1");
  require(butter_cutoff_hz > 0.0, "butter_cutoff_hz", "must be positive");
  require(antialias_cutoff_hz > 0.0, "antialias_cutoff_hz", "must be positive");
  require(target_rate_hz > 0.0, "target_rate_hz", "must be positive");
  require(butter_cutoff_hz < target_rate_hz / 2.0, "butter_cutoff_hz",
          "must be below the target Nyquist frequency");
  require(levels >= 1, "levels", "must be >= 1");
  require(min_peak_distance_s > 0.0, "min_peak_distance_s", "must be positive");
  require(min_hr_bpm > 0.0, "min_hr_bpm", "must be positive");
  require(outlier_sigma > 0.0, "outlier_sigma", "must be positive");
  require(std_window_len >= 1, "std_window_len", "must be >= 1");
  require(smooth_window_len >= 1, "smooth_window_len", "must be >= 1");
  require(sigma_estimator == "mean_abs_dev" || sigma_estimator == "median_abs_dev_scaled",
          "sigma_estimator", "must be 'mean_abs_dev' or 'median_abs_dev_scaled'");
  try {
    wavelet_by_name(wavelet);
  } catch (const ArgumentError& e) {
    require(false, "wavelet", e.what());
  }
  const std::size_t window_samples = to_samples(window_len_s, target_rate_hz);
  require(to_samples(hop_s(), target_rate_hz) >= 1, "overlap_s",
          "leaves a hop shorter than one sample");
  require(levels <= max_dwt_level(window_samples), "levels",
          "is too deep for the window length");
}

ThresholdPolicy PipelineConfig::threshold_policy() const {
  ThresholdPolicy p;
  p.sigma_estimator = sigma_estimator == "median_abs_dev_scaled"
                          ? SigmaEstimator::median_abs_dev_scaled
                          : SigmaEstimator::mean_abs_dev;
  return p;
}

std::string_view to_string(WindowStatus status) {
  switch (status) {
    case WindowStatus::accepted:
      return "accepted";
    case WindowStatus::rejected_motion_artifact:
      return "rejected_motion_artifact";
    case WindowStatus::rejected_constant:
      return "rejected_constant";
    case WindowStatus::rejected_error:
      return "rejected_error";
  }
  return "unknown";
}

WindowStatus window_status_from_string(std::string_view s) {
  for (auto st : {WindowStatus::accepted, WindowStatus::rejected_motion_artifact,
                  WindowStatus::rejected_constant, WindowStatus::rejected_error}) {
    if (to_string(st) == s) return st;
  }
  throw ArgumentError("unknown window status '" + std::string(s) + "'");
}

std::vector<AnalysisWindow> segment_windows(const AudioSegment& segment,
                                            const PipelineConfig& config) {
  const double rate = segment.sample_rate_hz();
  const std::size_t len = to_samples(config.window_len_s, rate);
  const std::size_t hop = to_samples(config.hop_s(), rate);
  std::vector<AnalysisWindow> out;
  if (len == 0 || hop == 0 || segment.size() < len) return out;

  const std::size_t count = (segment.size() - len) / hop + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    AnalysisWindow w;
    w.index = k;
    AudioSegment raw = segment.slice(k * hop, len);
    w.stats = compute_stats(raw);
    if (w.stats.std_dev == 0.0) {
      w.status = WindowStatus::rejected_constant;
      w.segment = std::move(raw);
    } else {
      w.segment = zscore(raw, w.stats);
      const auto& z = w.segment.samples();
      const bool spike = std::any_of(z.begin(), z.end(), [&](double v) {
        return std::abs(v) > config.artifact_sigma;
      });
      w.status = spike ? WindowStatus::rejected_motion_artifact : WindowStatus::accepted;
    }
    out.push_back(std::move(w));
  }
  return out;
}

AudioSegment denoise(const AnalysisWindow& window, const PipelineConfig& config) {
  const IirFilter lowpass = design_butterworth_lowpass(
      config.butter_order, config.butter_cutoff_hz, window.segment.sample_rate_hz());
  const AudioSegment filtered = filter_zero_phase(lowpass, window.segment);
  return filtered.with_samples(denoise_window(filtered.view(), wavelet_by_name(config.wavelet),
                                              config.levels, config.threshold_policy()));
}

BeatSeries detect_peaks(const AudioSegment& denoised, std::size_t window_index,
                        const PipelineConfig& config) {
  const double rate = denoised.sample_rate_hz();
  const auto distance = static_cast<std::size_t>(
      std::ceil(config.min_peak_distance_s * rate - 1e-9));
  BeatSeries beats;
  beats.window_index = window_index;
  for (std::size_t idx : find_peaks(denoised.view(), config.min_peak_height, distance)) {
    beats.beat_times_s.push_back(denoised.start_time_s() + static_cast<double>(idx) / rate);
  }
  return beats;
}

HrSeries compute_ihr(const BeatSeries& beats, const PipelineConfig& config,
                     const TimeRange& owned) {
  HrSeries out;
  const auto& t = beats.beat_times_s;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    const double mid = 0.5 * (t[i] + t[i - 1]);
    if (!owned.contains(mid)) continue;
    ++out.missingness.intervals_total;
    const double bpm = 60.0 / dt;
    if (bpm < config.min_hr_bpm) {
      ++out.missingness.intervals_rejected;
      continue;
    }
    out.samples.push_back({mid, bpm, HrKind::instantaneous});
  }
  return out;
}

std::optional<HrSample> compute_ahr(const HrSeries& window_ihr, double window_start_s,
                                    const PipelineConfig& config) {
  const TimeRange counted{window_start_s, window_start_s + config.hop_s()};
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : window_ihr.samples) {
    if (s.kind != HrKind::instantaneous || !counted.contains(s.time_s)) continue;
    sum += s.bpm;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return HrSample{window_start_s + config.window_len_s / 2.0, sum / static_cast<double>(n),
                  HrKind::window_average};
}

std::optional<HrSample> compute_ahr(const HrSeries& window_ihr, const AnalysisWindow& window,
                                    const PipelineConfig& config) {
  return compute_ahr(window_ihr, window.start_time_s(), config);
}

HrSeries postprocess_ahr(const HrSeries& series, const PipelineConfig& config) {
  HrSeries out = series;
  const std::size_t n = series.samples.size();
  if (n < 2) return out;

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = series.samples[i].bpm;

  auto neighbourhood = [n](std::size_t i, int len) {
    const auto left = static_cast<std::size_t>(len / 2);
    const auto right = static_cast<std::size_t>((len - 1) / 2);
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(n - 1, i + right);
    return std::pair{lo, hi};
  };

  std::vector<double> cleaned = x;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = neighbourhood(i, config.std_window_len);
    const std::size_t count = hi - lo + 1;
    // Two samples are symmetric about their mean, so neither can be singled out.
    if (count < 3) continue;
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += x[j];
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) ss += (x[j] - mean) * (x[j] - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(count));
    const double others_mean = (sum - x[i]) / static_cast<double>(count - 1);
    if (std::abs(x[i] - others_mean) > config.outlier_sigma * sigma) {
      cleaned[i] = median(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(lo),
                                              x.begin() + static_cast<std::ptrdiff_t>(hi + 1)));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = neighbourhood(i, config.smooth_window_len);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += cleaned[j];
    out.samples[i].bpm = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

Missingness recount_missingness(const std::vector<WindowRecord>& records) {
  Missingness m;
  for (const auto& r : records) {
    ++m.windows_total;
    if (r.status != WindowStatus::accepted) ++m.windows_rejected;
    else if (!r.ahr_bpm) ++m.windows_without_ahr;
    m.intervals_total += r.intervals_total;
    m.intervals_rejected += r.intervals_rejected;
  }
  return m;
}

PipelineResult run_pipeline(const AudioSegment& raw, const PipelineConfig& config,
                            const RunOptions& options) {
  config.validate();
  if (raw.empty()) throw ArgumentError("input audio is empty");
  if (raw.duration_s() < config.window_len_s) {
    throw ArgumentError("input audio lasts " + std::to_string(raw.duration_s()) +
                        " s, shorter than one " + std::to_string(config.window_len_s) +
                        " s analysis window");
  }

  const AudioSegment audio =
      resample(raw, config.target_rate_hz, config.antialias_cutoff_hz);
  const std::vector<AnalysisWindow> windows = segment_windows(audio, config);
  const std::size_t count = windows.size();

  // Beats depend only on the window itself; iHR ownership depends on whether
  // the following window is usable, so it is resolved after all beats exist.
  std::vector<WindowOutcome> outcome(count);
  auto process = [&](std::size_t k) {
    const AnalysisWindow& w = windows[k];
    outcome[k].status = w.status;
    if (w.status != WindowStatus::accepted) return;
    try {
      outcome[k].beats = detect_peaks(denoise(w, config), w.index, config);
    } catch (const Error&) {
      outcome[k].status = WindowStatus::rejected_error;
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) process(k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < count; k += threads) process(k);
      });
    }
  }

  PipelineResult result;
  for (std::size_t k = 0; k < count; ++k) {
    const AnalysisWindow& w = windows[k];
    WindowRecord rec;
    rec.index = w.index;
    rec.start_s = w.start_time_s();
    rec.status = outcome[k].status;
    rec.stats = w.stats;
    if (rec.status == WindowStatus::accepted) {
      const BeatSeries& beats = *outcome[k].beats;
      const bool next_usable =
          k + 1 < count && outcome[k + 1].status == WindowStatus::accepted;
      // A window owns the iHR intervals centred in its first hop, and also its
      // overlap tail when no usable window follows.
      TimeRange owned{rec.start_s, next_usable ? windows[k + 1].start_time_s() : INFINITY};
      HrSeries ihr = compute_ihr(beats, config, owned);
      rec.beats = beats.beat_times_s.size();
      rec.intervals_total = ihr.missingness.intervals_total;
      rec.intervals_rejected = ihr.missingness.intervals_rejected;
      if (auto ahr = compute_ahr(ihr, w, config)) {
        rec.ahr_bpm = ahr->bpm;
        result.ahr_raw.samples.push_back(*ahr);
      }
      result.ihr.samples.insert(result.ihr.samples.end(), ihr.samples.begin(),
                                ihr.samples.end());
      result.beats.push_back(beats);
    }
    result.windows.push_back(rec);
  }

  result.missingness = recount_missingness(result.windows);
  result.ihr.missingness = result.missingness;
  result.ahr_raw.missingness = result.missingness;
  result.ahr = postprocess_ahr(result.ahr_raw, config);
  return result;
}

}  // namespace abshr
