#include "abshr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "abshr/error.hpp"

namespace abshr {

RPeakAnnotations::RPeakAnnotations(std::vector<double> peak_times_s)
    : peaks_(std::move(peak_times_s)) {
  for (std::size_t i = 0; i < peaks_.size(); ++i) {
    if (!std::isfinite(peaks_[i])) {
      throw ArgumentError("R peak " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(peaks_[i] - peaks_[i - 1] > kRefractorySeconds)) {
      throw ArgumentError("R peaks " + std::to_string(i - 1) + " and " + std::to_string(i) +
                          " are not increasing by more than 0.2 s (" +
                          std::to_string(peaks_[i - 1]) + ", " + std::to_string(peaks_[i]) + ")");
    }
  }
}

HrSeries ecg_hr(const RPeakAnnotations& annotations) {
  HrSeries out;
  const auto& t = annotations.peak_times_s();
  for (std::size_t i = 1; i < t.size(); ++i) {
    out.samples.push_back({0.5 * (t[i] + t[i - 1]), 60.0 / (t[i] - t[i - 1]),
                           HrKind::instantaneous});
  }
  return out;
}

std::vector<double> window_grid(std::size_t sample_count, double sample_rate_hz,
                                double start_time_s, const PipelineConfig& config) {
  const auto len = static_cast<std::size_t>(std::llround(config.window_len_s * sample_rate_hz));
  const auto hop = static_cast<std::size_t>(std::llround(config.hop_s() * sample_rate_hz));
  std::vector<double> starts;
  if (len == 0 || hop == 0 || sample_count < len) return starts;
  const std::size_t count = (sample_count - len) / hop + 1;
  for (std::size_t k = 0; k < count; ++k) {
    starts.push_back(start_time_s + static_cast<double>(k * hop) / sample_rate_hz);
  }
  return starts;
}

HrSeries windowed_ahr(const HrSeries& ihr, const std::vector<double>& window_starts_s,
                      const PipelineConfig& config) {
  HrSeries out;
  for (double start : window_starts_s) {
    if (auto s = compute_ahr(ihr, start, config)) out.samples.push_back(*s);
  }
  return out;
}

Alignment align(const HrSeries& pred, const HrSeries& truth, double tolerance_s) {
  struct Candidate {
    double gap;
    std::size_t p;
    std::size_t t;
  };
  std::vector<Candidate> cand;
  const auto& ps = pred.samples;
  const auto& ts = truth.samples;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    while (lo < ts.size() && ts[lo].time_s < ps[i].time_s - tolerance_s) ++lo;
    for (std::size_t j = lo; j < ts.size() && ts[j].time_s <= ps[i].time_s + tolerance_s; ++j) {
      cand.push_back({std::abs(ts[j].time_s - ps[i].time_s), i, j});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.gap, a.p, a.t) < std::tie(b.gap, b.p, b.t);
  });

  std::vector<std::ptrdiff_t> match(ps.size(), -1);
  std::vector<char> used(ts.size(), 0);
  for (const auto& c : cand) {
    if (match[c.p] >= 0 || used[c.t]) continue;
    match[c.p] = static_cast<std::ptrdiff_t>(c.t);
    used[c.t] = 1;
  }

  Alignment out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (match[i] < 0) {
      ++out.unpaired_predictions;
      continue;
    }
    out.pairs.push_back({ps[i].time_s, ps[i].bpm, ts[static_cast<std::size_t>(match[i])].bpm});
  }
  out.unpaired_truths = ts.size() - out.pairs.size();
  return out;
}

EvalReport metrics(const std::vector<PairedSample>& pairs) {
  if (pairs.empty()) throw ArgumentError("metrics are undefined for zero paired samples");
  EvalReport r;
  double directional = 0.0, absolute = 0.0, percentage = 0.0;
  for (const auto& p : pairs) {
    const double diff = p.hr_audio - p.hr_ecg;
    directional += diff;
    absolute += std::abs(diff);
    percentage += std::abs(diff) / p.hr_ecg;
    r.bland_altman.push_back({p.hr_ecg, 0.5 * (p.hr_audio + p.hr_ecg), diff});
  }
  const double n = static_cast<double>(pairs.size());
  r.mde_bpm = directional / n;
  r.mae_bpm = absolute / n;
  r.mape_pct = 100.0 * percentage / n;
  r.n_pairs = pairs.size();
  r.pairs = pairs;
  return r;
}

std::vector<GroupReport> aggregate(const std::vector<EvalReport>& reports, GroupBy key) {
  std::map<std::string, std::vector<PairedSample>> pools;
  std::map<std::string, Missingness> missing;
  std::map<std::string, bool> has_missing;
  for (const auto& r : reports) {
    if (!r.group_keys) throw ArgumentError("report without group keys cannot be aggregated");
    const std::string& k = key == GroupBy::participant ? r.group_keys->participant
                                                       : r.group_keys->day;
    auto& pool = pools[k];
    pool.insert(pool.end(), r.pairs.begin(), r.pairs.end());
    if (r.missingness) {
      missing[k] += *r.missingness;
      has_missing[k] = true;
    }
  }
  std::vector<GroupReport> out;
  for (auto& [k, pool] : pools) {
    if (pool.empty()) continue;
    GroupReport g{k, metrics(pool)};
    if (has_missing[k]) g.report.missingness = missing[k];
    GroupKeys keys;
    (key == GroupBy::participant ? keys.participant : keys.day) = k;
    g.report.group_keys = keys;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace abshr
