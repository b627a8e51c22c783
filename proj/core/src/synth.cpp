#include "abshr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "abshr/error.hpp"
#include "abshr/iir.hpp"

namespace abshr {

namespace {

constexpr double kMinBpm = 40.0;
constexpr double kMaxBpm = 120.0;
constexpr double kFwhmToSigma = 2.3548200450309493;  // 2·√(2 ln 2)
constexpr double kRespirationDepth = 0.3;
constexpr double kEnvelopeDepth = 0.4;

void require(bool cond, const char* field, const std::string& what) {
  if (!cond) throw ArgumentError(std::string("synth field '") + field + "' " + what);
}

double mean_square(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

// Adds amp·exp(-τ²/2σ²)·cos(2πfτ) around `centre`, τ = t - centre.
void add_burst(std::vector<double>& out, double rate, double centre, double amp, double sigma,
               double freq) {
  const double reach = 5.0 * sigma;
  const auto n = static_cast<std::int64_t>(out.size());
  const auto first = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((centre - reach) * rate)));
  const auto last = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor((centre + reach) * rate)));
  for (std::int64_t i = first; i <= last; ++i) {
    const double tau = static_cast<double>(i) / rate - centre;
    out[static_cast<std::size_t>(i)] +=
        amp * std::exp(-tau * tau / (2.0 * sigma * sigma)) *
        std::cos(2.0 * std::numbers::pi * freq * tau);
  }
}

}  // namespace

void SynthSpec::validate() const {
  require(std::isfinite(duration_s) && duration_s > 0.0, "duration_s", "must be positive");
  require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, "sample_rate_hz",
          "must be positive");
  require(!hr_profile.empty(), "hr_profile", "needs at least one knot");
  for (std::size_t i = 0; i < hr_profile.size(); ++i) {
    const auto& k = hr_profile[i];
    require(k.bpm >= kMinBpm && k.bpm <= kMaxBpm, "hr_profile",
            "knot " + std::to_string(i) + " bpm " + std::to_string(k.bpm) +
                " outside [40, 120]");
    require(std::isfinite(k.time_s), "hr_profile", "knot times must be finite");
    if (i > 0) {
      require(k.time_s > hr_profile[i - 1].time_s, "hr_profile",
              "knot times must be strictly increasing");
    }
  }
  require(s1_amplitude > 0.0, "s1_amplitude", "must be positive");
  require(s2_amplitude >= 0.0, "s2_amplitude", "must be non-negative");
  require(s2_delay_s > 0.0, "s2_delay_s", "must be positive");
  require(s1_center_hz > 0.0 && s1_center_hz < sample_rate_hz / 2.0, "s1_center_hz",
          "must lie between 0 and Nyquist");
  require(s1_fwhm_s > 0.0, "s1_fwhm_s", "must be positive");
  if (gi_noise_snr_db) require(std::isfinite(*gi_noise_snr_db), "gi_noise_snr_db", "must be finite");
  if (respiration_rate_bpm) {
    require(*respiration_rate_bpm > 0.0, "respiration_rate_bpm", "must be positive");
  }
  require(motion_spike_rate_per_min >= 0.0, "motion_spike_rate_per_min", "must be non-negative");
}

double SynthSpec::hr_at(double t) const {
  if (t <= hr_profile.front().time_s) return hr_profile.front().bpm;
  if (t >= hr_profile.back().time_s) return hr_profile.back().bpm;
  auto it = std::upper_bound(hr_profile.begin(), hr_profile.end(), t,
                             [](double v, const HrKnot& k) { return v < k.time_s; });
  const HrKnot& b = *it;
  const HrKnot& a = *(it - 1);
  return a.bpm + (b.bpm - a.bpm) * (t - a.time_s) / (b.time_s - a.time_s);
}

std::vector<double> beat_times(const SynthSpec& spec) {
  spec.validate();
  // Breakpoints where the rate's slope can change.
  std::vector<double> edges{0.0};
  for (const auto& k : spec.hr_profile) {
    if (k.time_s > 0.0 && k.time_s < spec.duration_s) edges.push_back(k.time_s);
  }
  edges.push_back(spec.duration_s);

  std::vector<double> beats{0.0};
  double phase = 0.0;  // beats elapsed at the current segment start
  double next = 1.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double t0 = edges[s];
    const double len = edges[s + 1] - t0;
    const double r0 = spec.hr_at(t0) / 60.0;
    const double slope = (spec.hr_at(edges[s + 1]) / 60.0 - r0) / len;
    const double gained = r0 * len + 0.5 * slope * len * len;
    while (next <= phase + gained) {
      const double need = next - phase;
      // Root of slope/2·τ² + r0·τ - need = 0 in cancellation-free form.
      const double tau = 2.0 * need / (r0 + std::sqrt(std::max(0.0, r0 * r0 + 2.0 * slope * need)));
      const double t = t0 + tau;
      if (t >= spec.duration_s) break;
      beats.push_back(t);
      next += 1.0;
    }
    phase += gained;
  }
  return beats;
}

SynthOutput synthesize(const SynthSpec& spec) {
  spec.validate();
  const double rate = spec.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * rate));

  SynthOutput out;
  out.true_beat_times_s = beat_times(spec);
  for (std::size_t i = 1; i < out.true_beat_times_s.size(); ++i) {
    const double a = out.true_beat_times_s[i - 1];
    const double b = out.true_beat_times_s[i];
    out.true_hr.samples.push_back({0.5 * (a + b), 60.0 / (b - a), HrKind::instantaneous});
  }

  std::vector<double> heart(n, 0.0);
  const double sigma = spec.s1_fwhm_s / kFwhmToSigma;
  for (double tb : out.true_beat_times_s) {
    add_burst(heart, rate, tb, spec.s1_amplitude, sigma, spec.s1_center_hz);
    if (spec.s2_amplitude > 0.0) {
      add_burst(heart, rate, tb + spec.s2_delay_s, spec.s2_amplitude * spec.s1_amplitude, sigma,
                spec.s1_center_hz);
    }
  }
  if (spec.respiration_rate_bpm) {
    const double w = 2.0 * std::numbers::pi * *spec.respiration_rate_bpm / 60.0;
    for (std::size_t i = 0; i < n; ++i) {
      heart[i] *= 1.0 + kRespirationDepth * std::sin(w * static_cast<double>(i) / rate);
    }
  }

  std::mt19937_64 rng(spec.rng_seed);
  std::vector<double> noise;
  if (spec.gi_noise_snr_db) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> white(n);
    for (double& v : white) v = gauss(rng);
    const double band = std::min(kGiNoiseBandHz, 0.45 * rate);
    noise = filter_causal(design_butterworth_lowpass(4, band, rate), white);

    // Slow gurgling envelope in [1 - depth, 1 + depth].
    std::uniform_real_distribution<double> freq(0.05, 0.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    double f[3], ph[3];
    for (int k = 0; k < 3; ++k) {
      f[k] = freq(rng);
      ph[k] = phase(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += std::sin(2.0 * std::numbers::pi * f[k] * t + ph[k]);
      noise[i] *= 1.0 + kEnvelopeDepth * s / 3.0;
    }

    const double p_heart = mean_square(heart);
    const double p_noise = mean_square(noise);
    if (p_noise > 0.0 && p_heart > 0.0) {
      const double scale =
          std::sqrt(p_heart / std::pow(10.0, *spec.gi_noise_snr_db / 10.0) / p_noise);
      for (double& v : noise) v *= scale;
    }
  }

  std::vector<double> mix = heart;
  for (std::size_t i = 0; i < noise.size(); ++i) mix[i] += noise[i];

  const auto spikes = static_cast<std::size_t>(
      std::llround(spec.motion_spike_rate_per_min * spec.duration_s / 60.0));
  if (spikes > 0) {
    const double amp = kMotionSpikeRmsMultiple * std::sqrt(mean_square(mix));
    std::uniform_real_distribution<double> when(0.0, spec.duration_s);
    for (std::size_t s = 0; s < spikes; ++s) out.motion_spike_times_s.push_back(when(rng));
    std::sort(out.motion_spike_times_s.begin(), out.motion_spike_times_s.end());
    for (double ts : out.motion_spike_times_s) {
      add_burst(mix, rate, ts, amp, kMotionSpikeWidthS, 0.0);
    }
  }

  out.audio = AudioSegment(std::move(mix), rate, 0.0);
  if (spec.keep_components) {
    out.heart = std::move(heart);
    out.noise = std::move(noise);
  }
  return out;
}

}  // namespace abshr
