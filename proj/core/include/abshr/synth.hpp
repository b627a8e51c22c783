#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abshr/audio.hpp"
#include "abshr/hr.hpp"

namespace abshr {

struct HrKnot {
  double time_s = 0.0;
  double bpm = 0.0;
};

/// Parameters of a synthetic abdominal recording with known heart beats.
struct SynthSpec {
  double duration_s = 60.0;
  double sample_rate_hz = 4000.0;
  // Piecewise-linear BPM against time, held constant outside the knots.
  std::vector<HrKnot> hr_profile{{0.0, 75.0}};
  double s1_amplitude = 1.0;
  double s2_amplitude = 0.5;  // relative to s1
  double s2_delay_s = 0.3;
  double s1_center_hz = 50.0;
  double s1_fwhm_s = 0.06;
  std::optional<double> gi_noise_snr_db;
  std::optional<double> respiration_rate_bpm;
  double motion_spike_rate_per_min = 0.0;
  std::uint64_t rng_seed = 0;
  // Keep the separate heart and noise tracks in the output.
  bool keep_components = false;

  // Throws ArgumentError naming the offending field.
  void validate() const;
  double hr_at(double t) const;
};

struct SynthOutput {
  AudioSegment audio;
  std::vector<double> true_beat_times_s;
  HrSeries true_hr;  // 60/interval at interval midpoints
  std::vector<double> motion_spike_times_s;
  std::vector<double> heart;  // only with keep_components
  std::vector<double> noise;  // GI noise only, same condition
};

// Motion-spike peak height as a multiple of the heart+noise RMS.
inline constexpr double kMotionSpikeRmsMultiple = 30.0;
inline constexpr double kMotionSpikeWidthS = 0.001;
// Upper edge of the synthetic GI noise band.
inline constexpr double kGiNoiseBandHz = 500.0;

/// S1 beats are placed where the integrated rate ∫hr/60 dt crosses each
/// integer, starting with a beat at t = 0. Each S1 is a cosine-phased
/// Gaussian tone burst peaking exactly at its beat time; S2 follows at
/// s2_delay_s. GI noise is lowpass Gaussian noise under a slow random
/// envelope, scaled to the requested SNR over the whole record. Identical
/// specs give bit-identical output.
SynthOutput synthesize(const SynthSpec& spec);

/// Beat times implied by the profile alone.
std::vector<double> beat_times(const SynthSpec& spec);

}  // namespace abshr
