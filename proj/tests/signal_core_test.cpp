#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <random>

#include "abshr/audio.hpp"
#include "abshr/error.hpp"
#include "abshr/iir.hpp"
#include "abshr/resample.hpp"
#include "abshr/wav.hpp"
#include "test_support.hpp"

using namespace abshr;
using namespace abshr::testing;

namespace {

// Analog Butterworth prototype evaluated at the pre-warped frequency.
double analytic_butter_mag2(double f, double fc, double fs, int order) {
  const double ratio = std::tan(M_PI * f / fs) / std::tan(M_PI * fc / fs);
  return 1.0 / (1.0 + std::pow(ratio, 2 * order));
}

}  // namespace

TEST(Stats, ConstantHasZeroSpread) {
  const std::vector<double> x{1, 1, 1, 1};
  const auto s = compute_stats(x);
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.std_dev, 0.0);
}

TEST(Stats, SymmetricPair) {
  const std::vector<double> x{-1, 1};
  const auto s = compute_stats(x);
  EXPECT_DOUBLE_EQ(s.mean, 0.0);
  EXPECT_DOUBLE_EQ(s.std_dev, 1.0);
}

TEST(Stats, MatchesTwoPassReference) {
  const auto x = random_signal(4096, 11, 3.0);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(x.size()));
  const auto s = compute_stats(x);
  EXPECT_NEAR(s.mean, mean, 1e-12 * std::max(1.0, std::abs(mean)));
  EXPECT_NEAR(s.std_dev, sd, 1e-12 * sd);
}

TEST(Stats, EmptyIsAnError) {
  EXPECT_THROW(compute_stats(std::vector<double>{}), ArgumentError);
}

TEST(Zscore, HandExample) {
  const AudioSegment seg({0.0, 2.0}, 100.0);
  const auto z = zscore(seg, {1.0, 1.0});
  EXPECT_EQ(z.samples(), (std::vector<double>{-1.0, 1.0}));
}

TEST(Zscore, IdempotentOnStandardized) {
  const AudioSegment seg(random_signal(1000, 3), 100.0);
  const auto z = zscore(seg, compute_stats(seg));
  const auto zz = zscore(z, compute_stats(z));
  EXPECT_LT(max_abs_diff(zz.samples(), z.samples()), 1e-12);
}

TEST(Zscore, RoundTripStats) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = random_signal(257 + seed * 31, seed, 5.0);
    for (auto& v : x) v += 7.0;
    const AudioSegment seg(x, 4000.0);
    const auto s = compute_stats(zscore(seg, compute_stats(seg)));
    EXPECT_NEAR(s.mean, 0.0, 1e-9);
    EXPECT_NEAR(s.std_dev, 1.0, 1e-9);
  }
}

TEST(Zscore, UndoRecoversInput) {
  const auto x = random_signal(2048, 21, 4.0);
  const AudioSegment seg(x, 4000.0);
  const auto st = compute_stats(seg);
  const auto z = zscore(seg, st);
  std::vector<double> back(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) back[i] = z.samples()[i] * st.std_dev + st.mean;
  EXPECT_LT(rel_l2(back, x), 1e-10);
}

TEST(Zscore, ZeroSpreadIsDegenerate) {
  const AudioSegment seg({2.0, 2.0, 2.0}, 100.0);
  EXPECT_THROW(zscore(seg, compute_stats(seg)), DegenerateInputError);
}

TEST(AudioSegment, RejectsBadInput) {
  EXPECT_THROW(AudioSegment({1.0}, 0.0), ArgumentError);
  EXPECT_THROW(AudioSegment({1.0, NAN}, 10.0), ArgumentError);
}

TEST(AudioSegment, SliceCarriesTime) {
  const AudioSegment seg(random_signal(100, 1), 10.0, 2.0);
  const auto s = seg.slice(30, 10);
  EXPECT_EQ(s.size(), 10u);
  EXPECT_DOUBLE_EQ(s.start_time_s(), 5.0);
  EXPECT_EQ(s.samples()[0], seg.samples()[30]);
}

TEST(Butterworth, DcAndCutoff) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  EXPECT_NEAR(f.magnitude(0.0), 1.0, 1e-9);
  EXPECT_NEAR(f.magnitude(200.0), 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_TRUE(f.is_stable());
  EXPECT_EQ(f.sections.size(), 3u);
}

TEST(Butterworth, MatchesAnalyticPrototype) {
  for (int order : {1, 2, 3, 4, 5, 8}) {
    const auto f = design_butterworth_lowpass(order, 200.0, 4000.0);
    for (double freq : {10.0, 50.0, 150.0, 200.0, 400.0, 1000.0, 1900.0}) {
      const double expected = analytic_butter_mag2(freq, 200.0, 4000.0, order);
      EXPECT_NEAR(std::norm(f.response(freq)), expected, 1e-12)
          << "order " << order << " at " << freq << " Hz";
    }
  }
}

TEST(Butterworth, StableAcrossDesignSpace) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> frac(0.001, 0.999);
  for (int i = 0; i < 500; ++i) {
    const int order = 1 + static_cast<int>(rng() % 10);
    const double fs = 4000.0;
    const auto f = design_butterworth_lowpass(order, frac(rng) * fs / 2.0, fs);
    for (const auto& p : f.poles()) ASSERT_LT(std::abs(p), 1.0);
  }
}

TEST(Butterworth, MonotoneStopband) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  double prev = f.magnitude(200.0);
  for (double freq = 210.0; freq < 2000.0; freq += 10.0) {
    const double m = f.magnitude(freq);
    EXPECT_LT(m, prev);
    prev = m;
  }
}

TEST(Butterworth, InvalidDesigns) {
  EXPECT_THROW(design_butterworth_lowpass(0, 200.0, 4000.0), ArgumentError);
  EXPECT_THROW(design_butterworth_lowpass(5, 2000.0, 4000.0), DesignError);
  EXPECT_THROW(design_butterworth_lowpass(5, 0.0, 4000.0), DesignError);
  EXPECT_THROW(design_butterworth_lowpass(5, -3.0, 4000.0), DesignError);
}

TEST(Butterworth, CausalImpulseMatchesResponse) {
  // DTFT of a long impulse response equals the analytic response.
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  std::vector<double> imp(8192, 0.0);
  imp[0] = 1.0;
  const auto h = filter_causal(f, imp);
  for (double freq : {0.0, 100.0, 300.0}) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      acc += h[n] * std::polar(1.0, -2.0 * M_PI * freq * static_cast<double>(n) / 4000.0);
    }
    EXPECT_NEAR(std::abs(acc - f.response(freq)), 0.0, 1e-9);
  }
}

TEST(ZeroPhase, ConstantPreserved) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  const std::vector<double> x(500, 3.25);
  const auto y = filter_zero_phase(f, x);
  for (double v : y) EXPECT_NEAR(v, 3.25, 1e-10);
}

TEST(ZeroPhase, PassbandSineUsesSquaredMagnitude) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  const auto y = filter_zero_phase(f, sine(8000, 50.0, 4000.0));
  const double expected = analytic_butter_mag2(50.0, 200.0, 4000.0, 5);
  EXPECT_NEAR(interior_amplitude(y, 1000), expected, 0.01 * expected);
}

TEST(ZeroPhase, StopbandSineSuppressed) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  const auto y = filter_zero_phase(f, sine(8000, 1000.0, 4000.0));
  EXPECT_LT(analytic_butter_mag2(1000.0, 200.0, 4000.0, 5), 1e-3);
  EXPECT_LT(interior_amplitude(y, 1000), 1e-3);
}

TEST(ZeroPhase, NoPhaseShift) {
  // A passband sine comes out aligned with the input, scaled only.
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  const auto x = sine(8000, 30.0, 4000.0);
  const auto y = filter_zero_phase(f, x);
  const double g = analytic_butter_mag2(30.0, 200.0, 4000.0, 5);
  for (std::size_t i = 1000; i < 7000; ++i) EXPECT_NEAR(y[i], g * x[i], 1e-4);
}

TEST(ZeroPhase, TimeReversalSymmetric) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto x = random_signal(1000 + seed * 17, seed);
    auto y = filter_zero_phase(f, x);
    std::reverse(x.begin(), x.end());
    auto yr = filter_zero_phase(f, x);
    std::reverse(yr.begin(), yr.end());
    EXPECT_LT(max_abs_diff(y, yr), 1e-8);
  }
}

TEST(ZeroPhase, EvenInputStaysEven) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  auto half = random_signal(600, 77);
  std::vector<double> x(half.rbegin(), half.rend());
  x.insert(x.end(), half.begin(), half.end());
  const auto y = filter_zero_phase(f, x);
  for (std::size_t i = 15; i < x.size() / 2; ++i) EXPECT_NEAR(y[i], y[x.size() - 1 - i], 1e-8);
}

TEST(ZeroPhase, TooShortNamesMinimum) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  EXPECT_EQ(zero_phase_min_length(f), 16u);
  try {
    filter_zero_phase(f, std::vector<double>(15, 1.0));
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(filter_zero_phase(f, std::vector<double>(16, 1.0)));
}

TEST(ZeroPhase, RateMismatchRejected) {
  const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
  EXPECT_THROW(filter_zero_phase(f, AudioSegment(std::vector<double>(100, 0.0), 8000.0)),
               ArgumentError);
}

TEST(Resample, RationalRatios) {
  EXPECT_EQ(rational_ratio(8000.0, 4000.0).up, 1u);
  EXPECT_EQ(rational_ratio(8000.0, 4000.0).down, 2u);
  const auto r = rational_ratio(44100.0, 4000.0);
  EXPECT_EQ(r.up, 40u);
  EXPECT_EQ(r.down, 441u);
}

TEST(Resample, ExactDecimationLength) {
  const AudioSegment seg(random_signal(16000, 5), 8000.0);
  const auto out = resample(seg, 4000.0);
  EXPECT_EQ(out.size(), 8000u);
  EXPECT_DOUBLE_EQ(out.sample_rate_hz(), 4000.0);
}

TEST(Resample, IdentityIsCopy) {
  const AudioSegment seg(random_signal(1234, 6), 4000.0, 1.5);
  const auto out = resample(seg, 4000.0);
  EXPECT_EQ(out.samples(), seg.samples());
  EXPECT_EQ(out.start_time_s(), 1.5);
}

TEST(Resample, SinePreservedFrom44k) {
  const std::size_t n = 44100 * 2;
  const AudioSegment seg(sine(n, 100.0, 44100.0), 44100.0);
  const auto out = resample(seg, 4000.0);
  ASSERT_EQ(out.size(), 8000u);
  const auto ref = sine(8000, 100.0, 4000.0);
  for (std::size_t i = 400; i < 7600; ++i) EXPECT_NEAR(out.samples()[i], ref[i], 0.01);
}

TEST(Resample, AliasesSuppressed) {
  // 3 kHz tone at 16 kHz would alias to 1 kHz at 4 kHz without filtering.
  const AudioSegment seg(sine(32000, 3000.0, 16000.0), 16000.0);
  const auto out = resample(seg, 4000.0);
  EXPECT_LT(interior_amplitude(out.samples(), 400), 1e-3);
}

TEST(Resample, Linear) {
  const auto x = random_signal(11025, 1);
  const auto y = random_signal(11025, 2);
  std::vector<double> mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = 2.5 * x[i] - 0.75 * y[i];
  const auto rx = resample(AudioSegment(x, 44100.0), 4000.0).samples();
  const auto ry = resample(AudioSegment(y, 44100.0), 4000.0).samples();
  const auto rm = resample(AudioSegment(mix, 44100.0), 4000.0).samples();
  for (std::size_t i = 0; i < rm.size(); ++i) EXPECT_NEAR(rm[i], 2.5 * rx[i] - 0.75 * ry[i], 1e-9);
}

TEST(Resample, DurationPreserved) {
  for (double src : {4410.0, 8000.0, 11025.0, 22050.0, 44100.0, 48000.0}) {
    const AudioSegment seg(random_signal(static_cast<std::size_t>(src * 1.37), 3), src);
    const auto out = resample(seg, 4000.0);
    EXPECT_NEAR(out.duration_s(), seg.duration_s(), 1.0 / 4000.0) << src;
  }
}

TEST(Resample, UpsamplingUnsupported) {
  const AudioSegment seg(random_signal(100, 1), 2000.0);
  EXPECT_THROW(resample(seg, 4000.0), UnsupportedError);
}

TEST(Wav, FloatRoundTripExact) {
  TempDir dir("wav");
  const AudioSegment seg(random_signal(999, 8, 0.3), 4000.0);
  write_wav(dir / "a.wav", seg, WavEncoding::float32);
  const auto back = read_wav(dir / "a.wav");
  ASSERT_EQ(back.size(), seg.size());
  EXPECT_DOUBLE_EQ(back.sample_rate_hz(), 4000.0);
  for (std::size_t i = 0; i < seg.size(); ++i) {
    EXPECT_EQ(back.samples()[i], static_cast<double>(static_cast<float>(seg.samples()[i])));
  }
}

TEST(Wav, Pcm16RoundTripWithinQuantum) {
  TempDir dir("wav");
  const AudioSegment seg(sine(4410, 440.0, 44100.0, 0.8), 44100.0);
  write_wav(dir / "a.wav", seg, WavEncoding::pcm16);
  const auto back = read_wav(dir / "a.wav");
  ASSERT_EQ(back.size(), seg.size());
  EXPECT_LT(max_abs_diff(back.samples(), seg.samples()), 1.0 / 32768.0);
}

TEST(Wav, ErrorsNameTheFile) {
  TempDir dir("wav");
  const auto empty = dir / "empty.wav";
  { std::ofstream(empty).flush(); }
  try {
    read_wav(empty);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("empty.wav"), std::string::npos);
  }
  EXPECT_THROW(read_wav(dir / "missing.wav"), IoError);
}
