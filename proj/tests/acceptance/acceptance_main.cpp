// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "abshr/evaluation.hpp"
#include "abshr/io.hpp"
#include "abshr/peaks.hpp"
#include "abshr/pipeline.hpp"
#include "abshr/synth.hpp"
#include "abshr/wav.hpp"
#include "abshr/wavelet.hpp"
#include "abshr/iir.hpp"
#include "cli/commands.hpp"

namespace fs = std::filesystem;
using namespace abshr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s  [%02d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
              v.detail.c_str());
  std::fflush(stdout);
}

std::vector<double> gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Candidate maxima enumerated directly, then greedy selection by height.
std::vector<std::size_t> brute_force_peaks(const std::vector<double>& x, double h, std::size_t d) {
  std::vector<std::size_t> cand;
  for (std::size_t a = 1; a + 1 < x.size(); ++a) {
    std::size_t b = a;
    while (b + 1 < x.size() && x[b + 1] == x[a]) ++b;
    if (b + 1 < x.size() && x[a - 1] < x[a] && x[b + 1] < x[a] && x[a] >= h) {
      cand.push_back((a + b) / 2);
    }
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [&](std::size_t i, std::size_t j) { return x[i] > x[j]; });
  std::vector<std::size_t> kept;
  for (std::size_t p : cand) {
    if (std::all_of(kept.begin(), kept.end(),
                    [&](std::size_t q) { return (p > q ? p - q : q - p) >= d; })) {
      kept.push_back(p);
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Scores a recording against the synthesizer's beat times the same way the
// evaluate command scores against R peaks.
struct Score {
  double ihr_mae = NAN;
  double ahr_mae = NAN;
  std::size_t ihr_pairs = 0;
  std::size_t ahr_pairs = 0;
};

Score score(const PipelineResult& r, const std::vector<double>& true_beats,
            const PipelineConfig& config) {
  const HrSeries truth_ihr = ecg_hr(RPeakAnnotations(true_beats));
  std::vector<double> starts;
  for (const auto& w : r.windows) starts.push_back(w.start_s);
  const HrSeries truth_ahr = windowed_ahr(truth_ihr, starts, config);
  Score s;
  const auto ai = align(r.ihr, truth_ihr, kIhrPairingToleranceS);
  const auto aa = align(r.ahr, truth_ahr, config.hop_s() / 2.0);
  s.ihr_pairs = ai.pairs.size();
  s.ahr_pairs = aa.pairs.size();
  if (!ai.pairs.empty()) s.ihr_mae = metrics(ai.pairs).mae_bpm;
  if (!aa.pairs.empty()) s.ahr_mae = metrics(aa.pairs).mae_bpm;
  return s;
}

// Every emitted iHR sample across the suite, for the range check.
double ihr_min_seen = INFINITY;
double ihr_max_seen = -INFINITY;
std::size_t ihr_seen = 0;

void note_ihr(const HrSeries& s) {
  for (const auto& x : s.samples) {
    ihr_min_seen = std::min(ihr_min_seen, x.bpm);
    ihr_max_seen = std::max(ihr_max_seen, x.bpm);
    ++ihr_seen;
  }
}

struct Recording {
  SynthOutput synth;
  PipelineResult result;
  double seconds = 0.0;
};

// Synthesizes, round-trips through a float WAV and runs the pipeline.
Recording run_synthetic(const SynthSpec& spec, const fs::path& dir, const std::string& name) {
  Recording rec;
  rec.synth = synthesize(spec);
  const fs::path wav = dir / (name + ".wav");
  write_wav(wav, rec.synth.audio, WavEncoding::float32);
  write_times_csv(dir / (name + "_beats.csv"), rec.synth.true_beat_times_s);
  const auto t0 = Clock::now();
  rec.result = run_pipeline(read_wav(wav), PipelineConfig{});
  rec.seconds = seconds_since(t0);
  note_ihr(rec.result.ihr);
  return rec;
}

SynthSpec constant_hr(double bpm, double duration, std::uint64_t seed) {
  SynthSpec s;
  s.duration_s = duration;
  s.hr_profile = {{0.0, bpm}};
  s.rng_seed = seed;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

int run_cli(std::vector<std::string> args, std::string* err_out = nullptr) {
  args.insert(args.begin(), "abshr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_out) *err_out = err.str();
  return code;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() /
                        ("abshr_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(work);
  const PipelineConfig config;
  const std::vector<double> rates{50.0, 60.0, 75.0, 90.0};

  // Shared corpus for the two transform criteria.
  std::vector<double> pr_err, parseval_err;
  double corpus_seconds = 0.0;
  {
    std::mt19937_64 rng(1);
    const auto t0 = Clock::now();
    for (int i = 0; i < 100; ++i) {
      const auto x = gaussian(4096, rng);
      const auto d = dwt(x, coif4(), 5);
      const auto y = idwt(d);
      double num = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) num += (y[k] - x[k]) * (y[k] - x[k]);
      const double ex = sum_sq(x);
      pr_err.push_back(std::sqrt(num / ex));
      double ec = sum_sq(d.approximation);
      for (const auto& b : d.details) ec += sum_sq(b);
      parseval_err.push_back(std::abs(ex - ec) / ex);
    }
    corpus_seconds = seconds_since(t0);
  }

  report(1, "wavelet perfect reconstruction (100 x 4096, coif4, 5 levels)", [&] {
    const double worst = *std::max_element(pr_err.begin(), pr_err.end());
    return Verdict{worst < 1e-10 && corpus_seconds < 5.0,
                   "max relative error " + fmt("%.3e", worst) + " (< 1e-10), " +
                       fmt("%.3f", corpus_seconds) + " s (< 5 s)"};
  });

  report(2, "Parseval energy conservation", [&] {
    const double worst = *std::max_element(parseval_err.begin(), parseval_err.end());
    return Verdict{worst < 1e-9, "max relative energy error " + fmt("%.3e", worst) + " (< 1e-9)"};
  });

  report(3, "Coiflet-4 basis integrity", [&] {
    const auto& h = coif4().reconstruction_lowpass;
    const auto& g = coif4().reconstruction_highpass;
    const std::size_t L = h.size();
    double sum = 0.0, ortho = 0.0, qmf = 0.0;
    for (double v : h) sum += v;
    for (std::size_t k = 0; 2 * k < L; ++k) {
      double acc = 0.0;
      for (std::size_t n = 2 * k; n < L; ++n) acc += h[n] * h[n - 2 * k];
      ortho = std::max(ortho, std::abs(acc - (k == 0 ? 1.0 : 0.0)));
    }
    for (std::size_t n = 0; n < L; ++n) {
      qmf = std::max(qmf, std::abs(g[n] - (n % 2 ? -1.0 : 1.0) * h[L - 1 - n]));
    }
    const double sum_err = std::abs(sum - std::sqrt(2.0));
    return Verdict{L == 24 && sum_err < 1e-10 && ortho < 1e-10 && qmf < 1e-10,
                   std::to_string(L) + " taps, |sum - sqrt2| " + fmt("%.2e", sum_err) +
                       ", orthonormality " + fmt("%.2e", ortho) + ", QMF " + fmt("%.2e", qmf) +
                       " (all < 1e-10)"};
  });

  report(4, "Butterworth 5th order, 200 Hz at 4 kHz", [&] {
    const auto f = design_butterworth_lowpass(5, 200.0, 4000.0);
    const double dc = std::abs(f.magnitude(0.0) - 1.0);
    const double fc = std::abs(f.magnitude(200.0) - 1.0 / std::sqrt(2.0));
    return Verdict{dc < 1e-9 && fc < 1e-6, "||H(0)| - 1| " + fmt("%.2e", dc) +
                                               " (< 1e-9), ||H(200)| - 1/sqrt2| " +
                                               fmt("%.2e", fc) + " (< 1e-6)"};
  });

  report(5, "soft-threshold law (1e5 random points, exact)", [&] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xs(-10.0, 10.0), ths(0.0, 5.0);
    std::size_t mismatches = 0;
    for (int block = 0; block < 100; ++block) {
      std::vector<double> band(1000);
      for (auto& v : band) v = xs(rng);
      const double th = block % 10 == 0 ? 0.0 : ths(rng);
      const auto y = soft_threshold(band, th);
      for (std::size_t i = 0; i < band.size(); ++i) {
        const double mag = std::max(std::abs(band[i]) - th, 0.0);
        const double expected = mag == 0.0 ? 0.0 : (band[i] < 0 ? -mag : mag);
        mismatches += y[i] != expected;
      }
    }
    return Verdict{mismatches == 0, std::to_string(mismatches) + " mismatches in 100000 points"};
  });

  report(6, "sqtwolog threshold, N = 1024, sigma = 1", [&] {
    std::vector<double> band(1024);
    for (std::size_t i = 0; i < band.size(); ++i) band[i] = i % 2 ? 1.0 : -1.0;
    const double th = sqtwolog_threshold(band, SigmaEstimator::mean_abs_dev);
    const double expected = std::sqrt(2.0 * std::log(1024.0));
    const double err = std::abs(th - expected);
    return Verdict{err < 1e-9 && std::abs(th - 3.7233) < 5e-5,
                   "threshold " + fmt("%.10f", th) + ", |error| " + fmt("%.2e", err) +
                       " (< 1e-9)"};
  });

  report(7, "peak detector vs brute-force reference (1000 signals, exact)", [&] {
    std::mt19937_64 rng(7);
    int mismatched = 0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> x(1 + rng() % 64);
      for (auto& v : x) v = static_cast<double>(rng() % 5);
      const double h = static_cast<double>(rng() % 5);
      const std::size_t d = 1 + rng() % 12;
      mismatched += find_peaks(x, h, d) != brute_force_peaks(x, h, d);
    }
    return Verdict{mismatched == 0, std::to_string(mismatched) + " of 1000 signals disagree"};
  });

  report(8, "MDE/MAE/MAPE vs single-loop reference (1000 pair sets)", [&] {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> hr(40.0, 100.0), e(-20.0, 20.0);
    double worst = 0.0;
    int bound_violations = 0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<PairedSample> pairs(1 + rng() % 300);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double truth = hr(rng);
        pairs[i] = {static_cast<double>(i), truth + e(rng), truth};
      }
      double mde = 0.0, mae = 0.0, mape = 0.0;
      for (const auto& p : pairs) {
        const double diff = p.hr_audio - p.hr_ecg;
        mde += diff;
        mae += std::abs(diff);
        mape += std::abs(diff) / p.hr_ecg * 100.0;
      }
      const double n = static_cast<double>(pairs.size());
      const auto r = metrics(pairs);
      worst = std::max({worst, std::abs(r.mde_bpm - mde / n), std::abs(r.mae_bpm - mae / n),
                        std::abs(r.mape_pct - mape / n)});
      bound_violations += r.mae_bpm < std::abs(r.mde_bpm);
    }
    return Verdict{worst < 1e-12 && bound_violations == 0,
                   "max deviation " + fmt("%.2e", worst) + " (< 1e-12), MAE < |MDE| in " +
                       std::to_string(bound_violations) + " sets"};
  });

  report(9, "synthetic clean 5 min at 50/60/75/90 BPM", [&] {
    bool ok = true;
    std::string detail;
    for (double bpm : rates) {
      const auto rec = run_synthetic(constant_hr(bpm, 300.0, 9), work,
                                     "clean" + std::to_string(static_cast<int>(bpm)));
      const auto s = score(rec.result, rec.synth.true_beat_times_s, config);
      const bool this_ok = s.ahr_mae <= 1.0 && s.ihr_mae <= 1.5 && rec.seconds < 10.0;
      ok = ok && this_ok;
      detail += (detail.empty() ? "" : "; ") + fmt("%.0f BPM", bpm) + " aHR MAE " +
                fmt("%.3f", s.ahr_mae) + " iHR MAE " + fmt("%.3f", s.ihr_mae) + " " +
                fmt("%.2f s", rec.seconds);
    }
    return Verdict{ok, detail + " (limits 1.0 / 1.5 BPM, 10 s)"};
  });

  report(10, "synthetic 0 dB GI noise + 2 motion spikes/min", [&] {
    bool ok = true;
    std::string detail;
    for (double bpm : rates) {
      SynthSpec spec = constant_hr(bpm, 300.0, 10 + static_cast<std::uint64_t>(bpm));
      spec.gi_noise_snr_db = 0.0;
      spec.motion_spike_rate_per_min = 2.0;
      const auto rec =
          run_synthetic(spec, work, "noisy" + std::to_string(static_cast<int>(bpm)));
      const auto s = score(rec.result, rec.synth.true_beat_times_s, config);

      std::set<std::size_t> spiked, rejected;
      for (const auto& w : rec.result.windows) {
        for (double t : rec.synth.motion_spike_times_s) {
          if (t >= w.start_s && t < w.start_s + config.window_len_s) spiked.insert(w.index);
        }
        if (w.status != WindowStatus::accepted) rejected.insert(w.index);
      }
      const bool this_ok = s.ahr_mae <= 3.4 && rec.result.missingness.fraction_missing() > 0.0 &&
                           spiked == rejected;
      ok = ok && this_ok;
      detail += (detail.empty() ? "" : "; ") + fmt("%.0f BPM", bpm) + " aHR MAE " +
                fmt("%.3f", s.ahr_mae) + ", rejected " + std::to_string(rejected.size()) +
                " / spiked " + std::to_string(spiked.size()) + " windows" +
                (spiked == rejected ? "" : " (sets differ)");
    }
    return Verdict{ok, detail + " (limit 3.4 BPM, sets must match)"};
  });

  report(11, "45 BPM floor and iHR range", [&] {
    const auto rec = run_synthetic(constant_hr(40.0, 300.0, 11), work, "slow40");
    const auto& m = rec.result.missingness;
    const double frac = m.interval_fraction();
    const bool in_range = ihr_seen == 0 || (ihr_min_seen >= 45.0 && ihr_max_seen <= 92.4);
    return Verdict{m.intervals_total > 0 && frac >= 0.9 && in_range,
                   "40 BPM: " + std::to_string(m.intervals_rejected) + "/" +
                       std::to_string(m.intervals_total) + " intervals rejected (" +
                       fmt("%.1f%%", 100.0 * frac) + ", need >= 90%); " +
                       std::to_string(ihr_seen) + " iHR samples in [" +
                       fmt("%.2f", ihr_min_seen) + ", " + fmt("%.2f", ihr_max_seen) +
                       "] (must lie in [45, 92.4])"};
  });

  report(12, "missingness equals recount from persisted window records", [&] {
    const fs::path manifest = work / "manifest.csv";
    std::string rows = "audio_file,rpeak_file,participant,day\n";
    for (double bpm : rates) {
      const std::string b = std::to_string(static_cast<int>(bpm));
      rows += "clean" + b + ".wav,clean" + b + "_beats.csv,p" + b + ",clean\n";
      rows += "noisy" + b + ".wav,noisy" + b + "_beats.csv,p" + b + ",noisy\n";
    }
    rows += "slow40.wav,slow40_beats.csv,p40,clean\n";
    write_text(manifest, rows);
    std::string err;
    const int code = run_cli({"evaluate", manifest.string(), "--out", (work / "eval").string(),
                              "--jobs", "4"},
                             &err);
    if (code != 0) return Verdict{false, "evaluate exited " + std::to_string(code) + ": " + err};

    const auto overall = nlohmann::json::parse(slurp(work / "eval" / "overall.json"));
    std::size_t checked = 0, mismatched = 0;
    Missingness pooled;
    for (const auto& row : overall["rows"]) {
      const fs::path dir = work / "eval" / row["dir"].get<std::string>();
      const auto recount = recount_missingness(read_window_records_csv(dir / "windows.csv"));
      const auto reported = nlohmann::json::parse(slurp(dir / "missingness.json"));
      mismatched += reported["fraction_missing"].get<double>() != recount.fraction_missing() ||
                    read_missingness_json(dir / "missingness.json") != recount;
      pooled += recount;
      ++checked;
    }
    const bool pooled_ok =
        overall["missingness"]["fraction_missing"].get<double>() == pooled.fraction_missing();
    return Verdict{checked == 9 && mismatched == 0 && pooled_ok,
                   std::to_string(checked) + " rows checked, " + std::to_string(mismatched) +
                       " mismatched; pooled " + (pooled_ok ? "matches" : "differs") + " (" +
                       fmt("%.4f", pooled.fraction_missing()) + ")"};
  });

  report(13, "process is byte-deterministic", [&] {
    const std::string wav = (work / "noisy75.wav").string();
    if (run_cli({"process", wav, "--out", (work / "det_a").string()}) != 0 ||
        run_cli({"process", wav, "--out", (work / "det_b").string(), "--jobs", "4"}) != 0) {
      return Verdict{false, "process failed"};
    }
    std::vector<std::string> differing;
    for (const char* f : {"ihr.csv", "ahr.csv", "windows.csv", "missingness.json"}) {
      const auto a = slurp(work / "det_a" / f);
      if (a.empty() || a != slurp(work / "det_b" / f)) differing.push_back(f);
    }
    return Verdict{differing.empty(), differing.empty()
                                          ? "ihr.csv, ahr.csv, windows.csv, missingness.json identical"
                                          : "differs: " + differing.front()};
  });

  report(14, "throughput, 1 h of 4 kHz audio single-threaded", [&] {
    SynthSpec spec = constant_hr(70.0, 3600.0, 14);
    spec.gi_noise_snr_db = 3.0;
    spec.motion_spike_rate_per_min = 0.5;
    const fs::path wav = work / "hour.wav";
    write_wav(wav, synthesize(spec).audio, WavEncoding::float32);
    const auto t0 = Clock::now();
    const int code = run_cli({"process", wav.string(), "--out", (work / "hour").string(),
                              "--jobs", "1"});
    const double secs = seconds_since(t0);
    return Verdict{code == 0 && secs < 60.0,
                   fmt("%.2f s", secs) + " (< 60 s); 104 h at this rate is " +
                       fmt("%.1f min", secs * 104.0 / 60.0) + " on one core"};
  });

  std::error_code ec;
  fs::remove_all(work, ec);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
