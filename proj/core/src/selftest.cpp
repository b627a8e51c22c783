#include "abshr/selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "abshr/evaluation.hpp"
#include "abshr/iir.hpp"
#include "abshr/peaks.hpp"

namespace abshr {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

SelftestCheck check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

}  // namespace

WaveletBasis corrupted_basis(const WaveletBasis& basis) {
  WaveletBasis b = basis;
  b.name += "-corrupted";
  b.reconstruction_lowpass[b.length() / 2] += 1e-3;
  return b;
}

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  const WaveletBasis basis = options.basis ? *options.basis : coif4();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SelftestCheck> out;

  const BasisCheck bc = check_basis(basis);
  out.push_back(check("wavelet basis integrity (" + basis.name + ")", bc.ok(1e-10),
                      "sum " + sci(bc.lowpass_sum_error) + ", highpass sum " +
                          sci(bc.highpass_sum_error) + ", orthonormality " +
                          sci(bc.orthonormality_error) + ", QMF " + sci(bc.qmf_error)));

  double worst_pr = 0.0, worst_parseval = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(4096);
    for (double& v : x) v = gauss(rng);
    const auto d = dwt(x, basis, 5);
    const auto y = idwt(d);
    double err = 0.0, norm = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      err += (y[i] - x[i]) * (y[i] - x[i]);
      norm += x[i] * x[i];
    }
    for (double c : d.approximation) energy += c * c;
    for (const auto& band : d.details) {
      for (double c : band) energy += c * c;
    }
    worst_pr = std::max(worst_pr, std::sqrt(err / norm));
    worst_parseval = std::max(worst_parseval, std::abs(norm - energy) / norm);
  }
  out.push_back(check("perfect reconstruction", worst_pr < 1e-10,
                      "max relative error " + sci(worst_pr)));
  out.push_back(check("Parseval energy", worst_parseval < 1e-9,
                      "max relative error " + sci(worst_parseval)));

  const IirFilter lp = design_butterworth_lowpass(5, 200.0, 4000.0);
  const double dc = lp.magnitude(0.0);
  const double fc = lp.magnitude(200.0);
  out.push_back(check("Butterworth response", std::abs(dc - 1.0) < 1e-9 &&
                                                  std::abs(fc - 1.0 / std::sqrt(2.0)) < 1e-6 &&
                                                  lp.is_stable(),
                      "|H(0)|-1 = " + sci(dc - 1.0) + ", |H(fc)|-1/sqrt2 = " +
                          sci(fc - 1.0 / std::sqrt(2.0))));

  {
    std::vector<double> half(1000);
    for (double& v : half) v = gauss(rng);
    std::vector<double> sym(half);
    sym.insert(sym.end(), half.rbegin(), half.rend());
    const auto y = filter_zero_phase(lp, sym);
    double asym = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) asym = std::max(asym, std::abs(y[i] - y[y.size() - 1 - i]));
    out.push_back(check("zero-phase symmetry", asym < 1e-8, "max asymmetry " + sci(asym)));
  }

  {
    std::vector<double> band(1024);
    for (std::size_t i = 0; i < band.size(); ++i) band[i] = i % 2 == 0 ? 1.0 : -1.0;
    const double th = sqtwolog_threshold(band, SigmaEstimator::mean_abs_dev);
    const double expected = std::sqrt(2.0 * std::log(1024.0));
    out.push_back(check("sqtwolog threshold law", std::abs(th - expected) < 1e-9,
                        "got " + std::to_string(th) + ", expected " + std::to_string(expected)));
  }

  {
    std::vector<double> x(10000);
    for (double& v : x) v = 3.0 * gauss(rng);
    const double th = 1.25;
    const auto y = soft_threshold(x, th);
    bool ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double want = (x[i] > 0 ? 1.0 : -1.0) * std::max(std::abs(x[i]) - th, 0.0);
      ok = ok && y[i] == want;
    }
    out.push_back(check("soft-threshold law", ok, "10000 random points"));
  }

  {
    bool ok = true;
    std::uniform_real_distribution<double> height(0.0, 4.0);
    for (int trial = 0; trial < 200 && ok; ++trial) {
      std::vector<double> x(64);
      for (double& v : x) v = std::round(height(rng));
      const auto p = find_peaks(x, 1.0, 7);
      for (std::size_t i = 0; i < p.size(); ++i) {
        ok = ok && x[p[i]] >= 1.0 && (i == 0 || p[i] - p[i - 1] >= 7);
      }
    }
    out.push_back(check("peak spacing and height", ok, "200 random signals"));
  }

  {
    std::uniform_real_distribution<double> bpm(45.0, 100.0);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      std::vector<PairedSample> pairs(20), swapped(20), scaled(20);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i] = {static_cast<double>(i), bpm(rng), bpm(rng)};
        swapped[i] = {pairs[i].time_s, pairs[i].hr_ecg, pairs[i].hr_audio};
        scaled[i] = {pairs[i].time_s, 2.0 * pairs[i].hr_audio, 2.0 * pairs[i].hr_ecg};
      }
      const auto r = metrics(pairs);
      const auto rs = metrics(swapped);
      const auto rc = metrics(scaled);
      ok = ok && r.mae_bpm >= std::abs(r.mde_bpm) && std::abs(rs.mde_bpm + r.mde_bpm) < 1e-9 &&
           std::abs(rs.mae_bpm - r.mae_bpm) < 1e-9 &&
           std::abs(rc.mae_bpm - 2.0 * r.mae_bpm) < 1e-9 &&
           std::abs(rc.mape_pct - r.mape_pct) < 1e-9;
    }
    out.push_back(check("metric identities", ok, "100 random pair sets"));
  }

  {
    Missingness m{1000, 45, 1000, 60};
    const double f = m.fraction_missing();
    out.push_back(check("missingness composition", std::abs(f - 0.1023) < 1e-12,
                        "4.5% windows and 6.0% intervals -> " + std::to_string(100.0 * f) + "%"));
  }
  return out;
}

}  // namespace abshr
