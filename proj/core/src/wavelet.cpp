#include "abshr/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abshr/error.hpp"

namespace abshr {

namespace {

// Coiflet-4 scaling filter (synthesis lowpass), normalized so Σh = √2.
constexpr double kCoif4[24] = {
    8.92313902537003e-04,  -1.629492425226786e-03, -7.346167936268051e-03,
    1.606894713157503e-02, 2.668230466960483e-02,  -8.126671024919373e-02,
    -5.607731960356926e-02, 4.1530842700068227e-01, 7.822389344242826e-01,
    4.3438603311435653e-01, -6.662747236681717e-02, -9.622042453595264e-02,
    3.933442260558915e-02, 2.508225333794961e-02,  -1.5211728187697211e-02,
    -5.6582838001308835e-03, 3.7514346971460866e-03, 1.2665610789256603e-03,
    -5.890202246332165e-04, -2.599743371222568e-04, 6.233885431278719e-05,
    3.1229861599195265e-05, -3.259647940030751e-06, -1.7849909144933469e-06,
};

// One analysis step over a periodized, even-length signal.
void analysis_step(std::span<const double> x, const WaveletBasis& basis,
                   std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  const auto& h = basis.reconstruction_lowpass;
  const auto& g = basis.reconstruction_highpass;
  const std::size_t taps = h.size();
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t start = 2 * k;
    double a = 0.0, d = 0.0;
    if (start + taps <= n) {
      for (std::size_t t = 0; t < taps; ++t) {
        a += h[t] * x[start + t];
        d += g[t] * x[start + t];
      }
    } else {
      for (std::size_t t = 0; t < taps; ++t) {
        const double v = x[(start + t) % n];
        a += h[t] * v;
        d += g[t] * v;
      }
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Adjoint of analysis_step; `out` has length 2·approx.size().
void synthesis_step(std::span<const double> approx, std::span<const double> detail,
                    const WaveletBasis& basis, std::vector<double>& out) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  const auto& h = basis.reconstruction_lowpass;
  const auto& g = basis.reconstruction_highpass;
  const std::size_t taps = h.size();
  out.assign(n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t start = 2 * k;
    const double a = approx[k];
    const double d = detail[k];
    if (start + taps <= n) {
      for (std::size_t t = 0; t < taps; ++t) out[start + t] += h[t] * a + g[t] * d;
    } else {
      for (std::size_t t = 0; t < taps; ++t) out[(start + t) % n] += h[t] * a + g[t] * d;
    }
  }
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

WaveletBasis WaveletBasis::from_scaling_filter(std::string name, std::vector<double> h) {
  if (h.size() < 2 || h.size() % 2 != 0) {
    throw ArgumentError("scaling filter length must be even and >= 2");
  }
  const std::size_t taps = h.size();
  WaveletBasis b;
  b.name = std::move(name);
  b.reconstruction_highpass.resize(taps);
  for (std::size_t n = 0; n < taps; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    b.reconstruction_highpass[n] = sign * h[taps - 1 - n];
  }
  b.reconstruction_lowpass = std::move(h);
  b.decomposition_lowpass.assign(b.reconstruction_lowpass.rbegin(),
                                 b.reconstruction_lowpass.rend());
  b.decomposition_highpass.assign(b.reconstruction_highpass.rbegin(),
                                  b.reconstruction_highpass.rend());
  return b;
}

const WaveletBasis& coif4() {
  static const WaveletBasis basis = WaveletBasis::from_scaling_filter(
      "coif4", std::vector<double>(std::begin(kCoif4), std::end(kCoif4)));
  return basis;
}

const WaveletBasis& wavelet_by_name(const std::string& name) {
  if (name == "coif4") return coif4();
  throw ArgumentError("unknown wavelet '" + name + "' (available: coif4)");
}

BasisCheck check_basis(const WaveletBasis& basis) {
  BasisCheck c;
  const auto& h = basis.reconstruction_lowpass;
  const auto& g = basis.reconstruction_highpass;
  const std::size_t taps = h.size();
  if (taps == 0 || g.size() != taps || basis.decomposition_lowpass.size() != taps ||
      basis.decomposition_highpass.size() != taps) {
    c.lowpass_sum_error = c.highpass_sum_error = c.orthonormality_error = c.qmf_error =
        c.reversal_error = INFINITY;
    return c;
  }
  double sh = 0.0, sg = 0.0;
  for (std::size_t n = 0; n < taps; ++n) {
    sh += h[n];
    sg += g[n];
  }
  c.lowpass_sum_error = std::abs(sh - std::sqrt(2.0));
  c.highpass_sum_error = std::abs(sg);
  for (std::size_t k = 0; 2 * k < taps; ++k) {
    double acc = 0.0;
    for (std::size_t n = 2 * k; n < taps; ++n) acc += h[n] * h[n - 2 * k];
    c.orthonormality_error = std::max(c.orthonormality_error, std::abs(acc - (k == 0 ? 1.0 : 0.0)));
  }
  for (std::size_t n = 0; n < taps; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    c.qmf_error = std::max(c.qmf_error, std::abs(g[n] - sign * h[taps - 1 - n]));
    c.reversal_error = std::max(
        {c.reversal_error, std::abs(basis.decomposition_lowpass[n] - h[taps - 1 - n]),
         std::abs(basis.decomposition_highpass[n] - g[taps - 1 - n])});
  }
  return c;
}

std::size_t band_length(std::size_t length, int level) {
  for (int j = 0; j < level; ++j) length = (length + 1) / 2;
  return length;
}

int max_dwt_level(std::size_t length) {
  int level = 0;
  while ((std::size_t{2} << level) <= length) ++level;
  return level;
}

WaveletDecomposition dwt(std::span<const double> signal, const WaveletBasis& basis, int levels) {
  if (levels < 1) {
    throw ArgumentError("decomposition level must be >= 1, got " + std::to_string(levels));
  }
  const int max_level = max_dwt_level(signal.size());
  if (levels > max_level) {
    throw ArgumentError("decomposition level " + std::to_string(levels) +
                        " too deep for a signal of length " + std::to_string(signal.size()) +
                        "; maximum level is " + std::to_string(max_level));
  }

  WaveletDecomposition out;
  out.original_length = signal.size();
  out.basis = &basis;
  out.details.resize(static_cast<std::size_t>(levels));

  std::vector<double> current(signal.begin(), signal.end());
  std::vector<double> approx;
  for (int j = 0; j < levels; ++j) {
    if (current.size() % 2 == 1) current.push_back(current.back());
    analysis_step(current, basis, approx, out.details[static_cast<std::size_t>(j)]);
    current.swap(approx);
  }
  out.approximation = std::move(current);
  return out;
}

std::vector<double> idwt(const WaveletDecomposition& decomp) {
  if (decomp.basis == nullptr) throw StructuralError("decomposition has no basis");
  const int levels = static_cast<int>(decomp.levels());
  if (levels < 1) throw StructuralError("decomposition has no detail bands");
  if (decomp.approximation.size() != band_length(decomp.original_length, levels)) {
    throw StructuralError("approximation band length " +
                          std::to_string(decomp.approximation.size()) + " inconsistent with " +
                          std::to_string(levels) + " levels over " +
                          std::to_string(decomp.original_length) + " samples");
  }
  for (int j = 1; j <= levels; ++j) {
    const std::size_t expected = band_length(decomp.original_length, j);
    const std::size_t got = decomp.details[static_cast<std::size_t>(j - 1)].size();
    if (got != expected) {
      throw StructuralError("detail band " + std::to_string(j) + " has length " +
                            std::to_string(got) + ", expected " + std::to_string(expected));
    }
  }

  std::vector<double> current = decomp.approximation;
  std::vector<double> out;
  for (int j = levels; j >= 1; --j) {
    synthesis_step(current, decomp.details[static_cast<std::size_t>(j - 1)], *decomp.basis, out);
    // Drop the repeated sample added for odd-length input at this level.
    out.resize(band_length(decomp.original_length, j - 1));
    current.swap(out);
  }
  return current;
}

double estimate_sigma(std::span<const double> band, SigmaEstimator estimator) {
  if (band.empty()) throw ArgumentError("cannot estimate the scale of an empty band");
  if (estimator == SigmaEstimator::mean_abs_dev) {
    double mean = 0.0;
    for (double v : band) mean += v;
    mean /= static_cast<double>(band.size());
    double acc = 0.0;
    for (double v : band) acc += std::abs(v - mean);
    return acc / static_cast<double>(band.size());
  }
  std::vector<double> mags(band.size());
  std::transform(band.begin(), band.end(), mags.begin(), [](double v) { return std::abs(v); });
  return median_of(std::move(mags)) / 0.6745;
}

double sqtwolog_threshold(std::span<const double> band, SigmaEstimator estimator) {
  const double sigma = estimate_sigma(band, estimator);
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(band.size())));
}

std::vector<double> soft_threshold(std::span<const double> band, double th) {
  if (!(th >= 0.0)) {
    throw ArgumentError("soft threshold must be non-negative, got " + std::to_string(th));
  }
  std::vector<double> out(band.size());
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double mag = std::abs(band[i]) - th;
    out[i] = mag > 0.0 ? std::copysign(mag, band[i]) : 0.0;
  }
  return out;
}

std::vector<double> denoise_window(std::span<const double> window, const WaveletBasis& basis,
                                   int levels, const ThresholdPolicy& policy) {
  WaveletDecomposition decomp = dwt(window, basis, levels);
  for (auto& band : decomp.details) {
    band = soft_threshold(band, sqtwolog_threshold(band, policy.sigma_estimator));
  }
  if (policy.threshold_approximation_band) {
    decomp.approximation = soft_threshold(
        decomp.approximation, sqtwolog_threshold(decomp.approximation, policy.sigma_estimator));
  }
  return idwt(decomp);
}

}  // namespace abshr
