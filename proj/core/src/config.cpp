#include "abshr/config.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "abshr/error.hpp"
#include "abshr/io.hpp"

namespace abshr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const ConfigField& find_field(const std::string& name) {
  for (const auto& f : config_fields()) {
    if (f.name == name) return f;
  }
  throw ArgumentError("unknown config key '" + name + "'");
}

// Drops a trailing `# comment` that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  using C = PipelineConfig;
  static const std::vector<ConfigField> fields = {
      {"window_len_s", &C::window_len_s, "analysis window length (s)"},
      {"overlap_s", &C::overlap_s, "overlap between consecutive windows (s)"},
      {"artifact_sigma", &C::artifact_sigma, "reject windows with |z| above this"},
      {"butter_order", &C::butter_order, "Butterworth lowpass order"},
      {"butter_cutoff_hz", &C::butter_cutoff_hz, "Butterworth lowpass cutoff (Hz)"},
      {"antialias_cutoff_hz", &C::antialias_cutoff_hz, "resampler anti-alias stopband edge (Hz)"},
      {"target_rate_hz", &C::target_rate_hz, "processing sample rate (Hz)"},
      {"wavelet", &C::wavelet, "wavelet basis"},
      {"levels", &C::levels, "wavelet decomposition depth"},
      {"sigma_estimator", &C::sigma_estimator,
       "band scale estimator: mean_abs_dev or median_abs_dev_scaled"},
      {"min_peak_distance_s", &C::min_peak_distance_s, "minimum spacing between beats (s)"},
      {"min_peak_height", &C::min_peak_height, "minimum peak height (z units)"},
      {"min_hr_bpm", &C::min_hr_bpm, "reject intervals slower than this (BPM)"},
      {"outlier_sigma", &C::outlier_sigma, "aHR outlier threshold (local std devs)"},
      {"std_window_len", &C::std_window_len, "aHR outlier neighbourhood (samples)"},
      {"smooth_window_len", &C::smooth_window_len, "aHR moving-average length (samples)"},
  };
  return fields;
}

void set_config_field(PipelineConfig& config, const ConfigField& field, const std::string& text) {
  const std::string v = trim(text);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(config.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          config.*member = v;
        } else {
          std::size_t used = 0;
          double d = 0.0;
          try {
            d = std::stod(v, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (v.empty() || used != v.size() || !std::isfinite(d)) {
            throw ArgumentError("config key '" + field.name + "': expected a number, got '" + v +
                                "'");
          }
          if constexpr (std::is_same_v<T, int>) {
            if (d != std::floor(d)) {
              throw ArgumentError("config key '" + field.name + "': expected an integer, got '" +
                                  v + "'");
            }
            config.*member = static_cast<int>(d);
          } else {
            config.*member = d;
          }
        }
      },
      field.member);
}

PipelineConfig parse_config(const std::string& text, bool is_toml, PipelineConfig base) {
  if (is_toml) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(strip_comment(line));
      if (line.empty() || line.front() == '[') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ArgumentError("config line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      set_config_field(base, find_field(key), value);
    }
  } else {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ArgumentError("config JSON must be an object");
    for (const auto& [key, value] : j.items()) {
      const ConfigField& field = find_field(key);
      if (value.is_string()) {
        set_config_field(base, field, value.get<std::string>());
      } else if (value.is_number()) {
        set_config_field(base, field, value.dump());
      } else {
        throw ArgumentError("config key '" + key + "' must be a number or string");
      }
    }
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  const std::string text = read_text(path);
  try {
    return parse_config(text, path.extension() == ".toml", std::move(base));
  } catch (const ArgumentError& e) {
    throw ArgumentError("'" + path.string() + "': " + e.what());
  }
}

std::string config_to_json(const PipelineConfig& config) {
  nlohmann::ordered_json j;
  for (const auto& f : config_fields()) {
    std::visit([&](auto member) { j[f.name] = config.*member; }, f.member);
  }
  return j.dump(2) + "\n";
}

}  // namespace abshr
