#include "abshr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "abshr/error.hpp"

namespace abshr {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": expected a number, got '" + s +
                  "'");
  }
}

std::size_t parse_count(const std::string& s, const std::filesystem::path& path,
                        std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": expected a count, got '" + s +
                  "'");
  }
}

}  // namespace

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_hr_csv(std::ostream& out, const HrSeries& series) {
  out << "time_s,bpm,kind\n";
  for (const auto& s : series.samples) {
    out << format_time(s.time_s) << ',' << format_value(s.bpm) << ',' << to_string(s.kind) << '\n';
  }
}

void write_hr_csv(const std::filesystem::path& path, const HrSeries& series) {
  auto f = open_out(path);
  write_hr_csv(f, series);
}

HrSeries read_hr_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  HrSeries out;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cols = split_csv_line(lines[i]);
    if (!header_seen) {
      if (cols != std::vector<std::string>{"time_s", "bpm", "kind"}) {
        throw IoError("'" + path.string() + "': expected header 'time_s,bpm,kind'");
      }
      header_seen = true;
      continue;
    }
    if (cols.size() != 3) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": expected 3 columns");
    }
    HrSample s;
    s.time_s = parse_double(cols[0], path, i + 1);
    s.bpm = parse_double(cols[1], path, i + 1);
    try {
      s.kind = hr_kind_from_string(cols[2]);
    } catch (const ArgumentError& e) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    out.samples.push_back(s);
  }
  if (!header_seen) throw IoError("'" + path.string() + "' is empty");
  return out;
}

void write_times_csv(const std::filesystem::path& path, const std::vector<double>& times) {
  auto f = open_out(path);
  f << "time_s\n";
  for (double t : times) f << format_time(t) << '\n';
}

RPeakAnnotations read_rpeaks_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<double> times;
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cols = split_csv_line(lines[i]);
    if (first && !cols.empty() && cols[0] == "time_s") {
      first = false;
      continue;
    }
    first = false;
    if (cols.empty()) continue;
    times.push_back(parse_double(cols[0], path, i + 1));
  }
  try {
    return RPeakAnnotations(std::move(times));
  } catch (const ArgumentError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  for (const auto& line : lines) {
    if (blank(line)) continue;
    const auto cols = split_csv_line(line);
    GroundTruth gt;
    if (cols.size() >= 2 && cols[0] == "time_s" && cols[1] == "bpm") {
      gt.series = read_hr_csv(path);
    } else {
      gt.rpeaks = read_rpeaks_csv(path);
    }
    return gt;
  }
  throw IoError("ground-truth file '" + path.string() + "' is empty");
}

void write_window_records_csv(const std::filesystem::path& path,
                              const std::vector<WindowRecord>& records) {
  auto f = open_out(path);
  f << "index,start_s,status,mean,std_dev,beats,intervals_total,intervals_rejected,ahr_bpm\n";
  for (const auto& r : records) {
    f << r.index << ',' << format_time(r.start_s) << ',' << to_string(r.status) << ','
      << format_value(r.stats.mean) << ',' << format_value(r.stats.std_dev) << ',' << r.beats
      << ',' << r.intervals_total << ',' << r.intervals_rejected << ','
      << (r.ahr_bpm ? format_value(*r.ahr_bpm) : std::string()) << '\n';
  }
}

std::vector<WindowRecord> read_window_records_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<WindowRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cols = split_csv_line(lines[i]);
    if (cols.size() != 9) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": expected 9 columns");
    }
    WindowRecord r;
    r.index = parse_count(cols[0], path, i + 1);
    r.start_s = parse_double(cols[1], path, i + 1);
    try {
      r.status = window_status_from_string(cols[2]);
    } catch (const ArgumentError& e) {
      throw IoError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    r.stats.mean = parse_double(cols[3], path, i + 1);
    r.stats.std_dev = parse_double(cols[4], path, i + 1);
    r.beats = parse_count(cols[5], path, i + 1);
    r.intervals_total = parse_count(cols[6], path, i + 1);
    r.intervals_rejected = parse_count(cols[7], path, i + 1);
    if (!cols[8].empty()) r.ahr_bpm = parse_double(cols[8], path, i + 1);
    out.push_back(r);
  }
  return out;
}

std::string missingness_json(const Missingness& m) {
  nlohmann::ordered_json j;
  j["windows_total"] = m.windows_total;
  j["windows_rejected"] = m.windows_rejected;
  j["intervals_total"] = m.intervals_total;
  j["intervals_rejected"] = m.intervals_rejected;
  j["windows_without_ahr"] = m.windows_without_ahr;
  j["fraction_missing"] = m.fraction_missing();
  return j.dump(2) + "\n";
}

void write_missingness_json(const std::filesystem::path& path, const Missingness& m) {
  write_text(path, missingness_json(m));
}

Missingness read_missingness_json(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text(path));
    Missingness m;
    m.windows_total = j.at("windows_total").get<std::size_t>();
    m.windows_rejected = j.at("windows_rejected").get<std::size_t>();
    m.intervals_total = j.at("intervals_total").get<std::size_t>();
    m.intervals_rejected = j.at("intervals_rejected").get<std::size_t>();
    m.windows_without_ahr = j.value("windows_without_ahr", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

void write_bland_altman_csv(const std::filesystem::path& path,
                            const std::vector<BlandAltmanRecord>& records) {
  auto f = open_out(path);
  f << "gt_bpm,mean_bpm,diff_bpm\n";
  for (const auto& r : records) {
    f << format_value(r.gt_bpm) << ',' << format_value(r.mean_bpm) << ','
      << format_value(r.diff_bpm) << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("short write to '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace abshr
