#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abshr/evaluation.hpp"
#include "abshr/hr.hpp"
#include "abshr/pipeline.hpp"

namespace abshr {

// Fixed float formatting shared by every writer: 6 significant digits for
// values, 6 decimals for timestamps.
std::string format_value(double v);
std::string format_time(double t);

/// `time_s,bpm,kind` rows.
void write_hr_csv(std::ostream& out, const HrSeries& series);
void write_hr_csv(const std::filesystem::path& path, const HrSeries& series);
HrSeries read_hr_csv(const std::filesystem::path& path);

/// One timestamp per line with an optional `time_s` header.
void write_times_csv(const std::filesystem::path& path, const std::vector<double>& times);
RPeakAnnotations read_rpeaks_csv(const std::filesystem::path& path);

/// Either R-peak timestamps or a pre-computed HR series in the pipeline's
/// output schema; the header decides which.
struct GroundTruth {
  std::optional<RPeakAnnotations> rpeaks;
  std::optional<HrSeries> series;
};
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Per-window records: index,start_s,status,mean,std_dev,beats,
/// intervals_total,intervals_rejected,ahr_bpm (empty when absent).
void write_window_records_csv(const std::filesystem::path& path,
                              const std::vector<WindowRecord>& records);
std::vector<WindowRecord> read_window_records_csv(const std::filesystem::path& path);

/// `{windows_total, windows_rejected, intervals_total, intervals_rejected,
/// fraction_missing}` as pretty-printed JSON.
std::string missingness_json(const Missingness& m);
void write_missingness_json(const std::filesystem::path& path, const Missingness& m);
Missingness read_missingness_json(const std::filesystem::path& path);

/// `gt_bpm,mean_bpm,diff_bpm` rows.
void write_bland_altman_csv(const std::filesystem::path& path,
                            const std::vector<BlandAltmanRecord>& records);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Splits one CSV line on commas and trims surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace abshr
