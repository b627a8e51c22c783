#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abshr/pipeline.hpp"
#include "abshr/synth.hpp"

namespace abshr::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Config precedence: flag overrides > config file > built-in defaults.
struct ConfigSources {
  std::optional<std::filesystem::path> config_path;
  std::map<std::string, std::string> overrides;  // field name -> text
};

PipelineConfig resolve_config(const ConfigSources& sources);

struct ProcessArgs {
  std::filesystem::path audio_path;
  std::filesystem::path out_dir;
  ConfigSources config;
  unsigned jobs = 1;
};

struct EvaluateArgs {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir;
  ConfigSources config;
  unsigned jobs = 1;
};

/// One recording of an evaluation run. Paths are resolved against the
/// manifest's directory.
struct ManifestRow {
  std::size_t line = 0;
  std::filesystem::path audio_path;
  std::optional<std::filesystem::path> rpeak_path;
  std::string participant;
  std::string day;
};

/// Parses `audio_file,rpeak_file,participant,day`. Throws IoError on a
/// malformed file or a duplicated (participant, day, audio_file) row.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

struct SynthArgs {
  std::filesystem::path spec_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
};

struct SelftestArgs {
  bool corrupt_wavelet = false;
};

int cmd_process(const ProcessArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_selftest(const SelftestArgs& args, std::ostream& out, std::ostream& err);

/// SynthSpec from JSON. `hr_bpm` is shorthand for a constant profile;
/// `hr_profile` takes [[time_s, bpm], ...]. Unknown keys are rejected.
SynthSpec parse_synth_spec(const std::string& json_text);

/// Full command line, as invoked by main().
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace abshr::cli
