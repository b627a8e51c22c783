#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "abshr/config.hpp"
#include "abshr/error.hpp"
#include "abshr/evaluation.hpp"
#include "abshr/io.hpp"
#include "abshr/selftest.hpp"
#include "abshr/wav.hpp"

namespace abshr::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kIhrPairing = "nearest one-to-one within 0.5 s";
constexpr const char* kAhrPairing = "window index";

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

// Round-trips a series through the published CSV formatting so evaluation
// sees exactly the values written to disk.
HrSeries as_published(const HrSeries& s) {
  HrSeries out = s;
  for (auto& x : out.samples) {
    x.time_s = std::stod(format_time(x.time_s));
    x.bpm = std::stod(format_value(x.bpm));
  }
  return out;
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson missingness_to_json(const Missingness& m) {
  return ojson::parse(missingness_json(m));
}

ojson metrics_json(const std::optional<EvalReport>& r, std::size_t unpaired_pred,
                   std::size_t unpaired_truth, const char* pairing) {
  ojson j;
  if (r) {
    j["mde_bpm"] = number_or_null(r->mde_bpm);
    j["mae_bpm"] = number_or_null(r->mae_bpm);
    j["mape_pct"] = number_or_null(r->mape_pct);
    j["n_pairs"] = r->n_pairs;
  } else {
    j["mde_bpm"] = nullptr;
    j["mae_bpm"] = nullptr;
    j["mape_pct"] = nullptr;
    j["n_pairs"] = 0;
  }
  j["unpaired_predictions"] = unpaired_pred;
  j["unpaired_truths"] = unpaired_truth;
  j["pairing"] = pairing;
  return j;
}

std::optional<EvalReport> maybe_metrics(const std::vector<PairedSample>& pairs) {
  if (pairs.empty()) return std::nullopt;
  return metrics(pairs);
}

struct RowOutcome {
  bool skipped = false;
  bool failed = false;
  std::string message;
  fs::path dir;
  std::optional<EvalReport> ihr;
  std::optional<EvalReport> ahr;
  Alignment ihr_alignment;
  Alignment ahr_alignment;
  Missingness missingness;
};

void write_process_outputs(const fs::path& dir, const PipelineResult& r,
                           const PipelineConfig& config) {
  ensure_dir(dir);
  write_hr_csv(dir / "ihr.csv", r.ihr);
  write_hr_csv(dir / "ahr.csv", r.ahr);
  write_missingness_json(dir / "missingness.json", r.missingness);
  write_window_records_csv(dir / "windows.csv", r.windows);
  write_text(dir / "config.json", config_to_json(config));
}

std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return out;
}

RowOutcome evaluate_row(const ManifestRow& row, std::size_t ordinal, const fs::path& out_dir,
                        const PipelineConfig& config) {
  RowOutcome o;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%03zu", ordinal);
  o.dir = out_dir / "rows" / (std::string(prefix) + "_" + safe_name(row.participant) + "_" +
                              safe_name(row.day));
  if (!row.rpeak_path) {
    o.skipped = true;
    o.message = "no ground truth";
    return o;
  }
  try {
    const GroundTruth gt = read_ground_truth(*row.rpeak_path);
    const PipelineResult r = run_pipeline(read_wav(row.audio_path), config);
    write_process_outputs(o.dir, r, config);
    o.missingness = r.missingness;

    std::vector<double> starts;
    for (const auto& w : r.windows) starts.push_back(w.start_s);
    HrSeries truth_ihr, truth_ahr;
    if (gt.rpeaks) {
      truth_ihr = ecg_hr(*gt.rpeaks);
      truth_ahr = windowed_ahr(truth_ihr, starts, config);
    } else {
      truth_ihr = filter_kind(*gt.series, HrKind::instantaneous);
      truth_ahr = filter_kind(*gt.series, HrKind::window_average);
      if (truth_ahr.empty()) truth_ahr = windowed_ahr(truth_ihr, starts, config);
    }

    o.ihr_alignment = align(as_published(r.ihr), truth_ihr, kIhrPairingToleranceS);
    // Window centres sit one hop apart, so half a hop pairs by window index.
    o.ahr_alignment = align(as_published(r.ahr), truth_ahr, config.hop_s() / 2.0);
    o.ihr = maybe_metrics(o.ihr_alignment.pairs);
    o.ahr = maybe_metrics(o.ahr_alignment.pairs);
    GroupKeys keys{row.participant, row.day};
    for (auto* rep : {&o.ihr, &o.ahr}) {
      if (*rep) {
        (*rep)->missingness = r.missingness;
        (*rep)->group_keys = keys;
      }
    }

    ojson report;
    report["audio_file"] = row.audio_path.string();
    report["ground_truth_file"] = row.rpeak_path->string();
    report["participant"] = row.participant;
    report["day"] = row.day;
    report["ihr"] = metrics_json(o.ihr, o.ihr_alignment.unpaired_predictions,
                                 o.ihr_alignment.unpaired_truths, kIhrPairing);
    report["ahr"] = metrics_json(o.ahr, o.ahr_alignment.unpaired_predictions,
                                 o.ahr_alignment.unpaired_truths, kAhrPairing);
    report["missingness"] = missingness_to_json(r.missingness);
    write_text(o.dir / "report.json", report.dump(2) + "\n");
    write_bland_altman_csv(o.dir / "ba_ihr.csv", o.ihr ? o.ihr->bland_altman
                                                       : std::vector<BlandAltmanRecord>{});
    write_bland_altman_csv(o.dir / "ba_ahr.csv", o.ahr ? o.ahr->bland_altman
                                                       : std::vector<BlandAltmanRecord>{});
  } catch (const Error& e) {
    o.failed = true;
    o.message = e.what();
  }
  return o;
}

ojson group_json(const std::vector<GroupReport>& ihr, const std::vector<GroupReport>& ahr,
                 const std::map<std::string, Missingness>& missing) {
  ojson groups = ojson::object();
  std::set<std::string> keys;
  for (const auto& g : ihr) keys.insert(g.key);
  for (const auto& g : ahr) keys.insert(g.key);
  for (const auto& [k, m] : missing) keys.insert(k);
  for (const auto& k : keys) {
    ojson j;
    auto find = [&](const std::vector<GroupReport>& v) -> std::optional<EvalReport> {
      for (const auto& g : v) {
        if (g.key == k) return g.report;
      }
      return std::nullopt;
    };
    j["ihr"] = metrics_json(find(ihr), 0, 0, kIhrPairing);
    j["ahr"] = metrics_json(find(ahr), 0, 0, kAhrPairing);
    j["ihr"].erase("unpaired_predictions");
    j["ihr"].erase("unpaired_truths");
    j["ahr"].erase("unpaired_predictions");
    j["ahr"].erase("unpaired_truths");
    if (auto it = missing.find(k); it != missing.end()) {
      j["missingness"] = missingness_to_json(it->second);
    }
    groups[k] = j;
  }
  return groups;
}

}  // namespace

PipelineConfig resolve_config(const ConfigSources& sources) {
  PipelineConfig config;
  if (sources.config_path) config = load_config(*sources.config_path);
  for (const auto& [name, text] : sources.overrides) {
    const auto& fields = config_fields();
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const ConfigField& f) { return f.name == name; });
    if (it == fields.end()) throw ArgumentError("unknown config key '" + name + "'");
    set_config_field(config, *it, text);
  }
  config.validate();
  return config;
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest '" + path.string() + "'");
  const fs::path base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cols = split_csv_line(line);
    if (!header) {
      if (cols != std::vector<std::string>{"audio_file", "rpeak_file", "participant", "day"}) {
        throw IoError("'" + path.string() +
                      "': expected header 'audio_file,rpeak_file,participant,day'");
      }
      header = true;
      continue;
    }
    if (cols.size() != 4) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
    }
    if (cols[0].empty()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": empty audio_file");
    }
    ManifestRow row;
    row.line = lineno;
    row.audio_path = base / cols[0];
    if (!cols[1].empty()) row.rpeak_path = base / cols[1];
    row.participant = cols[2];
    row.day = cols[3];
    if (!seen.insert({row.participant, row.day, cols[0]}).second) {
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": duplicate (participant, day, audio_file) row");
    }
    rows.push_back(std::move(row));
  }
  if (!header) throw IoError("manifest '" + path.string() + "' is empty");
  return rows;
}

int cmd_process(const ProcessArgs& args, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  try {
    config = resolve_config(args.config);
  } catch (const Error& e) {
    err << "abshr: error: bad config: " << e.what() << '\n';
    return kUsage;
  }
  try {
    const AudioSegment audio = read_wav(args.audio_path);
    const PipelineResult r = run_pipeline(audio, config, RunOptions{args.jobs});
    write_process_outputs(args.out_dir, r, config);
    out << "processed " << args.audio_path.string() << ": " << r.ihr.size() << " iHR, "
        << r.ahr.size() << " aHR samples; " << r.missingness.windows_rejected << "/"
        << r.missingness.windows_total << " windows rejected, "
        << r.missingness.intervals_rejected << "/" << r.missingness.intervals_total
        << " intervals rejected\n";
    return kOk;
  } catch (const Error& e) {
    err << "abshr: error: " << args.audio_path.string() << ": " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  std::vector<ManifestRow> rows;
  try {
    config = resolve_config(args.config);
    rows = read_manifest(args.manifest_path);
  } catch (const Error& e) {
    err << "abshr: error: " << e.what() << '\n';
    return kUsage;
  }

  std::vector<std::string> problems;
  for (const auto& row : rows) {
    if (!fs::is_regular_file(row.audio_path)) {
      problems.push_back("line " + std::to_string(row.line) + ": missing audio file '" +
                         row.audio_path.string() + "'");
    }
    if (row.rpeak_path && !fs::is_regular_file(*row.rpeak_path)) {
      problems.push_back("line " + std::to_string(row.line) + ": missing ground-truth file '" +
                         row.rpeak_path->string() + "'");
    }
  }
  if (!problems.empty()) {
    err << "abshr: error: manifest '" << args.manifest_path.string()
        << "' references missing files:\n";
    for (const auto& p : problems) err << "  " << p << '\n';
    return kFailure;
  }

  try {
    ensure_dir(args.out_dir);
    write_text(args.out_dir / "config.json", config_to_json(config));
  } catch (const Error& e) {
    err << "abshr: error: " << e.what() << '\n';
    return kFailure;
  }

  std::vector<RowOutcome> outcomes(rows.size());
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) {
        outcomes[i] = evaluate_row(rows[i], i, args.out_dir, config);
      }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(args.jobs, static_cast<unsigned>(rows.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  std::vector<EvalReport> ihr_reports, ahr_reports;
  std::vector<PairedSample> ihr_all, ahr_all;
  Missingness overall_missing;
  std::map<std::string, Missingness> by_participant_missing, by_day_missing;
  ojson skipped = ojson::array();
  ojson failed = ojson::array();
  ojson per_row = ojson::array();
  bool any_failed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& o = outcomes[i];
    if (o.skipped) {
      err << "abshr: warning: line " << row.line << " (" << row.audio_path.string()
          << "): " << o.message << ", row skipped\n";
      skipped.push_back({{"line", row.line}, {"audio_file", row.audio_path.string()},
                         {"reason", o.message}});
      continue;
    }
    if (o.failed) {
      any_failed = true;
      err << "abshr: error: line " << row.line << " (" << row.audio_path.string()
          << "): " << o.message << '\n';
      failed.push_back({{"line", row.line}, {"audio_file", row.audio_path.string()},
                        {"reason", o.message}});
      continue;
    }
    overall_missing += o.missingness;
    by_participant_missing[row.participant] += o.missingness;
    by_day_missing[row.day] += o.missingness;
    if (o.ihr) {
      ihr_reports.push_back(*o.ihr);
      ihr_all.insert(ihr_all.end(), o.ihr->pairs.begin(), o.ihr->pairs.end());
    }
    if (o.ahr) {
      ahr_reports.push_back(*o.ahr);
      ahr_all.insert(ahr_all.end(), o.ahr->pairs.begin(), o.ahr->pairs.end());
    }
    per_row.push_back({{"line", row.line}, {"dir", fs::relative(o.dir, args.out_dir).string()}});
  }

  try {
    const auto ihr_overall = maybe_metrics(ihr_all);
    const auto ahr_overall = maybe_metrics(ahr_all);
    ojson overall;
    overall["ihr"] = metrics_json(ihr_overall, 0, 0, kIhrPairing);
    overall["ahr"] = metrics_json(ahr_overall, 0, 0, kAhrPairing);
    overall["ihr"].erase("unpaired_predictions");
    overall["ihr"].erase("unpaired_truths");
    overall["ahr"].erase("unpaired_predictions");
    overall["ahr"].erase("unpaired_truths");
    overall["missingness"] = missingness_to_json(overall_missing);
    overall["rows"] = per_row;
    overall["skipped_rows"] = skipped;
    overall["failed_rows"] = failed;
    write_text(args.out_dir / "overall.json", overall.dump(2) + "\n");
    write_text(args.out_dir / "by_participant.json",
               group_json(aggregate(ihr_reports, GroupBy::participant),
                          aggregate(ahr_reports, GroupBy::participant), by_participant_missing)
                       .dump(2) +
                   "\n");
    write_text(args.out_dir / "by_day.json",
               group_json(aggregate(ihr_reports, GroupBy::day),
                          aggregate(ahr_reports, GroupBy::day), by_day_missing)
                       .dump(2) +
                   "\n");
    write_bland_altman_csv(args.out_dir / "ba_ihr.csv",
                           ihr_overall ? ihr_overall->bland_altman
                                       : std::vector<BlandAltmanRecord>{});
    write_bland_altman_csv(args.out_dir / "ba_ahr.csv",
                           ahr_overall ? ahr_overall->bland_altman
                                       : std::vector<BlandAltmanRecord>{});
    out << "evaluated " << per_row.size() << " of " << rows.size() << " rows";
    if (ahr_overall) out << "; aHR MAE " << format_value(ahr_overall->mae_bpm) << " BPM";
    if (ihr_overall) out << "; iHR MAE " << format_value(ihr_overall->mae_bpm) << " BPM";
    out << '\n';
  } catch (const Error& e) {
    err << "abshr: error: " << e.what() << '\n';
    return kFailure;
  }
  return any_failed ? kFailure : kOk;
}

SynthSpec parse_synth_spec(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("synth spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("synth spec must be a JSON object");

  SynthSpec s;
  auto number = [&](const std::string& key, const ojson& v) {
    if (!v.is_number()) throw ArgumentError("synth field '" + key + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "duration_s") s.duration_s = number(key, v);
    else if (key == "sample_rate_hz") s.sample_rate_hz = number(key, v);
    else if (key == "hr_bpm") s.hr_profile = {{0.0, number(key, v)}};
    else if (key == "hr_profile") {
      if (!v.is_array() || v.empty()) {
        throw ArgumentError("synth field 'hr_profile' must be a non-empty array of [time_s, bpm]");
      }
      s.hr_profile.clear();
      for (const auto& knot : v) {
        if (!knot.is_array() || knot.size() != 2) {
          throw ArgumentError("synth field 'hr_profile' entries must be [time_s, bpm]");
        }
        s.hr_profile.push_back({number(key, knot[0]), number(key, knot[1])});
      }
    }
    else if (key == "s1_amplitude") s.s1_amplitude = number(key, v);
    else if (key == "s2_amplitude") s.s2_amplitude = number(key, v);
    else if (key == "s2_delay_s") s.s2_delay_s = number(key, v);
    else if (key == "s1_center_hz") s.s1_center_hz = number(key, v);
    else if (key == "s1_fwhm_s") s.s1_fwhm_s = number(key, v);
    else if (key == "gi_noise_snr_db") {
      if (!v.is_null()) s.gi_noise_snr_db = number(key, v);
    }
    else if (key == "respiration_rate_bpm") {
      if (!v.is_null()) s.respiration_rate_bpm = number(key, v);
    }
    else if (key == "motion_spike_rate_per_min") s.motion_spike_rate_per_min = number(key, v);
    else if (key == "rng_seed") {
      if (!v.is_number_unsigned()) {
        throw ArgumentError("synth field 'rng_seed' must be a non-negative integer");
      }
      s.rng_seed = v.get<std::uint64_t>();
    }
    else throw ArgumentError("unknown synth field '" + key + "'");
  }
  return s;
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  SynthSpec spec;
  try {
    spec = parse_synth_spec(read_text(args.spec_path));
    if (args.seed) spec.rng_seed = *args.seed;
    spec.validate();
  } catch (const Error& e) {
    err << "abshr: error: " << args.spec_path.string() << ": " << e.what() << '\n';
    return kUsage;
  }
  try {
    const SynthOutput s = synthesize(spec);
    ensure_dir(args.out_dir);
    write_wav(args.out_dir / "audio.wav", s.audio, WavEncoding::float32);
    write_times_csv(args.out_dir / "true_beats.csv", s.true_beat_times_s);
    write_hr_csv(args.out_dir / "true_hr.csv", s.true_hr);
    write_times_csv(args.out_dir / "motion_spikes.csv", s.motion_spike_times_s);
    out << "synthesized " << format_value(spec.duration_s) << " s at "
        << format_value(spec.sample_rate_hz) << " Hz: " << s.true_beat_times_s.size()
        << " beats, " << s.motion_spike_times_s.size() << " motion spikes\n";
    return kOk;
  } catch (const Error& e) {
    err << "abshr: error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_selftest(const SelftestArgs& args, std::ostream& out, std::ostream& /*err*/) {
  SelftestOptions options;
  if (args.corrupt_wavelet) options.basis = corrupted_basis(coif4());
  bool all = true;
  for (const auto& c : run_selftest(options)) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
    all = all && c.passed;
  }
  return all ? kOk : kFailure;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heart rate from abdominal audio"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "abshr 0.1.0");

  ProcessArgs process;
  EvaluateArgs evaluate;
  SynthArgs synth;
  SelftestArgs selftest;
  std::map<std::string, std::string> overrides;
  std::optional<std::string> config_path;
  std::uint64_t seed = 0;

  auto add_config_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config (JSON, or TOML by .toml extension)");
    for (const auto& f : config_fields()) {
      auto flag = "--" + f.name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      cmd->add_option_function<std::string>(
             flag, [&overrides, name = f.name](const std::string& v) { overrides[name] = v; },
             f.help)
          ->group("Pipeline overrides");
    }
  };

  auto* p = app.add_subcommand("process", "estimate iHR/aHR for one WAV recording");
  p->add_option("audio", process.audio_path, "input WAV")->required();
  p->add_option("--out", process.out_dir, "output directory")->required();
  p->add_option("--jobs", process.jobs, "worker threads for window processing")
      ->check(CLI::PositiveNumber);
  add_config_flags(p);

  auto* e = app.add_subcommand("evaluate", "run the pipeline over a manifest and score it");
  e->add_option("manifest", evaluate.manifest_path, "manifest CSV")->required();
  e->add_option("--out", evaluate.out_dir, "output directory")->required();
  e->add_option("--jobs", evaluate.jobs, "rows processed in parallel")->check(CLI::PositiveNumber);
  add_config_flags(e);

  auto* s = app.add_subcommand("synth", "generate a synthetic recording with ground truth");
  s->add_option("spec", synth.spec_path, "synth spec JSON")->required();
  s->add_option("--out", synth.out_dir, "output directory")->required();
  auto* seed_opt = s->add_option("--seed", seed, "override the spec's rng_seed");

  auto* t = app.add_subcommand("selftest", "run the embedded invariant suite");
  t->add_flag("--inject-fault-wavelet", selftest.corrupt_wavelet,
              "corrupt the wavelet filters to exercise failure reporting")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  ConfigSources sources;
  if (config_path) sources.config_path = *config_path;
  sources.overrides = overrides;
  if (*p) {
    process.config = sources;
    return cmd_process(process, out, err);
  }
  if (*e) {
    evaluate.config = sources;
    return cmd_evaluate(evaluate, out, err);
  }
  if (*s) {
    if (*seed_opt) synth.seed = seed;
    return cmd_synth(synth, out, err);
  }
  return cmd_selftest(selftest, out, err);
}

}  // namespace abshr::cli
