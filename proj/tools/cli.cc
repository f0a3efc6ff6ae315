/* Copyright 2026 The urgent-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "urgent/audio_io.h"
#include "urgent/bandwidth.h"
#include "urgent/corpus_filter.h"
#include "urgent/error.h"
#include "urgent/evaluate.h"
#include "urgent/manifest.h"
#include "urgent/simulate.h"
#include "urgent/tsv.h"
#include "urgent/version.h"

namespace urgent::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kSeedEnv = "URGENT_FORGE_SEED";
constexpr const char* kResolvedName = "config.resolved";

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

enum class Kind { kString, kOptString, kInt, kSeed, kDouble, kOptDouble, kBool, kIntList, kDoubleList, kStringList };

bool matches(Kind kind, const ordered_json& v) {
  auto all = [&](auto pred) { return v.is_array() && std::all_of(v.begin(), v.end(), pred); };
  switch (kind) {
    case Kind::kString: return v.is_string();
    case Kind::kOptString: return v.is_string() || v.is_null();
    case Kind::kInt: return v.is_number_integer();
    case Kind::kSeed: return v.is_number_unsigned();
    case Kind::kDouble: return v.is_number();
    case Kind::kOptDouble: return v.is_number() || v.is_null();
    case Kind::kBool: return v.is_boolean();
    case Kind::kIntList: return all([](const ordered_json& e) { return e.is_number_integer(); });
    case Kind::kDoubleList: return all([](const ordered_json& e) { return e.is_number(); });
    case Kind::kStringList: return all([](const ordered_json& e) { return e.is_string(); });
  }
  return false;
}

// One subcommand's settings, resolved as flag > environment > file > default.
class Section {
 public:
  Section(std::string name, CLI::App* app) : name_(std::move(name)), app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& flags, std::string key, Kind kind, ordered_json fallback,
                      const std::string& help, bool echoed = true) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(flags, *store, help);
    if constexpr (!std::is_same_v<T, std::string> && std::is_class_v<T>) opt->delimiter(',');
    settings_.push_back({std::move(key), kind, echoed, std::move(fallback),
                         [opt] { return opt->count() > 0; }, [store] { return ordered_json(*store); }});
    return opt;
  }

  void flag(const std::string& flags, std::string key, const std::string& help) {
    auto store = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag(flags, *store, help);
    settings_.push_back({std::move(key), Kind::kBool, true, false, [opt] { return opt->count() > 0; },
                         [store] { return ordered_json(*store); }});
  }

  const std::string& name() const { return name_; }
  CLI::App* app() const { return app_; }

  ordered_json resolve(const ordered_json* file_section) const {
    ordered_json values = ordered_json::object();
    for (const Setting& s : settings_) values[s.key] = s.fallback;
    if (file_section != nullptr) {
      if (!file_section->is_object()) config_error(fmt::format("config section '{}' must be an object", name_));
      for (const auto& [key, value] : file_section->items()) {
        const Setting* s = find(key);
        if (s == nullptr) config_error(fmt::format("unknown config key '{}.{}'", name_, key));
        if (!matches(s->kind, value)) {
          config_error(fmt::format("config key '{}.{}' has the wrong type", name_, key));
        }
        values[key] = value;
      }
    }
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && find("seed") != nullptr) {
      values["seed"] = parse_seed(env);
    }
    for (const Setting& s : settings_) {
      if (s.given()) values[s.key] = s.flag_value();
    }
    return values;
  }

  // The settings that determine output content, in the config-file layout.
  ordered_json echo(const ordered_json& values) const {
    ordered_json section = ordered_json::object();
    for (const Setting& s : settings_) {
      if (s.echoed) section[s.key] = values.at(s.key);
    }
    ordered_json doc = ordered_json::object();
    doc[name_] = std::move(section);
    return doc;
  }

  static std::uint64_t parse_seed(const std::string& text) {
    std::size_t used = 0;
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(text, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (text.empty() || used != text.size() || text.front() == '-') {
      config_error(fmt::format("{}='{}' is not an unsigned 64-bit integer", kSeedEnv, text));
    }
    return seed;
  }

 private:
  struct Setting {
    std::string key;
    Kind kind;
    bool echoed;
    ordered_json fallback;
    std::function<bool()> given;
    std::function<ordered_json()> flag_value;
  };

  const Setting* find(const std::string& key) const {
    for (const Setting& s : settings_) {
      if (s.key == key) return &s;
    }
    return nullptr;
  }

  std::string name_;
  CLI::App* app_;
  std::vector<Setting> settings_;
};

template <typename T>
T get(const ordered_json& values, const char* key) {
  return values.at(key).get<T>();
}

template <typename T>
std::optional<T> get_opt(const ordered_json& values, const char* key) {
  const auto& v = values.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

std::string require_path(const ordered_json& values, const char* key) {
  auto s = get<std::string>(values, key);
  if (s.empty()) config_error(fmt::format("'{}' is required", key));
  return s;
}

std::size_t worker_count(const ordered_json& values) {
  const auto w = get<std::int64_t>(values, "workers");
  if (w < 0) config_error("workers must be >= 0");
  if (w == 0) return std::max(1U, std::thread::hardware_concurrency());
  return static_cast<std::size_t>(w);
}

template <std::size_t N>
std::array<double, N> fixed(const ordered_json& values, const char* key) {
  const auto v = get<std::vector<double>>(values, key);
  if (v.size() != N) config_error(fmt::format("'{}' needs exactly {} values", key, N));
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

void write_resolved(const Section& section, const ordered_json& values, const fs::path& dir) {
  write_text_file(dir / kResolvedName, section.echo(values).dump(2) + "\n");
}

std::vector<int> sorted_rates(const ordered_json& values) {
  auto rates = get<std::vector<int>>(values, "allowed_sfs");
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
  if (rates.empty() || rates.front() <= 0) config_error("allowed_sfs must be non-empty and positive");
  return rates;
}

int run_bandwidth(const Section& section, const ordered_json& values) {
  std::vector<std::string> paths = get<std::vector<std::string>>(values, "paths");
  if (auto list = get_opt<std::string>(values, "list")) {
    const auto listed = read_path_list(*list);
    paths.insert(paths.end(), listed.begin(), listed.end());
  }
  BandwidthOptions options;
  options.threshold_db = get<double>(values, "threshold_db");
  options.silence_floor_dbfs = get<double>(values, "silence_floor_dbfs");
  const std::vector<int> rates = sorted_rates(values);

  std::string tsv = "path\teffective_bw_hz\tchosen_sf\tstatus\n";
  std::size_t failures = 0;
  for (const std::string& path : paths) {
    try {
      const BandwidthEstimate est = estimate_effective_bandwidth(load_wav(path), options);
      tsv += fmt::format("{}\t{:.1f}\t{}\tok\n", path, est.effective_bw_hz,
                         best_matching_sf(est.effective_bw_hz, rates));
    } catch (const Error& e) {
      ++failures;
      tsv += fmt::format("{}\t-\t-\terror: {}: {}\n", path, to_string(e.code()), e.what());
    }
  }

  if (auto out = get_opt<std::string>(values, "out")) {
    write_text_file(fs::path(*out) / "bandwidth.tsv", tsv);
    write_resolved(section, values, *out);
  } else {
    std::cout << tsv;
  }
  return failures == 0 ? kExitOk : kExitPartialFailure;
}

int run_filter(const Section& section, const ordered_json& values) {
  const fs::path out = require_path(values, "out");
  const auto scores_path = get_opt<std::string>(values, "scores");
  const auto list_path = get_opt<std::string>(values, "list");
  if (!scores_path && !list_path) config_error("filter needs --scores, --list or both");

  FilterPolicy policy;
  policy.min_speech_ratio = get<double>(values, "min_speech_ratio");
  policy.min_ovrl = get_opt<double>(values, "min_ovrl");
  policy.min_sig = get_opt<double>(values, "min_sig");
  policy.min_bak = get_opt<double>(values, "min_bak");
  policy.validate();

  std::vector<ScoreRecord> scores;
  if (scores_path) scores = read_score_tsv(*scores_path);
  std::vector<std::string> paths;
  if (list_path) {
    paths = read_path_list(*list_path);
  } else {
    for (const auto& s : scores) paths.push_back(s.path);
  }
  std::vector<Candidate> candidates = join_scores(paths, scores);

  std::vector<Rejection> unreadable;
  if (policy.min_speech_ratio > 0.0) {
    std::vector<Candidate> readable;
    for (Candidate& c : candidates) {
      try {
        c.speech_ratio = speech_activity_ratio(load_wav(c.path));
        readable.push_back(std::move(c));
      } catch (const Error& e) {
        spdlog::warn("{}: {}", c.path, e.what());
        unreadable.push_back({std::move(c), "unreadable"});
      }
    }
    candidates = std::move(readable);
  }

  FilterResult result;
  try {
    result = filter_corpus(candidates, policy);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMissingScore) config_error(e.what());
    throw;
  }
  result.rejected.insert(result.rejected.end(), unreadable.begin(), unreadable.end());
  write_kept_tsv(result, out / "kept.tsv");
  write_rejected_tsv(result, out / "rejected.tsv");
  write_resolved(section, values, out);
  spdlog::info("kept {} of {} candidates", result.kept.size(), result.kept.size() + result.rejected.size());
  return unreadable.empty() ? kExitOk : kExitPartialFailure;
}

int run_manifest_cmd(const Section& section, const ordered_json& values) {
  const fs::path out = require_path(values, "out");
  SimulationConfig cfg;
  cfg.snr_range_db = fixed<2>(values, "snr_range_db");
  cfg.reverb_prob = get<double>(values, "reverb_prob");
  cfg.allowed_sfs = get<std::vector<int>>(values, "allowed_sfs");
  cfg.distortion_weights = fixed<3>(values, "distortion_weights");
  cfg.clip_ratio_range = fixed<2>(values, "clip_ratio_range");
  cfg.chunk_duration_s = get<double>(values, "chunk_duration_s");
  cfg.master_seed = get<std::uint64_t>(values, "seed");
  cfg.validate();
  const auto count = get<std::int64_t>(values, "count");
  if (count <= 0) config_error("count must be at least 1");

  std::vector<std::string> rir;
  if (auto rir_list = get_opt<std::string>(values, "rir")) rir = read_path_list(*rir_list);
  const SourceCatalog catalog = probe_sources(read_path_list(require_path(values, "speech")),
                                              read_path_list(require_path(values, "noise")), rir);
  const Manifest manifest = generate_manifest(catalog, cfg, static_cast<std::size_t>(count));
  write_manifest(manifest, out / "manifest.jsonl");
  write_resolved(section, values, out);
  return kExitOk;
}

int run_simulate(const Section& section, const ordered_json& values) {
  const fs::path out = require_path(values, "out");
  const Manifest manifest = read_manifest(require_path(values, "manifest"));
  SimulationOptions options;
  options.chunk_duration_s = manifest.header.chunk_duration_s;
  options.degrade.reverb.early_reflections_ms = get_opt<double>(values, "early_reflections_ms");
  options.degrade.reverberate_noise = get<bool>(values, "reverberate_noise");
  if (options.degrade.reverb.early_reflections_ms && !(*options.degrade.reverb.early_reflections_ms >= 0.0)) {
    config_error("early_reflections_ms must be >= 0");
  }

  const SimulationReport report = run_manifest(manifest, out, worker_count(values), options);
  write_text_file(out / "report.tsv", format_report_tsv(report));
  if (get<bool>(values, "timing")) write_text_file(out / "timing.tsv", format_timing_tsv(report));
  write_resolved(section, values, out);
  for (const EntryStatus& s : report.entries) {
    if (!s.ok) spdlog::error("{}: {}", s.id, s.failure);
  }
  std::cerr << fmt::format("simulated {} of {} entries\n", report.succeeded(), report.entries.size());
  return report.failed() == 0 ? kExitOk : kExitPartialFailure;
}

int run_evaluate(const Section& section, const ordered_json& values) {
  const fs::path out = require_path(values, "out");
  const auto pairs = read_pairs_tsv(require_path(values, "pairs"));
  EvaluateOptions options;
  options.strict_sample_rate = get<bool>(values, "strict_sf");
  options.duration_weighted = get<bool>(values, "duration_weighted");
  options.workers = worker_count(values);

  const MetricReport report = evaluate_pairlist(pairs, options);
  const std::string table = format_report_table(report);
  write_text_file(out / "report.json", format_report_json(report));
  write_text_file(out / "report.txt", table);
  write_resolved(section, values, out);
  for (const FileMetrics& f : report.per_file) {
    for (const auto& failure : f.failures) spdlog::error("{} ({}): {}", f.id, f.estimate, failure);
  }
  std::cout << table;
  return report.failed_files == 0 ? kExitOk : kExitPartialFailure;
}

ordered_json default_rates() { return ordered_json(kSupportedSampleRates); }

}  // namespace

int run_cli(int argc, const char* const* argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("urgent-forge"));
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Speech degradation simulation and objective evaluation", "urgent-forge"};
  app.set_version_flag("--version", fmt::format("urgent-forge {} (manifest format {}, report format {})",
                                                tool_version(), kManifestFormatVersion, kReportFormatVersion));
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string log_level = "warn";
  app.add_option("--config", config_path, "JSON config file with one object per subcommand");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::vector<std::unique_ptr<Section>> sections;
  std::vector<std::function<int(const Section&, const ordered_json&)>> handlers;
  auto add = [&](const char* name, const char* help, auto handler) -> Section& {
    sections.push_back(std::make_unique<Section>(name, app.add_subcommand(name, help)));
    handlers.emplace_back(handler);
    return *sections.back();
  };

  Section& bw = add("bandwidth", "Estimate effective bandwidth and best-matching rate per file", run_bandwidth);
  bw.option<std::vector<std::string>>("paths", "paths", Kind::kStringList, ordered_json::array(), "WAV files");
  bw.option<std::string>("--list", "list", Kind::kOptString, nullptr, "File with one WAV path per line");
  bw.option<std::string>("--out", "out", Kind::kOptString, nullptr, "Output directory (default: TSV on stdout)");
  bw.option<double>("--threshold-db", "threshold_db", Kind::kDouble, -50.0, "Edge threshold relative to the peak");
  bw.option<double>("--silence-floor-dbfs", "silence_floor_dbfs", Kind::kDouble, -100.0,
                    "Peak level below which a file counts as silent");
  bw.option<std::vector<int>>("--allowed-sfs", "allowed_sfs", Kind::kIntList, default_rates(),
                              "Candidate rates, comma separated");

  Section& flt = add("filter", "Screen speech files by activity ratio and quality scores", run_filter);
  flt.option<std::string>("--scores", "scores", Kind::kOptString, nullptr, "TSV: path, ovrl, sig, bak");
  flt.option<std::string>("--list", "list", Kind::kOptString, nullptr, "Candidate paths (default: score rows)");
  flt.option<std::string>("--out", "out", Kind::kString, "", "Output directory");
  flt.option<double>("--min-speech-ratio", "min_speech_ratio", Kind::kDouble, 0.0, "Minimum active fraction");
  flt.option<double>("--min-ovrl", "min_ovrl", Kind::kOptDouble, nullptr, "Minimum OVRL score");
  flt.option<double>("--min-sig", "min_sig", Kind::kOptDouble, nullptr, "Minimum SIG score");
  flt.option<double>("--min-bak", "min_bak", Kind::kOptDouble, nullptr, "Minimum BAK score");

  const SimulationConfig sim_defaults;
  Section& man = add("manifest", "Generate a deterministic simulation manifest", run_manifest_cmd);
  man.option<std::string>("--speech", "speech", Kind::kString, "", "Speech path list");
  man.option<std::string>("--noise", "noise", Kind::kString, "", "Noise path list");
  man.option<std::string>("--rir", "rir", Kind::kOptString, nullptr, "RIR path list");
  man.option<std::int64_t>("--count", "count", Kind::kInt, 0, "Number of entries");
  man.option<std::uint64_t>("--seed", "seed", Kind::kSeed, sim_defaults.master_seed,
                            fmt::format("Master seed (environment: {})", kSeedEnv));
  man.option<std::vector<double>>("--snr-range", "snr_range_db", Kind::kDoubleList, sim_defaults.snr_range_db,
                                  "low,high in dB");
  man.option<double>("--reverb-prob", "reverb_prob", Kind::kDouble, sim_defaults.reverb_prob,
                     "Probability of reverberation");
  man.option<std::vector<int>>("--allowed-sfs", "allowed_sfs", Kind::kIntList, sim_defaults.allowed_sfs,
                               "Output rates, comma separated");
  man.option<std::vector<double>>("--distortion-weights", "distortion_weights", Kind::kDoubleList,
                                  sim_defaults.distortion_weights,
                                  "Weights of none, bandwidth_limitation, clipping");
  man.option<std::vector<double>>("--clip-range", "clip_ratio_range", Kind::kDoubleList,
                                  sim_defaults.clip_ratio_range, "low,high clip ratio");
  man.option<double>("--chunk-duration", "chunk_duration_s", Kind::kDouble, sim_defaults.chunk_duration_s,
                     "Chunk length in seconds");
  man.option<std::string>("--out", "out", Kind::kString, "", "Output directory");

  Section& sim = add("simulate", "Render every manifest entry to degraded/reference WAVs", run_simulate);
  sim.option<std::string>("--manifest", "manifest", Kind::kString, "", "Manifest file");
  sim.option<std::string>("--out", "out", Kind::kString, "", "Output directory");
  sim.option<std::int64_t>("--workers", "workers", Kind::kInt, 1, "Worker threads (0: one per core)", false);
  sim.option<double>("--early-reflections", "early_reflections_ms", Kind::kOptDouble, nullptr,
                     "Keep this many ms after the direct path in the reference");
  sim.flag("--reverberate-noise", "reverberate_noise", "Convolve the noise with the RIR as well");
  sim.flag("--timing", "timing", "Also write per-entry timing to timing.tsv");

  Section& ev = add("evaluate", "Score (reference, estimate) pairs", run_evaluate);
  ev.option<std::string>("--pairs", "pairs", Kind::kString, "", "TSV: reference, estimate");
  ev.option<std::string>("--out", "out", Kind::kString, "", "Output directory");
  ev.flag("--strict-sf", "strict_sf", "Fail a pair on rate mismatch instead of resampling");
  ev.flag("--duration-weighted", "duration_weighted", "Weight aggregates by reference duration");
  ev.option<std::int64_t>("--workers", "workers", Kind::kInt, 1, "Worker threads (0: one per core)", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    ordered_json file = ordered_json::object();
    if (!config_path.empty()) {
      try {
        file = ordered_json::parse(read_text_file(config_path));
      } catch (const ordered_json::parse_error& e) {
        config_error(fmt::format("{}: {}", config_path, e.what()));
      }
      if (!file.is_object()) config_error(config_path + ": top level must be an object");
      for (const auto& [key, value] : file.items()) {
        const bool known = std::any_of(sections.begin(), sections.end(),
                                       [&](const auto& s) { return s->name() == key; });
        if (!known) config_error(fmt::format("{}: unknown section '{}'", config_path, key));
      }
    }
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const Section& s = *sections[i];
      if (!s.app()->parsed()) continue;
      const ordered_json* file_section = file.contains(s.name()) ? &file[s.name()] : nullptr;
      return handlers[i](s, s.resolve(file_section));
    }
  } catch (const Error& e) {
    std::cerr << "urgent-forge: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kParameter ? kExitConfigError
                                                                               : kExitPartialFailure;
  } catch (const std::exception& e) {
    std::cerr << "urgent-forge: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  return kExitConfigError;
}

}  // namespace urgent::cli
