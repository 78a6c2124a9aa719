// musiclab command-line interface: scenario generation, market simulation,
// one-shot ranking, and metric reports. All computation goes through the C
// API in musiclab.h; this file owns flags and file formats.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "musiclab.h"

namespace fs = std::filesystem;
using json = nlohmann::json;
using mlcli::RuntimeFailure;
using mlcli::UsageError;

namespace {

constexpr const char* kScenarioFormat = "musiclab-scenario-v1";
constexpr const char* kSummaryFormat = "musiclab-summary-v1";
constexpr const char* kTraceHeader = "step,song,sampled,downloaded,q_est,position,ranking_hash";

void check_ml(ml_status status, const std::string& context) {
  if (status == ML_OK) return;
  throw RuntimeFailure(context + ": " + ml_status_name(status) + " (" + ml_last_error() + ")");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw UsageError("unknown key '" + item.key() + "' in " + where);
}

std::vector<double> double_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw UsageError(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw UsageError(where + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

ml_transform transform_from(const std::string& name) {
  if (name == "identity") return ML_TRANSFORM_IDENTITY;
  if (name == "log1p") return ML_TRANSFORM_LOG1P;
  if (name == "sqrt") return ML_TRANSFORM_SQRT;
  throw UsageError("unknown transform '" + name + "' (expected identity|log1p|sqrt)");
}

ml_policy policy_from(const std::string& name) {
  if (name == "d-rank") return ML_POLICY_DOWNLOAD_RANK;
  if (name == "p-rank") return ML_POLICY_PERFORMANCE_RANK;
  if (name == "rand-rank") return ML_POLICY_RANDOM_RANK;
  throw UsageError("unknown policy '" + name + "' (expected d-rank|p-rank|rand-rank)");
}

ml_condition condition_from(const std::string& name) {
  if (name == "si") return ML_CONDITION_SOCIAL_INFLUENCE;
  if (name == "in") return ML_CONDITION_INDEPENDENT;
  throw UsageError("unknown condition '" + name + "' (expected si|in)");
}

ml_quality_source quality_source_from(const std::string& name) {
  if (name == "true") return ML_QUALITY_TRUE;
  if (name == "estimated") return ML_QUALITY_ESTIMATED;
  throw UsageError("unknown quality source '" + name + "' (expected true|estimated)");
}

/* ------------------------------------------------------------------ */
/* Scenario files                                                      */
/* ------------------------------------------------------------------ */

struct Scenario {
  std::string kind = "gaussian";  // gaussian | negative-correlation | explicit
  int n = 50;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  double gamma = 0.8;
  int uptick_len = 5;
  double uptick_ratio = 1.2;
  double jitter_sd = 0.05;
  std::vector<double> appeal;
  std::vector<double> quality;
  std::vector<double> visibility;
};

void generate_scenario_vectors(Scenario& s) {
  const bool all_present = !s.appeal.empty() && !s.quality.empty() && !s.visibility.empty();
  const bool any_present = !s.appeal.empty() || !s.quality.empty() || !s.visibility.empty();
  if (s.kind == "explicit") {
    if (!all_present)
      throw UsageError("explicit scenario requires appeal, quality, and visibility vectors");
    return;
  }
  if (all_present) return;  // vectors came from the file
  if (any_present)
    throw UsageError("scenario carries a partial vector set; provide all of "
                     "appeal/quality/visibility or none");
  s.appeal.resize(static_cast<std::size_t>(s.n));
  s.quality.resize(static_cast<std::size_t>(s.n));
  s.visibility.resize(static_cast<std::size_t>(s.n));
  if (s.kind == "gaussian") {
    check_ml(ml_gaussian_setting(s.n, s.seed, s.appeal.data(), s.quality.data()),
             "gaussian setting");
  } else if (s.kind == "negative-correlation") {
    check_ml(ml_negative_correlation_setting(s.n, s.seed, s.jitter_sd, s.appeal.data(),
                                             s.quality.data()),
             "negative-correlation setting");
  } else {
    throw UsageError("unknown scenario kind '" + s.kind + "'");
  }
  check_ml(ml_visibility_profile(s.n, s.gamma, s.uptick_len, s.uptick_ratio,
                                 s.visibility.data()),
           "visibility profile");
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["format"] = kScenarioFormat;
  j["kind"] = s.kind;
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["alpha"] = s.alpha;
  j["params"] = {{"gamma", s.gamma},
                 {"uptick_len", s.uptick_len},
                 {"uptick_ratio", s.uptick_ratio},
                 {"jitter_sd", s.jitter_sd}};
  j["appeal"] = s.appeal;
  j["quality"] = s.quality;
  j["visibility"] = s.visibility;
  return j;
}

Scenario scenario_from_json(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"format", "kind", "n", "seed", "alpha", "params", "appeal",
                          "quality", "visibility"},
                      where);
  Scenario s;
  if (j.contains("format") && j.at("format") != kScenarioFormat)
    throw UsageError(where + ": unsupported scenario format");
  if (j.contains("kind")) s.kind = j.at("kind").get<std::string>();
  if (j.contains("n")) s.n = j.at("n").get<int>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown_keys(p, {"gamma", "uptick_len", "uptick_ratio", "jitter_sd"},
                        where + ".params");
    if (p.contains("gamma")) s.gamma = p.at("gamma").get<double>();
    if (p.contains("uptick_len")) s.uptick_len = p.at("uptick_len").get<int>();
    if (p.contains("uptick_ratio")) s.uptick_ratio = p.at("uptick_ratio").get<double>();
    if (p.contains("jitter_sd")) s.jitter_sd = p.at("jitter_sd").get<double>();
  }
  if (j.contains("appeal")) s.appeal = double_vector(j.at("appeal"), where + ".appeal");
  if (j.contains("quality")) s.quality = double_vector(j.at("quality"), where + ".quality");
  if (j.contains("visibility"))
    s.visibility = double_vector(j.at("visibility"), where + ".visibility");
  if (!s.appeal.empty()) s.n = static_cast<int>(s.appeal.size());
  if (!s.quality.empty() && (s.quality.size() != s.appeal.size() ||
                             s.visibility.size() != s.appeal.size()))
    throw UsageError(where + ": appeal, quality, and visibility lengths differ");
  return s;
}

Scenario load_scenario_file(const fs::path& path) {
  json j;
  try {
    j = json::parse(mlcli::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("cannot parse scenario file " + path.string() + ": " + e.what());
  }
  Scenario s = scenario_from_json(j, path.string());
  generate_scenario_vectors(s);
  return s;
}

/* ------------------------------------------------------------------ */
/* Experiment configuration                                            */
/* ------------------------------------------------------------------ */

struct SimSettings {
  std::int64_t iterations = 20000;
  std::int64_t refresh_rate = 1;
  std::int64_t snapshot_stride = 100;
  std::int64_t estimate_samples = 10;
  int worlds = 400;
  int threads = 0;
  std::uint64_t master_seed = 0;
  std::string transform = "identity";
};

struct PolicySettings {
  std::string kind = "p-rank";
  std::string condition = "si";
  std::string quality = "estimated";
};

struct OutputSettings {
  std::string dir;
  bool emit_traces = true;
  bool emit_metrics = false;    // unpredictability + market shares
  bool emit_plot_data = false;  // figure-family CSVs (dots, curves)
};

struct ExperimentConfig {
  Scenario scenario;
  bool have_scenario = false;
  SimSettings sim;
  PolicySettings policy;
  OutputSettings output;
};

ExperimentConfig load_experiment_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(mlcli::read_text_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("cannot parse config file " + path.string() + ": " + e.what());
  }
  reject_unknown_keys(j, {"scenario", "simulation", "policy", "output"}, path.string());

  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    if (s.is_object() && s.contains("path")) {
      reject_unknown_keys(s, {"path"}, "scenario");
      cfg.scenario = load_scenario_file(s.at("path").get<std::string>());
    } else {
      cfg.scenario = scenario_from_json(s, "scenario");
      generate_scenario_vectors(cfg.scenario);
    }
    cfg.have_scenario = true;
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    reject_unknown_keys(s,
                        {"iterations", "refresh_rate", "worlds", "master_seed",
                         "snapshot_stride", "estimate_samples", "threads", "transform"},
                        "simulation");
    if (s.contains("iterations")) cfg.sim.iterations = s.at("iterations").get<std::int64_t>();
    if (s.contains("refresh_rate"))
      cfg.sim.refresh_rate = s.at("refresh_rate").get<std::int64_t>();
    if (s.contains("worlds")) cfg.sim.worlds = s.at("worlds").get<int>();
    if (s.contains("master_seed"))
      cfg.sim.master_seed = s.at("master_seed").get<std::uint64_t>();
    if (s.contains("snapshot_stride"))
      cfg.sim.snapshot_stride = s.at("snapshot_stride").get<std::int64_t>();
    if (s.contains("estimate_samples"))
      cfg.sim.estimate_samples = s.at("estimate_samples").get<std::int64_t>();
    if (s.contains("threads")) cfg.sim.threads = s.at("threads").get<int>();
    if (s.contains("transform")) cfg.sim.transform = s.at("transform").get<std::string>();
  }
  if (j.contains("policy")) {
    const json& p = j.at("policy");
    reject_unknown_keys(p, {"kind", "condition", "quality"}, "policy");
    if (p.contains("kind")) cfg.policy.kind = p.at("kind").get<std::string>();
    if (p.contains("condition")) cfg.policy.condition = p.at("condition").get<std::string>();
    if (p.contains("quality")) cfg.policy.quality = p.at("quality").get<std::string>();
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, {"dir", "emit_traces", "emit_metrics", "emit_plot_data"}, "output");
    if (o.contains("dir")) cfg.output.dir = o.at("dir").get<std::string>();
    if (o.contains("emit_traces")) cfg.output.emit_traces = o.at("emit_traces").get<bool>();
    if (o.contains("emit_metrics")) cfg.output.emit_metrics = o.at("emit_metrics").get<bool>();
    if (o.contains("emit_plot_data"))
      cfg.output.emit_plot_data = o.at("emit_plot_data").get<bool>();
  }
  return cfg;
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = scenario_to_json(cfg.scenario);
  j["simulation"] = {{"iterations", cfg.sim.iterations},
                     {"refresh_rate", cfg.sim.refresh_rate},
                     {"worlds", cfg.sim.worlds},
                     {"master_seed", cfg.sim.master_seed},
                     {"snapshot_stride", cfg.sim.snapshot_stride},
                     {"estimate_samples", cfg.sim.estimate_samples},
                     {"threads", cfg.sim.threads},
                     {"transform", cfg.sim.transform}};
  j["policy"] = {{"kind", cfg.policy.kind},
                 {"condition", cfg.policy.condition},
                 {"quality", cfg.policy.quality}};
  j["output"] = {{"dir", cfg.output.dir},
                 {"emit_traces", cfg.output.emit_traces},
                 {"emit_metrics", cfg.output.emit_metrics},
                 {"emit_plot_data", cfg.output.emit_plot_data}};
  return j;
}

/* ------------------------------------------------------------------ */
/* Market handle                                                       */
/* ------------------------------------------------------------------ */

struct MarketDeleter {
  void operator()(ml_market* m) const { ml_market_destroy(m); }
};
using MarketPtr = std::unique_ptr<ml_market, MarketDeleter>;

MarketPtr make_market(const Scenario& s, const std::string& transform) {
  ml_market* market = nullptr;
  check_ml(ml_market_create(s.n, s.appeal.data(), s.quality.data(), s.visibility.data(),
                            s.alpha, transform_from(transform), &market),
           "market");
  return MarketPtr(market);
}

/* ------------------------------------------------------------------ */
/* Experiment data: in-memory form shared by simulate and metrics      */
/* ------------------------------------------------------------------ */

struct ExperimentData {
  int worlds = 0;
  int songs = 0;
  int snapshots = 0;
  std::vector<std::int64_t> steps;      // per snapshot
  std::vector<std::int64_t> samples;    // worlds x snapshots x songs
  std::vector<std::int64_t> downloads;  // worlds x snapshots x songs
  std::vector<double> estimates;        // worlds x snapshots x songs
  std::vector<std::int32_t> positions;  // worlds x snapshots x songs
  std::vector<std::uint64_t> hashes;    // worlds x snapshots

  std::size_t cell(int w, int s) const {
    return (static_cast<std::size_t>(w) * static_cast<std::size_t>(snapshots) +
            static_cast<std::size_t>(s)) *
           static_cast<std::size_t>(songs);
  }
  std::int64_t total_downloads(int w, int s) const {
    std::int64_t total = 0;
    for (int i = 0; i < songs; ++i) total += downloads[cell(w, s) + static_cast<std::size_t>(i)];
    return total;
  }
};

ExperimentData drain_experiment(const ml_experiment* experiment) {
  ExperimentData data;
  data.worlds = ml_experiment_worlds(experiment);
  data.songs = ml_experiment_songs(experiment);
  data.snapshots = ml_experiment_snapshots(experiment);
  const std::size_t cells = static_cast<std::size_t>(data.worlds) *
                            static_cast<std::size_t>(data.snapshots) *
                            static_cast<std::size_t>(data.songs);
  data.steps.resize(static_cast<std::size_t>(data.snapshots));
  data.samples.resize(cells);
  data.downloads.resize(cells);
  data.estimates.resize(cells);
  data.positions.resize(cells);
  data.hashes.resize(static_cast<std::size_t>(data.worlds) *
                     static_cast<std::size_t>(data.snapshots));
  for (int s = 0; s < data.snapshots; ++s)
    data.steps[static_cast<std::size_t>(s)] = ml_experiment_snapshot_step(experiment, s);
  for (int w = 0; w < data.worlds; ++w) {
    for (int s = 0; s < data.snapshots; ++s) {
      const std::size_t base = data.cell(w, s);
      check_ml(ml_experiment_counts(experiment, w, s, data.samples.data() + base,
                                    data.downloads.data() + base),
               "experiment counts");
      check_ml(ml_experiment_estimates(experiment, w, s, data.estimates.data() + base),
               "experiment estimates");
      check_ml(ml_experiment_ranking(
                   experiment, w, s, data.positions.data() + base,
                   &data.hashes[static_cast<std::size_t>(w) * data.snapshots +
                                static_cast<std::size_t>(s)]),
               "experiment ranking");
    }
  }
  return data;
}

/* ------------------------------------------------------------------ */
/* Writers                                                             */
/* ------------------------------------------------------------------ */

std::string world_file_name(int world) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "world_%04d.csv", world);
  return buf;
}

void write_trace_files(const fs::path& dir, const ExperimentData& data) {
  fs::create_directories(dir);
  for (int w = 0; w < data.worlds; ++w) {
    std::ostringstream out;
    out << kTraceHeader << '\n';
    for (int s = 0; s < data.snapshots; ++s) {
      const std::size_t base = data.cell(w, s);
      const std::string hash = mlcli::format_hash(
          data.hashes[static_cast<std::size_t>(w) * data.snapshots + static_cast<std::size_t>(s)]);
      for (int i = 0; i < data.songs; ++i) {
        const auto k = base + static_cast<std::size_t>(i);
        out << data.steps[static_cast<std::size_t>(s)] << ',' << i + 1 << ','
            << data.samples[k] << ',' << data.downloads[k] << ','
            << mlcli::format_double(data.estimates[k]) << ',' << data.positions[k] + 1 << ','
            << hash << '\n';
      }
    }
    mlcli::write_text_file(dir / world_file_name(w), out.str());
  }
}

void refuse_overwrite(const fs::path& path, bool force) {
  if (!force && fs::exists(path))
    throw UsageError(path.string() + " already exists (use --force to overwrite)");
}

// One CSV per figure family, columns documented in the README. shares_reports
// covers unpredictability + market shares; plot_reports the dot/curve data.
void write_metric_files(const fs::path& dir, const ExperimentData& data,
                        const std::vector<double>& true_quality, int top_k,
                        bool drop_zero_worlds, bool force, bool shares_reports = true,
                        bool plot_reports = true) {
  fs::create_directories(dir);

  if (shares_reports) {
    std::vector<std::int64_t> final_downloads(static_cast<std::size_t>(data.worlds) *
                                              static_cast<std::size_t>(data.songs));
    for (int w = 0; w < data.worlds; ++w) {
      const std::size_t base = data.cell(w, data.snapshots - 1);
      for (int i = 0; i < data.songs; ++i)
        final_downloads[static_cast<std::size_t>(w) * data.songs + static_cast<std::size_t>(i)] =
            data.downloads[base + static_cast<std::size_t>(i)];
    }
    std::vector<double> shares(final_downloads.size());
    std::vector<std::int32_t> world_index(static_cast<std::size_t>(data.worlds));
    std::int32_t worlds_used = 0;
    check_ml(ml_market_shares(data.worlds, data.songs, final_downloads.data(),
                              drop_zero_worlds ? 1 : 0, shares.data(), world_index.data(),
                              &worlds_used),
             "market shares");

    {
      const fs::path path = dir / "market_shares.csv";
      refuse_overwrite(path, force);
      std::ostringstream out;
      out << "world,song,share\n";
      for (std::int32_t row = 0; row < worlds_used; ++row)
        for (int i = 0; i < data.songs; ++i)
          out << world_index[static_cast<std::size_t>(row)] << ',' << i + 1 << ','
              << mlcli::format_double(shares[static_cast<std::size_t>(row) * data.songs +
                                             static_cast<std::size_t>(i)])
              << '\n';
      mlcli::write_text_file(path, out.str());
    }

    {
      std::vector<double> per_song(static_cast<std::size_t>(data.songs));
      double overall = 0.0;
      check_ml(ml_unpredictability(worlds_used, data.songs, shares.data(), per_song.data(),
                                   &overall),
               "unpredictability");
      const fs::path path = dir / "unpredictability.csv";
      refuse_overwrite(path, force);
      std::ostringstream out;
      out << "song,u\n";
      for (int i = 0; i < data.songs; ++i)
        out << i + 1 << ',' << mlcli::format_double(per_song[static_cast<std::size_t>(i)])
            << '\n';
      out << "overall," << mlcli::format_double(overall) << '\n';
      mlcli::write_text_file(path, out.str());
    }
  }

  if (!plot_reports) return;

  // Downloads versus quality dot data, songs by ascending true quality.
  {
    std::vector<std::int32_t> order(static_cast<std::size_t>(data.songs));
    check_ml(ml_quality_order(data.songs, true_quality.data(), order.data()), "quality order");
    const fs::path path = dir / "downloads_vs_quality.csv";
    refuse_overwrite(path, force);
    std::ostringstream out;
    out << "quality_rank,song,quality,world,downloads\n";
    for (int rank = 0; rank < data.songs; ++rank) {
      const int song = order[static_cast<std::size_t>(rank)];
      for (int w = 0; w < data.worlds; ++w)
        out << rank + 1 << ',' << song + 1 << ','
            << mlcli::format_double(true_quality[static_cast<std::size_t>(song)]) << ',' << w
            << ','
            << data.downloads[data.cell(w, data.snapshots - 1) + static_cast<std::size_t>(song)]
            << '\n';
    }
    mlcli::write_text_file(path, out.str());
  }

  // Quality-recovery curve.
  {
    std::vector<double> mse(static_cast<std::size_t>(data.snapshots));
    check_ml(ml_estimation_error_curve(data.worlds, data.snapshots, data.songs,
                                       data.estimates.data(), true_quality.data(),
                                       std::min(top_k, data.songs), mse.data()),
             "estimation error curve");
    const fs::path path = dir / "estimation_error.csv";
    refuse_overwrite(path, force);
    std::ostringstream out;
    out << "step,mse\n";
    for (int s = 0; s < data.snapshots; ++s)
      out << data.steps[static_cast<std::size_t>(s)] << ','
          << mlcli::format_double(mse[static_cast<std::size_t>(s)]) << '\n';
    mlcli::write_text_file(path, out.str());
  }

  // Mean download trajectory.
  {
    std::vector<double> totals(static_cast<std::size_t>(data.worlds) *
                               static_cast<std::size_t>(data.snapshots));
    for (int w = 0; w < data.worlds; ++w)
      for (int s = 0; s < data.snapshots; ++s)
        totals[static_cast<std::size_t>(w) * data.snapshots + static_cast<std::size_t>(s)] =
            static_cast<double>(data.total_downloads(w, s));
    std::vector<double> mean(static_cast<std::size_t>(data.snapshots));
    std::vector<double> ci(static_cast<std::size_t>(data.snapshots));
    check_ml(ml_mean_curve(data.worlds, data.snapshots, totals.data(), mean.data(), ci.data()),
             "mean downloads curve");
    const fs::path path = dir / "mean_downloads.csv";
    refuse_overwrite(path, force);
    std::ostringstream out;
    out << "step,mean_downloads,ci95_half\n";
    for (int s = 0; s < data.snapshots; ++s)
      out << data.steps[static_cast<std::size_t>(s)] << ','
          << mlcli::format_double(mean[static_cast<std::size_t>(s)]) << ','
          << mlcli::format_double(ci[static_cast<std::size_t>(s)]) << '\n';
    mlcli::write_text_file(path, out.str());
  }
}

void write_summary(const fs::path& dir, const ExperimentConfig& cfg,
                   const ExperimentData& data) {
  json results;
  results["snapshot_steps"] = data.steps;

  std::vector<double> totals(static_cast<std::size_t>(data.worlds) *
                             static_cast<std::size_t>(data.snapshots));
  for (int w = 0; w < data.worlds; ++w)
    for (int s = 0; s < data.snapshots; ++s)
      totals[static_cast<std::size_t>(w) * data.snapshots + static_cast<std::size_t>(s)] =
          static_cast<double>(data.total_downloads(w, s));
  std::vector<double> mean(static_cast<std::size_t>(data.snapshots));
  std::vector<double> ci(static_cast<std::size_t>(data.snapshots));
  check_ml(ml_mean_curve(data.worlds, data.snapshots, totals.data(), mean.data(), ci.data()),
           "mean downloads curve");
  results["mean_downloads"] = {{"step", data.steps}, {"mean", mean}, {"ci95_half", ci}};

  json final_downloads = json::array();
  for (int w = 0; w < data.worlds; ++w) {
    const std::size_t base = data.cell(w, data.snapshots - 1);
    json row = json::array();
    for (int i = 0; i < data.songs; ++i) row.push_back(data.downloads[base + i]);
    final_downloads.push_back(std::move(row));
  }
  results["final_downloads"] = std::move(final_downloads);

  json summary;
  summary["format"] = kSummaryFormat;
  summary["config"] = config_echo(cfg);
  summary["results"] = std::move(results);
  summary["meta"] = {{"created", timestamp_utc()}};
  mlcli::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

/* ------------------------------------------------------------------ */
/* Trace directory loader (metrics command)                            */
/* ------------------------------------------------------------------ */

ExperimentData load_trace_dir(const fs::path& dir, int songs) {
  const fs::path trace_dir = dir / "traces";
  if (!fs::is_directory(trace_dir))
    throw RuntimeFailure("missing trace directory " + trace_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trace_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("world_") && name.ends_with(".csv")) files.push_back(entry.path());
  }
  if (files.empty()) throw RuntimeFailure("no world_*.csv files in " + trace_dir.string());
  std::sort(files.begin(), files.end());
  for (std::size_t w = 0; w < files.size(); ++w) {
    const std::string expected = world_file_name(static_cast<int>(w));
    if (files[w].filename().string() != expected)
      throw RuntimeFailure("trace set has a gap: expected " + expected + ", found " +
                           files[w].filename().string());
  }

  ExperimentData data;
  data.worlds = static_cast<int>(files.size());
  data.songs = songs;
  for (std::size_t w = 0; w < files.size(); ++w) {
    std::istringstream in(mlcli::read_text_file(files[w]));
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
      throw RuntimeFailure(files[w].string() + ": unexpected trace header");
    std::vector<std::int64_t> steps;
    int song_cursor = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> f = mlcli::split_csv_line(line);
      if (f.size() != 7) throw RuntimeFailure(files[w].string() + ": malformed row: " + line);
      const std::int64_t step = mlcli::parse_int(f[0], "step");
      const int song = static_cast<int>(mlcli::parse_int(f[1], "song")) - 1;
      if (song_cursor == 0) steps.push_back(step);
      if (song != song_cursor || step != steps.back())
        throw RuntimeFailure(files[w].string() + ": rows out of order near: " + line);
      if (song >= songs) throw RuntimeFailure(files[w].string() + ": song index out of range");
      data.samples.push_back(mlcli::parse_int(f[2], "sampled"));
      data.downloads.push_back(mlcli::parse_int(f[3], "downloaded"));
      data.estimates.push_back(mlcli::parse_double(f[4], "q_est"));
      data.positions.push_back(static_cast<std::int32_t>(mlcli::parse_int(f[5], "position")) - 1);
      if (song_cursor == 0)
        data.hashes.push_back(std::stoull(f[6], nullptr, 16));
      song_cursor = (song_cursor + 1) % songs;
    }
    if (song_cursor != 0)
      throw RuntimeFailure(files[w].string() + ": truncated trace (partial snapshot)");
    if (w == 0) {
      data.steps = steps;
      data.snapshots = static_cast<int>(steps.size());
    } else if (steps != data.steps) {
      throw RuntimeFailure(files[w].string() + ": snapshot grid differs from world 0");
    }
  }
  return data;
}

/* ------------------------------------------------------------------ */
/* Commands                                                            */
/* ------------------------------------------------------------------ */

int cmd_gen_scenario(const std::string& kind, int n, std::uint64_t seed, double alpha,
                     double gamma, int uptick_len, double uptick_ratio, double jitter_sd,
                     const std::string& out, bool force) {
  Scenario s;
  s.kind = kind;
  s.n = n;
  s.seed = seed;
  s.alpha = alpha;
  s.gamma = gamma;
  s.uptick_len = uptick_len;
  s.uptick_ratio = uptick_ratio;
  s.jitter_sd = jitter_sd;
  if (kind == "explicit")
    throw UsageError("gen-scenario generates gaussian|negative-correlation scenarios; "
                     "write explicit scenarios directly");
  generate_scenario_vectors(s);
  const fs::path path(out);
  refuse_overwrite(path, force);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  mlcli::write_text_file(path, scenario_to_json(s).dump(2) + "\n");
  std::cout << "wrote scenario (" << kind << ", n=" << n << ") to " << path.string() << "\n";
  return 0;
}

struct ExperimentDeleter {
  void operator()(ml_experiment* e) const { ml_experiment_destroy(e); }
};

int cmd_simulate(const ExperimentConfig& cfg, bool force) {
  if (!cfg.have_scenario) throw UsageError("simulate needs --scenario or a config scenario");
  if (cfg.output.dir.empty()) throw UsageError("simulate needs --out or a config output dir");
  if (cfg.sim.worlds > 9999) throw UsageError("worlds is capped at 9999 (trace file naming)");
  if (cfg.sim.iterations < 1) throw UsageError("iterations must be >= 1");
  if (cfg.sim.worlds < 1) throw UsageError("worlds must be >= 1");
  if (cfg.sim.refresh_rate < 1 || cfg.sim.refresh_rate > cfg.sim.iterations)
    throw UsageError("refresh rate must lie in [1, iterations]");
  if (cfg.sim.snapshot_stride < 1) throw UsageError("snapshot stride must be >= 1");
  if (cfg.sim.estimate_samples < 1) throw UsageError("estimate sample size must be >= 1");
  if (cfg.sim.threads < 0) throw UsageError("threads must be >= 0");

  const fs::path out_dir(cfg.output.dir);
  refuse_overwrite(out_dir / "summary.json", force);
  fs::create_directories(out_dir);

  const MarketPtr market = make_market(cfg.scenario, cfg.sim.transform);

  ml_sim_config sim;
  ml_sim_config_init(&sim);
  sim.iterations = cfg.sim.iterations;
  sim.refresh_rate = cfg.sim.refresh_rate;
  sim.worlds = cfg.sim.worlds;
  sim.master_seed = cfg.sim.master_seed;
  sim.snapshot_stride = cfg.sim.snapshot_stride;
  sim.estimate_samples = cfg.sim.estimate_samples;
  sim.policy = policy_from(cfg.policy.kind);
  sim.condition = condition_from(cfg.policy.condition);
  sim.quality_source = quality_source_from(cfg.policy.quality);
  sim.threads = cfg.sim.threads;

  ml_experiment* raw = nullptr;
  check_ml(ml_run_experiment(market.get(), &sim, &raw), "experiment");
  const std::unique_ptr<ml_experiment, ExperimentDeleter> experiment(raw);
  const ExperimentData data = drain_experiment(experiment.get());

  if (cfg.output.emit_traces) write_trace_files(out_dir / "traces", data);
  if (cfg.output.emit_metrics || cfg.output.emit_plot_data)
    write_metric_files(out_dir / "metrics", data, cfg.scenario.quality, 10, false, force,
                       cfg.output.emit_metrics, cfg.output.emit_plot_data);
  write_summary(out_dir, cfg, data);

  std::cout << "simulated " << data.worlds << " worlds x " << cfg.sim.iterations
            << " iterations (" << cfg.policy.kind << ", " << cfg.policy.condition
            << "), output in " << out_dir.string() << "\n";
  return 0;
}

int cmd_rank(const std::string& input, const std::string& solver_name,
             const std::string& condition_name) {
  json j;
  try {
    j = json::parse(mlcli::read_text_file(input));
  } catch (const json::parse_error& e) {
    throw RuntimeFailure("cannot parse rank input " + input + ": " + e.what());
  }
  reject_unknown_keys(j, {"format", "kind", "n", "seed", "alpha", "params", "appeal",
                          "quality", "visibility", "downloads"},
                      input);
  for (const char* key : {"appeal", "quality", "visibility"})
    if (!j.contains(key)) throw RuntimeFailure(input + ": missing '" + std::string(key) + "'");

  const std::vector<double> appeal = double_vector(j.at("appeal"), "appeal");
  const std::vector<double> quality = double_vector(j.at("quality"), "quality");
  const std::vector<double> visibility = double_vector(j.at("visibility"), "visibility");
  const double alpha = j.contains("alpha") ? j.at("alpha").get<double>() : 1.0;
  const int n = static_cast<int>(appeal.size());
  if (static_cast<int>(quality.size()) != n || static_cast<int>(visibility.size()) != n)
    throw RuntimeFailure(input + ": appeal, quality, and visibility lengths differ");

  std::vector<std::int64_t> downloads(static_cast<std::size_t>(n), 0);
  if (j.contains("downloads")) {
    const json& d = j.at("downloads");
    if (!d.is_array() || static_cast<int>(d.size()) != n)
      throw RuntimeFailure(input + ": downloads must be an array of n integers");
    for (int i = 0; i < n; ++i) downloads[static_cast<std::size_t>(i)] = d[i].get<std::int64_t>();
  }

  ml_solver solver;
  if (solver_name == "parametric") solver = ML_SOLVER_PARAMETRIC;
  else if (solver_name == "lfap") solver = ML_SOLVER_LFAP;
  else throw UsageError("unknown solver '" + solver_name + "' (expected parametric|lfap)");

  ml_market* raw = nullptr;
  check_ml(ml_market_create(n, appeal.data(), quality.data(), visibility.data(), alpha,
                            ML_TRANSFORM_IDENTITY, &raw),
           "market");
  const MarketPtr market{raw};

  std::vector<std::int32_t> position_of(static_cast<std::size_t>(n));
  double objective = 0.0;
  check_ml(ml_performance_ranking(market.get(), condition_from(condition_name),
                                  downloads.data(), nullptr, solver, position_of.data(),
                                  &objective),
           "performance ranking");

  // Playlist order: most visible assignment first by position index.
  std::vector<int> song_at(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) song_at[static_cast<std::size_t>(position_of[i])] = i;
  std::cout << "position,song\n";
  for (int p = 0; p < n; ++p) std::cout << p + 1 << ',' << song_at[static_cast<std::size_t>(p)] + 1 << '\n';
  std::cout << "objective," << mlcli::format_double(objective) << "\n";
  return 0;
}

int cmd_metrics(const std::string& trace_dir_arg, std::string out_arg, int top_k,
                bool drop_zero_worlds, bool force) {
  const fs::path run_dir(trace_dir_arg);
  const fs::path summary_path = run_dir / "summary.json";
  if (!fs::exists(summary_path))
    throw RuntimeFailure("missing " + summary_path.string() + " (run simulate first)");
  json summary;
  try {
    summary = json::parse(mlcli::read_text_file(summary_path));
  } catch (const json::parse_error& e) {
    throw RuntimeFailure("cannot parse " + summary_path.string() + ": " + e.what());
  }
  if (!summary.contains("config") || !summary.at("config").contains("scenario"))
    throw RuntimeFailure(summary_path.string() + ": missing config echo");
  const Scenario scenario =
      scenario_from_json(summary.at("config").at("scenario"), "summary scenario");
  if (scenario.quality.empty())
    throw RuntimeFailure(summary_path.string() + ": scenario echo has no quality vector");

  const int claimed_worlds = summary.at("config").at("simulation").at("worlds").get<int>();
  const ExperimentData data = load_trace_dir(run_dir, scenario.n);
  if (data.worlds < claimed_worlds)
    throw RuntimeFailure("trace set incomplete: summary claims " +
                         std::to_string(claimed_worlds) + " worlds, found " +
                         std::to_string(data.worlds) + " (missing " +
                         world_file_name(data.worlds) + ")");

  const fs::path out_dir = out_arg.empty() ? run_dir / "metrics" : fs::path(out_arg);
  write_metric_files(out_dir, data, scenario.quality, top_k, drop_zero_worlds, force);
  std::cout << "wrote metric reports for " << data.worlds << " worlds to " << out_dir.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"musiclab: cultural-market simulator and ranking optimizer"};
  app.require_subcommand(1);

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario", "Generate a scenario file");
  std::string gen_kind = "gaussian";
  int gen_n = 50;
  std::uint64_t gen_seed = 0;
  double gen_alpha = 1.0, gen_gamma = 0.8, gen_uptick_ratio = 1.2, gen_jitter = 0.05;
  int gen_uptick_len = 5;
  std::string gen_out;
  bool gen_force = false;
  gen->add_option("--kind", gen_kind, "gaussian|negative-correlation")->capture_default_str();
  gen->add_option("--n", gen_n, "number of songs")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generation seed")->capture_default_str();
  gen->add_option("--alpha", gen_alpha, "appeal scaling factor")->capture_default_str();
  gen->add_option("--gamma", gen_gamma, "visibility decay exponent")->capture_default_str();
  gen->add_option("--uptick-len", gen_uptick_len, "visibility up-tick length")
      ->capture_default_str();
  gen->add_option("--uptick-ratio", gen_uptick_ratio, "visibility up-tick ratio")
      ->capture_default_str();
  gen->add_option("--jitter-sd", gen_jitter, "negative-correlation jitter stddev")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "output scenario file")->required();
  gen->add_flag("--force", gen_force, "overwrite existing files");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a seeded multi-world experiment");
  std::string sim_config, sim_scenario, sim_policy, sim_condition, sim_quality, sim_transform;
  std::string sim_out;
  std::uint64_t sim_seed = 0;
  std::int64_t sim_iterations = 0, sim_refresh = 0, sim_stride = 0, sim_estimate_m = 0;
  int sim_worlds = 0, sim_threads = -1;
  bool sim_force = false, sim_no_traces = false, sim_with_metrics = false,
       sim_with_plot_data = false;
  sim->add_option("--config", sim_config, "experiment config file (JSON)");
  sim->add_option("--scenario", sim_scenario, "scenario file from gen-scenario");
  auto* opt_seed = sim->add_option("--seed", sim_seed, "master seed");
  auto* opt_worlds = sim->add_option("--worlds", sim_worlds, "number of worlds W");
  auto* opt_iter = sim->add_option("--iterations", sim_iterations, "iterations per world N");
  auto* opt_refresh = sim->add_option("--refresh-rate", sim_refresh, "refresh rate r");
  auto* opt_stride = sim->add_option("--snapshot-stride", sim_stride, "trace snapshot stride");
  auto* opt_estm = sim->add_option("--estimate-samples", sim_estimate_m,
                                   "initial Bernoulli sample size m");
  auto* opt_policy = sim->add_option("--policy", sim_policy, "d-rank|p-rank|rand-rank");
  auto* opt_cond = sim->add_option("--condition", sim_condition, "si|in");
  auto* opt_quality = sim->add_option("--quality", sim_quality, "true|estimated");
  auto* opt_transform = sim->add_option("--transform", sim_transform,
                                        "identity|log1p|sqrt influence transform");
  auto* opt_threads = sim->add_option("--threads", sim_threads, "worker threads (0 = auto)");
  auto* opt_out = sim->add_option("--out", sim_out, "output directory");
  sim->add_flag("--force", sim_force, "overwrite existing output");
  sim->add_flag("--no-traces", sim_no_traces, "skip per-world trace files");
  sim->add_flag("--with-metrics", sim_with_metrics, "also write share/unpredictability reports");
  sim->add_flag("--with-plot-data", sim_with_plot_data, "also write plot-data CSVs");

  // rank
  auto* rank = app.add_subcommand("rank", "One-shot performance ranking for an input file");
  std::string rank_input, rank_solver = "parametric", rank_condition = "si";
  rank->add_option("input", rank_input, "JSON file with appeal/quality/visibility[/downloads]")
      ->required();
  rank->add_option("--solver", rank_solver, "parametric|lfap")->capture_default_str();
  rank->add_option("--condition", rank_condition, "si|in")->capture_default_str();

  // metrics
  auto* met = app.add_subcommand("metrics", "Compute metric reports from a simulate run");
  std::string met_dir, met_out;
  int met_top_k = 10;
  bool met_drop_zero = false, met_force = false;
  met->add_option("run_dir", met_dir, "output directory of a simulate run")->required();
  met->add_option("--out", met_out, "report directory (default: run_dir/metrics)");
  met->add_option("--top-k", met_top_k, "songs in the estimation-error subset")
      ->capture_default_str();
  met->add_flag("--drop-zero-worlds", met_drop_zero, "skip worlds without downloads");
  met->add_flag("--force", met_force, "overwrite existing reports");

  try {
    app.parse(argc, argv);

    if (gen->parsed())
      return cmd_gen_scenario(gen_kind, gen_n, gen_seed, gen_alpha, gen_gamma, gen_uptick_len,
                              gen_uptick_ratio, gen_jitter, gen_out, gen_force);

    if (sim->parsed()) {
      ExperimentConfig cfg;
      if (!sim_config.empty()) cfg = load_experiment_config(sim_config);
      if (!sim_scenario.empty()) {
        cfg.scenario = load_scenario_file(sim_scenario);
        cfg.have_scenario = true;
      }
      if (opt_seed->count()) cfg.sim.master_seed = sim_seed;
      if (opt_worlds->count()) cfg.sim.worlds = sim_worlds;
      if (opt_iter->count()) cfg.sim.iterations = sim_iterations;
      if (opt_refresh->count()) cfg.sim.refresh_rate = sim_refresh;
      if (opt_stride->count()) cfg.sim.snapshot_stride = sim_stride;
      if (opt_estm->count()) cfg.sim.estimate_samples = sim_estimate_m;
      if (opt_policy->count()) cfg.policy.kind = sim_policy;
      if (opt_cond->count()) cfg.policy.condition = sim_condition;
      if (opt_quality->count()) cfg.policy.quality = sim_quality;
      if (opt_transform->count()) cfg.sim.transform = sim_transform;
      if (opt_threads->count()) cfg.sim.threads = sim_threads;
      if (opt_out->count()) cfg.output.dir = sim_out;
      if (sim_no_traces) cfg.output.emit_traces = false;
      if (sim_with_metrics) cfg.output.emit_metrics = true;
      if (sim_with_plot_data) cfg.output.emit_plot_data = true;
      return cmd_simulate(cfg, sim_force);
    }

    if (rank->parsed()) return cmd_rank(rank_input, rank_solver, rank_condition);
    if (met->parsed())
      return cmd_metrics(met_dir, met_out, met_top_k, met_drop_zero, met_force);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const RuntimeFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
