#include "transdyn/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "transdyn/error.hpp"
#include "transdyn/oracle.hpp"
#include "transdyn/parallel.hpp"

namespace transdyn::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

Seconds minutes_to_seconds(double minutes) {
  return Seconds{static_cast<std::int64_t>(std::llround(minutes * 60.0))};
}

std::string now_utc() {
  const auto now = std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
  return format_timestamp(now);
}

/// Writes every (name, content) pair into dir, or none of them.
void write_all(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    const fs::path path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (f) f << content;
    if (f) f.close();
    if (!f) {
      for (const auto& p : written) fs::remove(p, ec);
      fs::remove(path, ec);
      throw IoError("failed writing '" + path.string() + "'");
    }
    written.push_back(path);
  }
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

EventBatch load(const RunConfig& config, const PipelineConfig& pipeline) {
  ParseOptions options;
  options.format = config.format;
  options.window = pipeline.params.observation_window;
  options.threads = pipeline.threads;
  return canonicalize(parse_event_files(config.inputs, options), pipeline.cell_size);
}

}  // namespace

PipelineConfig RunConfig::to_pipeline_config() const {
  PipelineConfig p;
  if (!std::isfinite(pingpong_window_minutes) || pingpong_window_minutes < 0.0)
    throw ConfigError("--pingpong-window must be >= 0 minutes");
  if (!std::isfinite(max_dwell_cap_hours) || max_dwell_cap_hours <= 0.0)
    throw ConfigError("--max-dwell-cap must be > 0 hours");
  p.params.beta = beta;
  p.params.pingpong_window = minutes_to_seconds(pingpong_window_minutes);
  p.params.max_dwell_cap = minutes_to_seconds(max_dwell_cap_hours * 60.0);
  if (!window_start.empty()) {
    auto ts = parse_timestamp(window_start);
    if (!ts) throw ConfigError("--window-start is not a timestamp: " + window_start);
    p.params.observation_window.start = *ts;
  }
  if (!window_end.empty()) {
    auto ts = parse_timestamp(window_end);
    if (!ts) throw ConfigError("--window-end is not a timestamp: " + window_end);
    p.params.observation_window.end = *ts;
  }
  p.cell_size = cell_size;
  auto night = parse_hour_window(night_window);
  if (!night) throw ConfigError("--night-window must look like HH:HH, got '" + night_window + "'");
  p.night_window = *night;
  p.min_unique_visitors = min_unique_visitors;
  p.absent_threshold = absent_threshold;
  p.validate();
  return p;
}

std::string RunConfig::to_json() const {
  ojson j;
  j["input"] = inputs;
  j["format"] = std::string(to_string(format));
  j["beta"] = beta;
  j["pingpong_window_minutes"] = pingpong_window_minutes;
  j["max_dwell_cap_hours"] = max_dwell_cap_hours;
  j["cell_size"] = cell_size;
  j["night_window"] = night_window;
  j["min_unique_visitors"] = min_unique_visitors;
  j["absent_threshold"] = absent_threshold;
  j["census"] = census_path.empty() ? ojson(nullptr) : ojson(census_path);
  j["bases"] = bases_path.empty() ? ojson(nullptr) : ojson(bases_path);
  j["out"] = out;
  j["seed"] = seed;
  j["window_start"] = window_start.empty() ? ojson(nullptr) : ojson(window_start);
  j["window_end"] = window_end.empty() ? ojson(nullptr) : ojson(window_end);
  return j.dump();
}

const std::vector<std::string>& run_output_files() {
  static const std::vector<std::string> files = {
      "profiles.csv",          "location_stats.csv",      "locations.csv",
      "category_ranking.csv",  "grid_diff.csv",           "flagged_locations.geojson",
      "flagged_cells.geojson", "summary.json",            "rejected.csv",
      "run_manifest.json"};
  return files;
}

int cmd_run(const RunConfig& config, std::ostream& log) {
  try {
    const PipelineConfig pipeline = config.to_pipeline_config();
    if (config.out.empty()) throw ConfigError("--out is required");
    if (config.inputs.empty()) throw ConfigError("--input is required");
    std::optional<CensusBaseline> census;
    if (!config.census_path.empty()) census = read_census(config.census_path);
    BaseMap overrides;
    if (!config.bases_path.empty()) overrides = read_base_overrides(config.bases_path);

    EventBatch batch = load(config, pipeline);
    log << "read " << batch.source_count << " records: " << batch.accepted_count()
        << " accepted, " << batch.rejected.size() << " rejected\n";

    ojson manifest;
    manifest["generated_at"] = now_utc();
    manifest["command"] = "run";
    manifest["config"] = ojson::parse(config.to_json());
    manifest["threads"] = pipeline.threads == 0 ? default_thread_count() : pipeline.threads;
    manifest["records"] = {{"source", batch.source_count},
                           {"accepted", batch.accepted_count()},
                           {"rejected", batch.rejected.size()}};

    if (batch.events.empty()) {
      manifest["outputs"] = {"rejected.csv", "run_manifest.json"};
      write_all(config.out, {{"rejected.csv", render([&](auto& s) { write_rejected_csv(s, batch); })},
                             {"run_manifest.json", manifest.dump(2) + "\n"}});
      log << "no accepted events\n";
      return exit_empty_input;
    }

    const PipelineResult r = run_pipeline(std::move(batch), pipeline, overrides, census);
    const auto& w = r.effective_params.observation_window;
    manifest["observation_window"] = {{"start", format_timestamp(w.start)},
                                      {"end", format_timestamp(w.end)}};
    manifest["outputs"] = run_output_files();

    std::vector<std::pair<std::string, std::string>> files = {
        {"profiles.csv", render([&](auto& s) { write_profiles_csv(s, r.profiles); })},
        {"location_stats.csv", render([&](auto& s) { write_location_stats_csv(s, r.stats); })},
        {"locations.csv", render([&](auto& s) { write_locations_csv(s, r.locations); })},
        {"category_ranking.csv",
         render([&](auto& s) { write_category_ranking_csv(s, r.categories); })},
        {"grid_diff.csv", render([&](auto& s) { write_grid_diff_csv(s, r.grid_diff); })},
        {"flagged_locations.geojson",
         render([&](auto& s) { write_locations_geojson(s, r.locations); })},
        {"flagged_cells.geojson",
         render([&](auto& s) { write_flagged_cells_geojson(s, r.grid_diff, pipeline.cell_size); })},
        {"summary.json", summary_to_json(r.summary())},
        {"rejected.csv", render([&](auto& s) { write_rejected_csv(s, r.batch); })},
        {"run_manifest.json", manifest.dump(2) + "\n"},
    };
    write_all(config.out, files);
    log << "N=" << r.population.N << " eta=" << r.population.eta << " gamma=" << r.population.gamma
        << " W=" << r.W << " theta_seconds=" << r.duration.total.count() << "\n";
    return exit_ok;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_fatal;
  }
}

int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& log) {
  try {
    const PipelineConfig pipeline = config.to_pipeline_config();
    if (config.inputs.empty()) throw ConfigError("--input is required");
    EventBatch batch = load(config, pipeline);
    BaseMap overrides;
    if (!config.bases_path.empty()) overrides = read_base_overrides(config.bases_path);
    const BaseMap bases = to_base_map(assign_bases(batch, pipeline.night_window, overrides));
    ModelParams params = pipeline.params;
    params.observation_window = resolve_window(params.observation_window, batch);
    const std::string json = summary_to_json(run_oracle(batch, bases, params));
    if (config.out.empty()) {
      out << json;
    } else {
      std::ofstream f(config.out, std::ios::binary | std::ios::trunc);
      if (f) f << json;
      if (!f) throw IoError("failed writing '" + config.out + "'");
    }
    return exit_ok;
  } catch (const OracleSizeError& e) {
    log << "error: " << e.what() << "\n";
    return exit_oracle_too_large;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_fatal;
  }
}

int cmd_synth(const SynthConfig& config, const std::string& out_dir, std::ostream& log) {
  try {
    if (out_dir.empty()) throw ConfigError("--out is required");
    const SynthOutput s = generate(config);
    write_all(out_dir, {{"events.jsonl", s.events_jsonl},
                        {"ground_truth.json", s.ground_truth_json},
                        {"census.csv", s.census_csv},
                        {"synth_config.json", synth_config_to_json(config) + "\n"}});
    log << "wrote synthetic traces for " << config.n_persons << " persons to " << out_dir << "\n";
    return exit_ok;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_fatal;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transient population dynamics: classify, quantify and locate populations on the move"};
  app.require_subcommand(1);

  RunConfig run;
  std::string format = "jsonl";
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--input", run.inputs, "Event files (JSONL or CSV)")->required();
    cmd->add_option("--format", format, "jsonl|csv")->capture_default_str();
    cmd->add_option("--beta", run.beta, "Ping-pong damping constant in (0, 1]")->capture_default_str();
    cmd->add_option("--pingpong-window", run.pingpong_window_minutes, "Minutes")->capture_default_str();
    cmd->add_option("--max-dwell-cap", run.max_dwell_cap_hours, "Hours")->capture_default_str();
    cmd->add_option("--cell-size", run.cell_size, "Grid cell size in degrees")->capture_default_str();
    cmd->add_option("--night-window", run.night_window, "UTC hours HH:HH for base inference")
        ->capture_default_str();
    cmd->add_option("--bases", run.bases_path, "CSV user,base_location pinning bases");
    cmd->add_option("--window-start", run.window_start, "Observation start (RFC3339 or epoch)");
    cmd->add_option("--window-end", run.window_end, "Observation end (RFC3339 or epoch)");
    cmd->add_option("--seed", run.seed, "Recorded in the manifest")->capture_default_str();
  };

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline and write reports");
  add_model_flags(run_cmd);
  run_cmd->add_option("--min-unique-visitors", run.min_unique_visitors)->capture_default_str();
  run_cmd->add_option("--absent-threshold", run.absent_threshold)->capture_default_str();
  run_cmd->add_option("--census", run.census_path, "CSV row,col,population with #cell_size= line");
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  auto* oracle_cmd =
      app.add_subcommand("oracle", "Brute-force summary for small inputs (<= 50 persons x 200 events)");
  add_model_flags(oracle_cmd);
  oracle_cmd->add_option("--out", run.out, "Summary JSON path (stdout when omitted)");

  SynthConfig synth;
  std::string synth_config_path, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic traces with ground truth");
  synth_cmd->add_option("--config", synth_config_path, "JSON synth config");
  auto* seed_opt = synth_cmd->add_option("--seed", synth.seed);
  auto* persons_opt = synth_cmd->add_option("--persons", synth.n_persons);
  auto* fraction_opt = synth_cmd->add_option("--transient-fraction", synth.transient_fraction);
  auto* pp_opt = synth_cmd->add_option("--pingpong-rate", synth.pingpong_injection_rate);
  auto* noise_opt = synth_cmd->add_option("--noise", synth.noise);
  auto* days_opt = synth_cmd->add_option("--days", synth.days);
  auto* outback_opt = synth_cmd->add_option("--outback-fraction", synth.outback_fraction);
  auto* cell_opt = synth_cmd->add_option("--cell-size", synth.cell_size);
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_fatal;
  }

  try {
    run.format = parse_format(format);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_fatal;
  }

  if (*run_cmd) return cmd_run(run, err);
  if (*oracle_cmd) return cmd_oracle(run, out, err);

  SynthConfig effective = synth;
  if (!synth_config_path.empty()) {
    std::ifstream f(synth_config_path);
    if (!f) {
      err << "error: cannot open synth config '" << synth_config_path << "'\n";
      return exit_fatal;
    }
    try {
      effective = synth_config_from_json(std::string(std::istreambuf_iterator<char>(f), {}));
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_fatal;
    }
    // Explicit flags override the file.
    if (*seed_opt) effective.seed = synth.seed;
    if (*persons_opt) effective.n_persons = synth.n_persons;
    if (*fraction_opt) effective.transient_fraction = synth.transient_fraction;
    if (*pp_opt) effective.pingpong_injection_rate = synth.pingpong_injection_rate;
    if (*noise_opt) effective.noise = synth.noise;
    if (*days_opt) effective.days = synth.days;
    if (*outback_opt) effective.outback_fraction = synth.outback_fraction;
    if (*cell_opt) effective.cell_size = synth.cell_size;
  }
  return cmd_synth(effective, synth_out, err);
}

}  // namespace transdyn::cli
