#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "transdyn/ingest.hpp"
#include "transdyn/pipeline.hpp"
#include "transdyn/synth.hpp"

namespace transdyn::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_fatal = 1,
  exit_empty_input = 2,
  exit_oracle_too_large = 3,
};

/// Effective configuration of one `run` (or `oracle`) invocation.
struct RunConfig {
  std::vector<std::string> inputs;
  InputFormat format = InputFormat::jsonl;
  double beta = 1.0;
  double pingpong_window_minutes = 15.0;
  double max_dwell_cap_hours = 12.0;
  double cell_size = 0.05;
  std::string night_window = "21:06";
  std::uint64_t min_unique_visitors = 3;
  double absent_threshold = 0.0;
  std::string census_path;
  std::string bases_path;
  std::string out;
  std::uint64_t seed = 0;
  std::string window_start;
  std::string window_end;

  /// Throws ConfigError on any out-of-range value.
  PipelineConfig to_pipeline_config() const;
  std::string to_json() const;
};

/// Output files written by `run`, in write order.
const std::vector<std::string>& run_output_files();

int cmd_run(const RunConfig& config, std::ostream& log);
/// Writes the brute-force summary to config.out (a file path), or to `out`
/// when config.out is empty.
int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& log);
/// Writes events.jsonl, ground_truth.json, census.csv and synth_config.json.
int cmd_synth(const SynthConfig& config, const std::string& out_dir, std::ostream& log);

/// Full command-line entry point.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace transdyn::cli
