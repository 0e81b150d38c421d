#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rotorid/config.hpp"

namespace rotorid {

enum class Stage { Simulate, Sweep, Frespid, Misosa, Composite, Derivid, Verify, Pipeline };

std::optional<Stage> parse_stage(std::string_view name);
std::string_view stage_name(Stage s);

/// Runs one stage, reading the files earlier stages left in `out_dir` and writing
/// its own there. `Pipeline` runs every stage in order and writes summary.txt.
/// Throws Error: Data for missing or malformed inputs, Numerical for a diverged
/// fit, Safety when an experiment aborts without recovering.
void run_stage(Stage stage, const PipelineConfig& cfg, const std::string& out_dir);

// FRF table:
//   # input=<name>
//   # output=<name>
//   # window=<s>
//   freq_rad_s,mag_db,phase_deg,coherence,n_d,valid,re,im
// re/im carry the response losslessly; mag/phase are derived views.
std::string frf_csv(const FrequencyResponse& frf);
FrequencyResponse read_frf_csv(const std::string& text, const std::string& origin = "frf");

/// Per-experiment status table: file,axis,kind,completed,t_abort,violation,recovered,record_begin,record_end
struct ExperimentRow {
  std::string file;
  Axis axis = Axis::Lateral;
  std::string kind;
  ExperimentStatus status;
  std::size_t record_begin = 0, record_end = 0;
};
std::string experiments_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> read_experiments_csv(const std::string& text, const std::string& origin);

/// Seed for one experiment derived from the master seed.
std::uint64_t experiment_seed(std::uint64_t master, Axis axis, std::string_view kind);

/// Output channels of the plant block driven by the control on `axis`.
std::vector<std::string> block_outputs(const HoverPlantConfig& plant, Axis axis);

/// Inputs analysed jointly by the conditioning stage: the lateral block's controls.
std::vector<std::string> miso_inputs(const PipelineConfig& cfg);

std::string window_tag(double window_length);

}  // namespace rotorid
