#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fqms/decoder.hpp"
#include "fqms/energy.hpp"
#include "fqms/optimizer.hpp"
#include "fqms/protograph.hpp"

namespace fqms {

// Everything the command line (or a JSON config file) can set.  A config
// file holds a flat JSON object keyed by long option names; explicit
// command-line flags override file values.
struct RunParams {
  std::string protograph = "s17";  // preset name, inline matrix, or path
  std::string tech = "sram65";
  double snr_db = 1.45;
  std::string snr_sweep;           // "lo:hi:step" or single value
  int q = 5;
  double eps = -1.0;               // < 0: derive from eg
  double eg = -1.0;                // < 0: default guard energy 1.0
  int n_bits = -1;                 // < 0: derive from z
  int z = -1;
  double alpha = 1.0;
  int lambda = 0;
  int iters = 50;
  uint64_t seed = 1;
  int workers = 1;
  std::string out;                 // empty = stdout
  std::string format = "json";    // json | csv
  std::string cache_dir;           // empty = FQMS_CACHE_DIR or disabled
  std::string fault_model = "hardware";
  std::string schedule = "layered";
  std::string mode = "descent";   // optimize: descent | exhaustive
  double target_pe = 1e-3;
  double threshold_pe = 1e-6;
  double snr_lo = 0.0, snr_hi = 8.0;
  int64_t frame_errors = 100;
  int64_t max_frames = 10'000'000;
  bool force_full_iters = false;

  // Search-space overrides (optimize / energy-curve).
  int q_min = 3, q_max = 8;
  int z_min = 250, z_max = 2500, z_step = 10;
  int eps_points = 40;
  double eg_min = 0.5, eg_max = 1.0;
  int rounds = 3;
  int grid_points = 64;
};

// Applies a JSON config object onto defaults; unknown keys are rejected.
void apply_config_json(RunParams& p, const nlohmann::json& j);
void load_config_file(RunParams& p, const std::string& path);

// Resolved helpers (each validates and throws config_error on bad input).
Protograph resolve_protograph(const std::string& spec_text);
double resolve_eps(const RunParams& p, const TechModel& tech);
std::vector<double> parse_sweep(const std::string& text);  // "lo:hi:step"
FaultModel parse_fault_model(const std::string& name);
Schedule parse_schedule(const std::string& name);
SearchSpace search_space_of(const RunParams& p);

// Resolved-parameter echo embedded in every report.
nlohmann::json params_json(const RunParams& p);

}  // namespace fqms
