#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hwmf/solver.hpp"

namespace hwmf {

struct Phase2Config {
  long from = 0, to = 0;  // |n| range (equivalently |Delta|)
  int digit_loss_budget = 8;
};

struct CheckConfig {
  // Y-independence: rerun phase 1 at Y2 with the stored M0 and Q.
  std::optional<std::string> y2;
  std::optional<std::string> y_threshold;
  int automorphy_samples = 20;
  std::uint64_t seed = 1;
  // c^- ratios: normalizer Delta0 and the listed Deltas (empty = all).
  std::optional<long> cminus_normalizer;
  std::vector<long> cminus_deltas;
  double cminus_threshold = 1e-8;
  // Integer proximity on these Deltas.
  std::vector<long> proximity_deltas;
  double vanish_threshold = 1e-10;
};

struct OutputConfig {
  std::string table, csv, report;
};

struct JobConfig {
  std::string name;  // config file stem
  SolveJob job;      // M0, Q = 0 mean automatic
  std::optional<Phase2Config> phase2;
  std::optional<std::string> lvalues_csv;  // resolved against the config directory
  OutputConfig outputs;
  CheckConfig checks;
};

// Parses and validates everything a run needs before any computation. Every
// error is a ValidationError naming the offending key.
JobConfig parse_job_config(const std::string& json_text, const std::string& name, const std::string& base_dir);
JobConfig load_job_config(const std::string& path);

}  // namespace hwmf
