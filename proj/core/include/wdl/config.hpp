#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wdl/harness.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

/// [solver] section.  dt = 0 selects suggest_dt.
struct SolverSettings {
  double dt = 0.0;
  double T = 0.5;
  std::size_t snapshots = 5;  // equally spaced in (0, T]
  double box_L = 40.0;
  std::size_t grid_N = 2048;
  double epsilon = 0.1;
  double s = 0.8;
  double s_c = 0.4;
  double zeta = 0.0;
  double packet_width = 1.0;

  Grid grid(int d) const { return {d, grid_N, box_L}; }
  ScalingRegime regime() const { return {epsilon, s, s_c}; }
  std::vector<double> snapshot_times() const;
};

/// Self-test sizes for `validate`.
struct ValidateSettings {
  std::size_t prop1_samples = 100000;
  double prop1_correlation = 0.9;
  std::size_t cov_realizations = 10000;
  double cov_dt = 0.5;
  double cov_box_L = 128.0;
  std::size_t cov_grid_N = 512;
};

struct Config {
  ModelParams model;
  SolverSettings solver;
  ExperimentPlan plan = plan_frac_default();
  ValidateSettings validate;
  std::uint64_t seed = 1;
};

/// Strict INI: unknown sections or keys, duplicates and malformed values raise ConfigError.
/// A nonempty `plan` replaces the [experiment] plan key as the base plan.
Config parse_config(const std::string& text, const std::string& plan = {});
Config load_config(const std::filesystem::path& path, const std::string& plan = {});

/// Canonical text with every key, in a fixed order, numbers at full precision.
/// parse_config(to_ini(c)) reproduces c.
std::string to_ini(const Config& c);
std::string model_section(const ModelParams& p);

std::string mixture_name(MixtureRule m);
std::string plan_kind_name(PlanKind k);

}  // namespace wdl
