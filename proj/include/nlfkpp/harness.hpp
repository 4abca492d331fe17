#pragma once

// Experiment configuration, figure presets, parameter sweeps and artifact output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlfkpp/bounds.hpp"
#include "nlfkpp/core_model.hpp"
#include "nlfkpp/lyapunov.hpp"
#include "nlfkpp/solver.hpp"

namespace nlfkpp {

struct GridSpec {
  double x_left = -5.0;
  double x_right = 5.0;
  int n_cells = 1000;
  bool periodic = false;
  double left_value = 1.0;
  double right_value = 0.0;

  Grid1D build() const;
};

enum class InitialKind { Front, OscillatoryBump, ConstantTimesNoise, Custom };

struct InitialSpec {
  InitialKind kind = InitialKind::Front;
  // OscillatoryBump: floor + amplitude * (1 + cos(wavenumber x)) / 2
  double amplitude = 0.2;
  double wavenumber = 3.0;
  double floor = 0.01;
  // ConstantTimesNoise: level * (1 + noise * U(-1, 1)), U from a seeded mt19937_64
  double level = 1.0;
  double noise = 0.01;
  std::uint64_t seed = 0;
  // Custom: nodal values, given inline or as a file with one value per line
  std::vector<double> values;
  std::string file;
};

Field make_initial(const InitialSpec& spec, const Grid1D& grid);

struct DiagnosticsSpec {
  double a = -2.0;  // compact set [a, b] for the hair-trigger test
  double b = 2.0;
  double tol = 1e-2;
  double horizon = 50.0;
  bool monitor = true;  // run the entropy inequality monitor
  LyapunovConfig lyapunov;
  std::optional<double> pattern_level;  // defaults to the steady state
};

struct ExperimentConfig {
  std::string name = "custom";
  ModelParams params;
  Kernel kernel = Kernel::uniform();
  GridSpec grid;
  InitialSpec initial;
  SolverConfig solver;
  std::optional<DiagnosticsSpec> diagnostics;
  std::vector<double> display_times;  // empty: {0, t_end/4, t_end/2, t_end}
  // Inputs of the bounds subcommand beyond the model parameters.
  int N = 1;
  double K = 2.0;
  std::optional<double> u0_sup;
  double G = 1.0;
  std::optional<int> m;

  void validate() const;
  std::vector<double> resolved_display_times() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

struct ExperimentResult {
  RunOutcome outcome;
  std::optional<HairTriggerReport> hair_trigger;
  std::optional<ResidualReport> residuals;
  PatternMetrics final_pattern;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// snapshots.ndjson, summary.csv, diagnostics.json, profile.csv and config.json in `dir`.
void write_artifacts(const ExperimentConfig& config, const ExperimentResult& result, const std::filesystem::path& dir);

std::string diagnostics_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Post-processes stored snapshots: {"hair_trigger":..., "lyapunov_residuals":[...], "pattern":[...]}.
/// Uses config.diagnostics when present, default settings otherwise.
std::string diagnose_snapshots_json(const ExperimentConfig& config, const std::vector<Field>& snapshots);

/// Runs a preset and writes its artifacts to out_root / name.
ExperimentResult run_preset(const std::string& name, const std::filesystem::path& out_root);

BoundInputs bound_inputs(const ExperimentConfig& config);
std::string bound_report_json(const BoundReport& report);

enum class SweepMode { Bisect, Scan };

struct SweepSpec {
  std::string param = "alpha";  // alpha, beta, mu, kappa, diffusion or sigma
  SweepMode mode = SweepMode::Bisect;
  double lo = 0.0;
  double hi = 1.0;
  double tol = 0.05;
  std::vector<double> values;  // scan mode
  int threads = 0;             // 0: sweep_concurrency()
};

struct SweepPoint {
  double value = 0.0;
  RunStatus status = RunStatus::CompletedBounded;
  BlowUpReason reason = BlowUpReason::None;
  double event_time = 0.0;
  bool blew_up() const { return status != RunStatus::CompletedBounded; }
};

struct SweepReport {
  SweepMode mode = SweepMode::Bisect;
  std::string param;
  std::vector<SweepPoint> points;  // every run, in ascending parameter order
  std::optional<double> threshold; // smallest value found to blow up (bisect)
  double bracket_lo = 0.0;         // largest value found bounded
  double bracket_hi = 0.0;
  bool in_range = true;
  std::string message;
};

/// NLFKPP_THREADS if set, otherwise the hardware concurrency (at least 1).
int sweep_concurrency();

ExperimentConfig with_parameter(const ExperimentConfig& base, const std::string& param, double value);

SweepReport sweep(const ExperimentConfig& base, const SweepSpec& spec);
std::string sweep_report_json(const SweepReport& report);

}  // namespace nlfkpp
