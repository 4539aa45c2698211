#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include "tailgate/ensemble.hpp"

namespace tailgate {

enum class ExperimentKind {
  validate_estimator,
  realizable_sweep,
  classification_sweep,
  single_run,
  stability_check,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& s);

enum class TaskKind { realizable, mixture };

// Everything one CLI invocation needs. Configs are flat JSON objects whose
// keys are the field names below; absent keys take the defaults listed in
// README.md.
struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::realizable_sweep;
  TaskKind task = TaskKind::realizable;

  // Training and ensemble.
  std::vector<std::size_t> dims{100};
  std::vector<double> eta{0.005};
  std::vector<std::size_t> batch{32};
  std::optional<Axis> axis;  // inferred from the list with >1 entry
  Variant variant = Variant::sgd;
  std::size_t k1 = 25;
  std::size_t k2 = 25;
  std::size_t iters = 8000;
  std::size_t tail_window = 1000;
  std::uint64_t seed = 0;
  double convergence_gate = 1e-5;
  double saturation_tolerance = 0.05;
  std::size_t trace_stride = 100;
  std::size_t n_mc = 4000;
  Predictor predictor = Predictor::positive_preactivation;
  BatchSampler sampler = BatchSampler::projected;

  // Mixture geometry: mean = mean_scale * (1, ..., 1) / sqrt(d).
  double mean_scale = 1.0;
  double sigma0 = 1.0;
  double sigma1 = 2.0;

  // validate-estimator and stability-check.
  std::vector<double> alphas{1.0, 1.5, 2.0};
  double sigma = 1.0;
  std::size_t n_samples = 10000;
  std::size_t seeds = 20;
  std::vector<std::size_t> ms{2, 4, 8};
  double level = 0.01;

  std::filesystem::path out;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// Reads and validates a config. `kind` (from the CLI subcommand) supplies
// the kind when the file has none and must agree with it otherwise. Missing
// keys are filled from kind-dependent defaults. Throws ConfigError naming
// the key.
ExperimentSpec parse_config(const std::filesystem::path& path,
                            std::optional<ExperimentKind> kind = std::nullopt);
ExperimentSpec parse_config_text(const std::string& json_text,
                                 std::optional<ExperimentKind> kind,
                                 const std::string& default_name);

// Re-checks every field range; parse_config already calls this.
void validate(const ExperimentSpec& spec);

// k1 = k2 = 10. T is left alone: both the recovery gate and the
// saturation gate need the configured run length.
void apply_ci_scale(ExperimentSpec& spec);

// The flat JSON form of a spec; parse_config_text of it reproduces `spec`.
std::string to_json(const ExperimentSpec& spec);

// The swept axis and its values for a sweep kind.
Axis sweep_axis(const ExperimentSpec& spec);
std::vector<double> axis_values(const ExperimentSpec& spec);

// Ensemble template of a sweep kind (first entry of each non-swept list).
EnsembleConfig ensemble_config(const ExperimentSpec& spec);

// Header of a sweep CSV.
inline constexpr const char* kSeriesHeader =
    "axis,alpha,inv_alpha,k1,k2,max_final_error,max_tail_change,eta,batch,dim,"
    "variant,seed";

// Writes the series as CSV, one row per point, reals at 17 significant
// digits.
void write_series_csv(const SweepSeries& series, std::ostream& os);

// Writes `path` and the sidecar `path + ".meta.json"` holding to_json(spec).
void emit_series(const SweepSeries& series, const ExperimentSpec& spec,
                 const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
void write_sidecar(const ExperimentSpec& spec,
                   const std::filesystem::path& csv_path);

// 17 significant digits.
std::string format_real(double v);

// Runs the experiment described by `spec`, writing spec.out and its
// sidecar. Progress lines go to `log`. Throws on any failure (ensemble
// aborts carry the failing run and axis value in the message).
void run_experiment(const ExperimentSpec& spec, std::ostream& log);

}  // namespace tailgate
