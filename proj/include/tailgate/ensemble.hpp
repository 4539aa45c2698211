#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailgate/relu_gate.hpp"
#include "tailgate/tail_estimator.hpp"

namespace tailgate {

// Each run draws its own teacher w_star ~ N(0, I_dim).
struct RealizableTemplate {
  std::size_t dim = 100;
};

// Mixture ensembles share one fixed task across runs.
using TaskTemplate = std::variant<RealizableTemplate, MixtureTask>;

std::size_t input_dim(const TaskTemplate& task);

struct EnsembleConfig {
  std::size_t k1 = 25;
  std::size_t k2 = 25;
  std::uint64_t master_seed = 0;
  TrainConfig train;
  TaskTemplate task = RealizableTemplate{};

  // Realizable runs must end with ||w_T - w_star|| below this.
  double convergence_gate = 1e-5;
  // Mixture runs must have a classification-error trace whose last fifth
  // differs from the fifth before it by less than this, relatively.
  double saturation_tolerance = 0.05;

  // 0: use TAILGATE_WORKERS if set, else the hardware thread count.
  std::size_t workers = 0;

  std::size_t run_count() const noexcept { return k1 * k2; }
  void validate() const;
};

struct EnsembleResult {
  TailIndexEstimate estimate;
  std::vector<double> per_run_norms;  // |X_s| in run order
  // Max over runs of the final recovery error (realizable) or the final
  // classification error (mixture).
  double convergence = 0.0;
  // Max over runs of the relative tail change of the classification-error
  // trace (mixture only).
  double max_tail_change = 0.0;
  // Indices of failed runs. Always empty on a returned result: a failure
  // throws EnsembleError carrying the same list.
  std::vector<std::size_t> failures;
};

// Seed of run `run_index` of an ensemble.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

// The starting point shared by every run of an ensemble, drawn from
// N(0, I_dim) on a stream reserved for it.
WeightVector shared_init(std::uint64_t master_seed, std::size_t dim);

// Relative change between the mean of the last fifth of a trace and the
// fifth before it. Traces shorter than 2 points report 0.
double relative_tail_change(std::span<const TracePoint> trace);

// Centered samples X_s = tail_average_s - w_star_s, one per run, fed to the
// block-sum Hill estimator.
EnsembleResult run_realizable_ensemble(const EnsembleConfig& cfg);

// Centered samples X_s = tail_average_s - mean_s(tail_average_s).
EnsembleResult run_classification_ensemble(const EnsembleConfig& cfg);

EnsembleResult run_ensemble(const EnsembleConfig& cfg);

enum class Axis { dimension, batch, eta };

std::string to_string(Axis axis);
Axis parse_axis(const std::string& s);

struct SweepPoint {
  double value = 0.0;
  EnsembleConfig config;  // as run, including the re-mixed seed
  EnsembleResult result;
};

struct SweepSeries {
  Axis axis = Axis::batch;
  std::vector<SweepPoint> points;
};

// Seed of sweep point `point_index`.
std::uint64_t point_seed(std::uint64_t master_seed, std::size_t point_index);

// `base` with the axis parameter replaced by `value` and the master seed
// re-mixed for `point_index`.
EnsembleConfig sweep_point_config(const EnsembleConfig& base, Axis axis,
                                  double value, std::size_t point_index);

SweepSeries sweep(const EnsembleConfig& base, Axis axis,
                  std::span<const double> values);

}  // namespace tailgate
