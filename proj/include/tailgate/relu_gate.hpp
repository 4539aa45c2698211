#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailgate/random.hpp"
#include "tailgate/samples.hpp"

namespace tailgate {

inline double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

double dot(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

// Labels y = relu(<w_star, x>) with x ~ N(0, I_d).
struct RealizableTask {
  WeightVector w_star;

  std::size_t input_dim() const noexcept { return w_star.size(); }
  void validate() const;
};

// Fair-coin mixture: label 1 with x ~ N(mean, sigma1^2 I), label 0 with
// x ~ N(-mean, sigma0^2 I). Experiments require sigma0 != sigma1; that is
// checked by EnsembleConfig, not here.
struct MixtureTask {
  WeightVector mean;
  double sigma0 = 1.0;
  double sigma1 = 2.0;

  std::size_t input_dim() const noexcept { return mean.size(); }
  void validate() const;

  // mean = (1, ..., 1) / sqrt(d), sigma0 = 1, sigma1 = 2.
  static MixtureTask with_defaults(std::size_t dim);
};

using Task = std::variant<RealizableTask, MixtureTask>;

std::size_t input_dim(const Task& task);

enum class Variant { sgd, alg1 };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

// How classification error is scored. `positive_preactivation` predicts
// class 1 iff <w, x> > 0. `literal` predicts 1{relu(<w, x>) >= 0}, which is
// class 1 for every input.
enum class Predictor { positive_preactivation, literal };

// How a realizable run draws its batches. `materialized` draws every x_i in
// full. `projected` draws only what the update depends on: the coordinates
// of each x_i in span{w, w_star} and, for the orthogonal remainder, the
// single Gaussian vector sum_i c_i P x_i ~ N(0, (sum_i c_i^2) P), where P
// projects off the span and c_i is the i-th gradient coefficient. Both give
// the same law of the iterates for Gaussian inputs; projected costs
// O(b + d) per step instead of O(b d). Mixture runs always materialize.
enum class BatchSampler { materialized, projected };

std::string to_string(BatchSampler s);
BatchSampler parse_sampler(const std::string& s);

struct TrainConfig {
  double eta = 0.005;
  std::size_t batch = 32;
  std::size_t iters = 8000;
  std::size_t tail_window = 1000;
  Variant variant = Variant::sgd;

  // Diagnostics: a trace point every `trace_stride` steps, plus t = 0 and
  // t = iters. Mixture runs estimate classification error from `n_mc`
  // samples, the same evaluation sample at every checkpoint.
  std::size_t trace_stride = 100;
  std::size_t n_mc = 4000;
  Predictor predictor = Predictor::positive_preactivation;
  BatchSampler sampler = BatchSampler::projected;

  void validate() const;
};

struct Batch {
  SampleSet x;
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
};

struct LabeledPoint {
  WeightVector x;
  double y = 0.0;
};

struct TracePoint {
  std::size_t t = 0;
  double value = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct RunOutcome {
  WeightVector final_w;       // iterate after the last step
  WeightVector tail_average;  // mean of the iterates after steps T-W+1..T
  std::vector<TracePoint> recovery_error_trace;        // realizable only
  std::vector<TracePoint> classification_error_trace;  // mixture only
  // Set when Algorithm-1 updates were run on 0/1 mixture labels; the
  // indicator then keeps only class-1 samples.
  bool alg1_on_mixture = false;
};

Batch realizable_batch(const RealizableTask& task, std::size_t b, Rng& rng);

LabeledPoint mixture_sample(const MixtureTask& task, Rng& rng);
Batch mixture_batch(const MixtureTask& task, std::size_t b, Rng& rng);

// -(1/b) sum_i 1{y_i > 0} (y_i - <w, x_i>) x_i
WeightVector alg1_gradient(std::span<const double> w, const Batch& batch);

// -(1/b) sum_i 1{<w, x_i> > 0} (y_i - <w, x_i>) x_i, the batch gradient of
// (1/2)(y - relu(<w, x>))^2.
WeightVector sgd_gradient(std::span<const double> w, const Batch& batch);

WeightVector gradient(Variant variant, std::span<const double> w,
                      const Batch& batch);

// Misclassification rate over n_mc fresh mixture draws.
double classification_error(std::span<const double> w, const MixtureTask& task,
                            std::size_t n_mc, Rng& rng,
                            Predictor predictor = Predictor::positive_preactivation);

// Fresh-sample mini-batch training from w_init: w <- w - eta * g for
// cfg.iters steps. `rng` drives the data stream; one word is taken from it
// up front to seed the diagnostics sample. Throws DivergenceError on the
// first non-finite iterate.
RunOutcome train_run(const Task& task, const TrainConfig& cfg,
                     std::span<const double> w_init, Rng& rng);

}  // namespace tailgate
