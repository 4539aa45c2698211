#pragma once

#include <cstddef>
#include <span>

#include "tailgate/samples.hpp"

namespace tailgate {

// Block layout of the estimator: k2 blocks of k1 consecutive samples.
struct HillConfig {
  std::size_t k1 = 25;  // block length, >= 2
  std::size_t k2 = 25;  // number of blocks, >= 1

  std::size_t sample_count() const noexcept { return k1 * k2; }
  void validate() const;
};

struct TailIndexEstimate {
  double inv_alpha = 0.0;
  double alpha = 0.0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t n_used = 0;  // k1 * k2
};

// Componentwise sums of k2 consecutive blocks of k1 rows. Rows beyond
// k1 * k2 are ignored. Each block is summed left to right.
SampleSet block_sums(const SampleSet& xs, const HillConfig& cfg);

// Block-sum Hill estimator of 1/alpha:
//
//   (1 / log k1) * ( mean_i log|Y_i| - mean_j log|X_j| )
//
// over the k2 block sums Y and the k1*k2 leading samples X, with |.| the
// Euclidean norm. Throws ZeroNormError naming the first zero-magnitude
// sample or block sum. The result is not clamped and may be negative.
double hill_inverse_alpha(const SampleSet& xs, const HillConfig& cfg);

// Reciprocal of hill_inverse_alpha. Throws NonPositiveEstimateError when
// the inverse estimate is <= 0.
TailIndexEstimate hill_alpha(const SampleSet& xs, const HillConfig& cfg);

inline double hill_inverse_alpha(std::span<const double> xs,
                                 const HillConfig& cfg) {
  return hill_inverse_alpha(SampleSet::scalars(xs), cfg);
}

inline TailIndexEstimate hill_alpha(std::span<const double> xs,
                                    const HillConfig& cfg) {
  return hill_alpha(SampleSet::scalars(xs), cfg);
}

}  // namespace tailgate
