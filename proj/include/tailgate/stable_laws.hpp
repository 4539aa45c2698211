#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailgate/random.hpp"

namespace tailgate {

// Symmetric alpha-stable law SaS(sigma) with characteristic function
// exp(-sigma^alpha |t|^alpha).
struct StableParams {
  double alpha = 2.0;  // (0, 2]
  double sigma = 1.0;  // > 0

  // Throws tailgate::Error when outside the valid ranges.
  void validate() const;
};

double sas_characteristic(const StableParams& params, double t);

// One draw by the Chambers-Mallows-Stuck transform. alpha == 1 and
// alpha == 2 use the Cauchy and Gaussian closed forms.
double sample_sas(const StableParams& params, Rng& rng);

std::vector<double> sample_sas(const StableParams& params, std::size_t n,
                               Rng& rng);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_two_sample_statistic(std::span<const double> a,
                               std::span<const double> b);

// Asymptotic two-sided critical value c(level) * sqrt((n + m) / (n m)) with
// c(level) = sqrt(-log(level / 2) / 2).
double ks_critical_value(double level, std::size_t n, std::size_t m);

// Checks sum_{i<m} X_i =d m^{1/alpha} X on a sample. The first half of
// `samples` is cut into consecutive disjoint groups of m whose sums are
// scaled by m^{-1/alpha}; an equal number of raw samples is drawn without
// replacement (order kept) from the second half. Returns the KS statistic
// between the two collections.
struct StabilityCheck {
  double statistic = 0.0;
  std::size_t n_groups = 0;  // size of each compared collection
};

StabilityCheck stability_check(std::span<const double> samples, std::size_t m,
                               double alpha, Rng& rng);

inline double stability_ks_statistic(std::span<const double> samples,
                                     std::size_t m, double alpha, Rng& rng) {
  return stability_check(samples, m, alpha, rng).statistic;
}

}  // namespace tailgate
