#pragma once

// Reference computations for the tests, written independently of the
// library: standard-library RNG, closed-form CDFs, brute-force statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double cauchy_cdf(double x, double scale = 1.0) {
  return 0.5 + std::atan(x / scale) / std::numbers::pi;
}

// N(0, var) draws from std::normal_distribution on mt19937_64.
inline std::vector<double> gaussian(std::size_t n, double var, unsigned long long seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(var));
  std::vector<double> out(n);
  for (auto& v : out) v = dist(eng);
  return out;
}

// sup_x |F_a(x) - F_b(x)|, evaluated at every sample point by counting.
inline double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  auto ecdf = [](const std::vector<double>& s, double x) {
    return static_cast<double>(std::count_if(s.begin(), s.end(),
                                             [x](double v) { return v <= x; })) /
           static_cast<double>(s.size());
  };
  double best = 0.0;
  for (const auto* s : {&a, &b})
    for (double x : *s) best = std::max(best, std::abs(ecdf(a, x) - ecdf(b, x)));
  return best;
}

// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    best = std::max({best, (i + 1) / n - f, f - i / n});
  }
  return best;
}

// 1% two-sided asymptotic KS constant, sqrt(-ln(0.005)/2).
inline double ks_c01() { return std::sqrt(-std::log(0.005) / 2.0); }

// Block-sum Hill estimate of 1/alpha straight from its definition, on
// rows of arbitrary dimension.
inline double hill_inverse(const std::vector<std::vector<double>>& xs,
                           std::size_t k1, std::size_t k2) {
  auto norm = [](const std::vector<double>& v) {
    long double s = 0;
    for (double c : v) s += static_cast<long double>(c) * c;
    return std::sqrt(static_cast<double>(s));
  };
  long double log_y = 0, log_x = 0;
  for (std::size_t i = 0; i < k2; ++i) {
    std::vector<double> y(xs[0].size(), 0.0);
    for (std::size_t j = 0; j < k1; ++j)
      for (std::size_t c = 0; c < y.size(); ++c) y[c] += xs[i * k1 + j][c];
    log_y += std::log(norm(y));
  }
  for (std::size_t s = 0; s < k1 * k2; ++s) log_x += std::log(norm(xs[s]));
  const long double diff = log_y / k2 - log_x / (k1 * k2);
  return static_cast<double>(diff / std::log(static_cast<long double>(k1)));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
