#include "tailgate/tail_estimator.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tailgate/error.hpp"

namespace tailgate {

void HillConfig::validate() const {
  if (k1 < 2) throw Error("hill: k1 must be >= 2 (log k1 is a divisor), got " +
                          std::to_string(k1));
  if (k2 < 1) throw Error("hill: k2 must be >= 1, got " + std::to_string(k2));
}

namespace {

void check_length(const SampleSet& xs, const HillConfig& cfg) {
  cfg.validate();
  if (xs.size() < cfg.sample_count())
    throw Error("hill: need k1*k2 = " + std::to_string(cfg.sample_count()) +
                " samples, got " + std::to_string(xs.size()));
}

double norm(std::span<const double> v) {
  if (v.size() == 1) return std::abs(v[0]);
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double checked_norm(std::span<const double> v, const char* what, std::size_t i) {
  const double n = norm(v);
  if (!(n > 0.0)) {
    std::ostringstream msg;
    msg << "hill: " << what << ' ' << i << " has zero magnitude";
    throw ZeroNormError(msg.str(), i);
  }
  return n;
}

// log(n / ref), taking the ratio first so that n == c * ref with exact c
// gives exactly log(c).
double log_ratio(double n, double ref) {
  const double r = n / ref;
  if (r > 0.0 && std::isfinite(r)) return std::log(r);
  return std::log(n) - std::log(ref);
}

// Mean of v as v[0] + mean(v[i] - v[0]): exact when all entries agree.
double centered_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x - v.front();
  return v.front() + s / static_cast<double>(v.size());
}

}  // namespace

SampleSet block_sums(const SampleSet& xs, const HillConfig& cfg) {
  check_length(xs, cfg);
  const std::size_t d = xs.dim();
  std::vector<double> out(cfg.k2 * d, 0.0);
  for (std::size_t i = 0; i < cfg.k2; ++i) {
    double* y = out.data() + i * d;
    for (std::size_t j = 0; j < cfg.k1; ++j) {
      const auto x = xs.row(i * cfg.k1 + j);
      for (std::size_t c = 0; c < d; ++c) y[c] += x[c];
    }
  }
  return SampleSet(d, std::move(out));
}

double hill_inverse_alpha(const SampleSet& xs, const HillConfig& cfg) {
  const SampleSet ys = block_sums(xs, cfg);

  // Logs are taken relative to |X_0|; the offset cancels in the
  // difference and constant input gives exactly 1.
  std::vector<double> raw(cfg.sample_count());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = checked_norm(xs.row(i), "sample", i);
  const double ref = raw.front();
  for (auto& r : raw) r = log_ratio(r, ref);
  std::vector<double> blocks(cfg.k2);
  for (std::size_t i = 0; i < cfg.k2; ++i)
    blocks[i] = log_ratio(checked_norm(ys.row(i), "block sum", i), ref);

  const double mean_blocks = centered_mean(blocks);
  const double mean_raw = centered_mean(raw);
  return (mean_blocks - mean_raw) / std::log(static_cast<double>(cfg.k1));
}

TailIndexEstimate hill_alpha(const SampleSet& xs, const HillConfig& cfg) {
  const double inv = hill_inverse_alpha(xs, cfg);
  if (!(inv > 0.0))
    throw NonPositiveEstimateError(
        "hill: estimate of 1/alpha is " + std::to_string(inv) +
            " (not positive); sample is not heavy-tail consistent at this "
            "block size",
        inv);
  return {inv, 1.0 / inv, cfg.k1, cfg.k2, cfg.sample_count()};
}

}  // namespace tailgate
