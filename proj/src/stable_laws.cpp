#include "tailgate/stable_laws.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <string>

#include "tailgate/error.hpp"

namespace tailgate {

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw Error("stable law: alpha must lie in (0, 2], got " +
                std::to_string(alpha));
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error("stable law: sigma must be positive, got " +
                std::to_string(sigma));
}

double sas_characteristic(const StableParams& params, double t) {
  params.validate();
  return std::exp(-std::pow(params.sigma, params.alpha) *
                  std::pow(std::abs(t), params.alpha));
}

namespace {

double draw(const StableParams& p, Rng& rng) {
  using std::numbers::pi;
  if (p.alpha == 2.0) return p.sigma * std::numbers::sqrt2 * standard_normal(rng);

  const double v = pi * (open_uniform(rng) - 0.5);
  if (p.alpha == 1.0) return p.sigma * std::tan(v);

  const double e = standard_exponential(rng);
  const double a = p.alpha;
  const double lhs = std::sin(a * v) / std::pow(std::cos(v), 1.0 / a);
  const double rhs = std::pow(std::cos(v - a * v) / e, (1.0 - a) / a);
  return p.sigma * lhs * rhs;
}

}  // namespace

double sample_sas(const StableParams& params, Rng& rng) {
  params.validate();
  return draw(params, rng);
}

std::vector<double> sample_sas(const StableParams& params, std::size_t n,
                               Rng& rng) {
  params.validate();
  std::vector<double> out(n);
  for (auto& x : out) x = draw(params, rng);
  return out;
}

double ks_two_sample_statistic(std::span<const double> a,
                               std::span<const double> b) {
  if (a.empty() || b.empty())
    throw Error("ks_two_sample_statistic: both samples must be nonempty");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Advance past every copy of the smaller value so ties are stepped together.
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_value(double level, std::size_t n, std::size_t m) {
  if (!(level > 0.0 && level < 1.0))
    throw Error("ks_critical_value: level must lie in (0, 1)");
  if (n == 0 || m == 0) throw Error("ks_critical_value: empty sample");
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

StabilityCheck stability_check(std::span<const double> samples, std::size_t m,
                               double alpha, Rng& rng) {
  if (m < 2) throw Error("stability_ks_statistic: m must be at least 2");
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw Error("stability_ks_statistic: alpha must lie in (0, 2]");
  if (samples.size() < m * 200)
    throw Error("stability_ks_statistic: need at least m*200 = " +
                std::to_string(m * 200) + " samples, got " +
                std::to_string(samples.size()));

  const std::size_t half = samples.size() / 2;
  const std::size_t groups = half / m;
  const double scale = std::pow(static_cast<double>(m), -1.0 / alpha);

  std::vector<double> sums(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += samples[g * m + j];
    sums[g] = scale * s;
  }

  std::vector<double> raw;
  raw.reserve(groups);
  const auto rest = samples.subspan(half);
  std::sample(rest.begin(), rest.end(), std::back_inserter(raw), groups, rng);

  return {ks_two_sample_statistic(sums, raw), groups};
}

}  // namespace tailgate
