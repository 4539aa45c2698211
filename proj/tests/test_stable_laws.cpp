#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tailgate/error.hpp"
#include "tailgate/stable_laws.hpp"

using namespace tailgate;

namespace {

double sample_variance(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

}  // namespace

TEST_CASE("characteristic function values") {
  CHECK(sas_characteristic({2.0, 1.0}, 0.0) == 1.0);
  CHECK(sas_characteristic({1.0, 1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(sas_characteristic({2.0, 1.0}, 2.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
  CHECK(sas_characteristic({1.0, 2.0}, 0.5) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(sas_characteristic({1.5, 1.0}, 0.0) == 1.0);
  CHECK(sas_characteristic({1.5, 2.0}, -0.7) ==
        doctest::Approx(std::exp(-std::pow(2.0 * 0.7, 1.5))).epsilon(1e-14));
}

TEST_CASE("characteristic function is even, in (0,1], non-increasing in |t|") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const StableParams p{0.05 + 1.95 * open_uniform(rng), 0.1 + 3.0 * open_uniform(rng)};
    const double t = 5.0 * open_uniform(rng);
    const double u = t + 3.0 * open_uniform(rng);
    const double ft = sas_characteristic(p, t);
    CHECK(ft == sas_characteristic(p, -t));
    CHECK(ft > 0.0);
    CHECK(ft < 1.0);
    CHECK(sas_characteristic(p, u) <= ft);
  }
}

TEST_CASE("parameter validation") {
  Rng rng = make_rng(1);
  CHECK_THROWS_AS(sample_sas(StableParams{0.0, 1.0}, rng), Error);
  CHECK_THROWS_AS(sample_sas(StableParams{2.5, 1.0}, rng), Error);
  CHECK_THROWS_AS(sample_sas(StableParams{1.5, 0.0}, rng), Error);
  CHECK_THROWS_AS(sample_sas(StableParams{1.5, -1.0}, 10, rng), Error);
  CHECK_THROWS_AS(sas_characteristic(StableParams{-1.0, 1.0}, 0.5), Error);
}

TEST_CASE("Cauchy draws: median near 0, half the mass in (-1, 1)") {
  Rng rng = make_rng(2024);
  const auto xs = sample_sas({1.0, 1.0}, 100000, rng);
  CHECK(std::abs(oracle::median(xs)) < 0.02);
  const double inside = static_cast<double>(std::count_if(
                            xs.begin(), xs.end(), [](double x) { return std::abs(x) < 1.0; })) /
                        xs.size();
  const double expected = oracle::cauchy_cdf(1.0) - oracle::cauchy_cdf(-1.0);
  CHECK(expected == doctest::Approx(0.5));
  CHECK(std::abs(inside - expected) < 0.01);
  // Whole-distribution check against the exact CDF at the 1% level.
  const double d = oracle::ks_one_sample(xs, [](double x) { return oracle::cauchy_cdf(x); });
  CHECK(d < 1.628 / std::sqrt(1e5));
}

TEST_CASE("alpha = 2 is N(0, 2 sigma^2)") {
  Rng rng = make_rng(7);
  const auto xs = sample_sas({2.0, 1.0}, 100000, rng);
  CHECK(std::abs(sample_variance(xs) - 2.0) < 0.1);
  // The reference Gaussian sampler lands in the same band.
  CHECK(std::abs(sample_variance(oracle::gaussian(100000, 2.0, 7)) - 2.0) < 0.1);
  const double d = oracle::ks_one_sample(
      xs, [](double x) { return oracle::normal_cdf(x / std::numbers::sqrt2); });
  CHECK(d < 1.628 / std::sqrt(1e5));

  Rng rng3 = make_rng(8);
  const auto ys = sample_sas({2.0, 3.0}, 100000, rng3);
  CHECK(std::abs(sample_variance(ys) / 18.0 - 1.0) < 0.05);
}

TEST_CASE("sigma is a scale parameter") {
  for (double a : {0.7, 1.0, 1.5, 2.0}) {
    Rng r1 = make_rng(99);
    Rng r2 = make_rng(99);
    for (int i = 0; i < 100; ++i) {
      const double x1 = sample_sas({a, 1.0}, r1);
      const double x3 = sample_sas({a, 3.0}, r2);
      CHECK(x3 == doctest::Approx(3.0 * x1).epsilon(1e-14));
    }
  }
}

TEST_CASE("alpha < 2: sample variance keeps growing with n") {
  int grew = 0;
  for (unsigned seed = 0; seed < 10; ++seed) {
    Rng rng = make_rng(1000 + seed);
    const auto big = sample_sas({1.0, 1.0}, 1000000, rng);
    const std::vector<double> small(big.begin(), big.begin() + 1000);
    if (sample_variance(big) > sample_variance(small)) ++grew;
  }
  CHECK(grew >= 9);
}

TEST_CASE("two-sample KS statistic matches brute force") {
  CHECK(ks_two_sample_statistic(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(ks_two_sample_statistic(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
  CHECK(ks_two_sample_statistic(std::vector<double>{0}, std::vector<double>{0, 1}) == 0.5);
  CHECK_THROWS_AS(ks_two_sample_statistic(std::vector<double>{}, std::vector<double>{1.0}), Error);

  std::mt19937_64 eng(5);
  std::uniform_int_distribution<int> len(1, 40), val(0, 12);
  for (int trial = 0; trial < 300; ++trial) {
    // Small integer values force plenty of ties.
    std::vector<double> a(len(eng)), b(len(eng));
    for (auto& v : a) v = val(eng);
    for (auto& v : b) v = val(eng) * 0.5;
    CHECK(ks_two_sample_statistic(a, b) == doctest::Approx(oracle::ks_brute(a, b)).epsilon(1e-15));
  }
}

TEST_CASE("KS critical value") {
  CHECK(ks_critical_value(0.01, 100, 100) ==
        doctest::Approx(oracle::ks_c01() * std::sqrt(0.02)).epsilon(1e-14));
  // Familiar table value c(0.01) = 1.628.
  CHECK(oracle::ks_c01() == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK_THROWS_AS(ks_critical_value(0.0, 10, 10), Error);
  CHECK_THROWS_AS(ks_critical_value(0.01, 0, 10), Error);
}

TEST_CASE("strict stability holds for sampler output") {
  for (double a : {1.0, 1.5, 2.0}) {
    Rng rng = make_rng(static_cast<std::uint64_t>(a * 100));
    const auto xs = sample_sas({a, 1.0}, 100000, rng);
    for (std::size_t m : {2u, 4u, 8u}) {
      const StabilityCheck c = stability_check(xs, m, a, rng);
      CAPTURE(a);
      CAPTURE(m);
      CHECK(c.n_groups == 50000 / m);
      CHECK(c.statistic < ks_critical_value(0.01, c.n_groups, c.n_groups));
      if (m == 4) CHECK(c.statistic < 0.02);
    }
  }
}

TEST_CASE("stability check rejects the wrong alpha") {
  // Gaussian draws from the reference sampler, tested as if Cauchy. Sums of
  // 4 are scaled by 1/4 instead of 1/2, so the comparison is N(0, 1/4)
  // against N(0, 1): sup |Phi(2x) - Phi(x)| at x = sqrt(2 ln 2 / 3).
  const double x = std::sqrt(2.0 * std::log(2.0) / 3.0);
  const double gap = oracle::normal_cdf(2.0 * x) - oracle::normal_cdf(x);
  CHECK(gap > 0.15);

  const auto xs = oracle::gaussian(100000, 1.0, 3);
  Rng rng = make_rng(3);
  CHECK(stability_ks_statistic(xs, 4, 1.0, rng) > 0.1);
  CHECK(stability_ks_statistic(xs, 4, 2.0, rng) < 0.02);
  for (std::size_t m : {2u, 4u, 8u}) {
    const StabilityCheck c = stability_check(xs, m, 1.0, rng);
    CHECK(c.statistic > ks_critical_value(0.01, c.n_groups, c.n_groups));
  }
}

TEST_CASE("stability check preconditions") {
  Rng rng = make_rng(4);
  const std::vector<double> xs(1000, 1.0);
  CHECK_THROWS_AS(stability_check(xs, 1, 1.5, rng), Error);
  CHECK_THROWS_AS(stability_check(xs, 8, 1.5, rng), Error);  // needs 1600
  CHECK_THROWS_AS(stability_check(xs, 2, 2.5, rng), Error);
  CHECK_NOTHROW(stability_check(xs, 5, 1.5, rng));
}
