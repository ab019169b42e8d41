#include "dhyper/stats.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "dhyper/sampler.hpp"

using namespace dhyper;

TEST_CASE("ks_two_sample basic values") {
  const std::vector<double> a{1.0, 2.0, 2.0, 3.0};
  auto res = ks_two_sample(a, a);
  CHECK(res.statistic == 0.0);
  CHECK(res.p_value == 1.0);

  const std::vector<double> zeros(4, 0.0), ones(4, 1.0);
  CHECK(ks_two_sample(zeros, ones).statistic == doctest::Approx(1.0));

  const std::vector<double> x{1.0, 2.0}, y{2.0, 3.0};
  CHECK(ks_two_sample(x, y).statistic == doctest::Approx(0.5));

  CHECK_THROWS_AS(ks_two_sample({}, ones), std::domain_error);
}

TEST_CASE("ks_two_sample symmetry") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  std::vector<double> a(300), b(200);
  for (double& v : a) v = std::floor(dist(gen));  // heavy ties on purpose
  for (double& v : b) v = std::floor(dist(gen));
  const auto ab = ks_two_sample(a, b);
  const auto ba = ks_two_sample(b, a);
  CHECK(std::abs(ab.statistic - ba.statistic) <= 1e-15);
  CHECK(std::abs(ab.p_value - ba.p_value) <= 1e-15);
}

TEST_CASE("ks p-value against frozen reference") {
  // Two-sample asymptotic KS: lambda = D sqrt(n1 n2/(n1+n2)),
  // p = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2). For D = 0.1,
  // n1 = n2 = 1000, lambda = sqrt(5) -> p ~ 2 exp(-10) ~ 9.08e-5.
  std::vector<double> a(1000), b(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    a[i] = static_cast<double>(i);
    b[i] = static_cast<double>(i) + (i < 100 ? 10000.0 : 0.0);
  }
  const auto res = ks_two_sample(a, b);
  CHECK(res.statistic == doctest::Approx(0.1));
  const double lambda = 0.1 * std::sqrt(1000.0 * 1000.0 / 2000.0);
  double expected = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 50; ++k) {
    expected += sign * std::exp(-2.0 * k * k * lambda * lambda);
    sign = -sign;
  }
  expected *= 2.0;
  CHECK(res.p_value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("benjamini_hochberg") {
  CHECK(benjamini_hochberg(std::vector<double>{0.2}) ==
        std::vector<double>{0.2});

  const std::vector<double> p{0.01, 0.02, 0.03};
  const auto q = benjamini_hochberg(p);
  CHECK(q[0] == doctest::Approx(0.03));
  CHECK(q[1] == doctest::Approx(0.03));
  CHECK(q[2] == doctest::Approx(0.03));

  const std::vector<double> caps{1.0, 1.0, 1.0};
  CHECK(benjamini_hochberg(caps) == caps);

  CHECK_THROWS_AS(benjamini_hochberg(std::vector<double>{-0.1}),
                  std::domain_error);
  CHECK_THROWS_AS(benjamini_hochberg(std::vector<double>{1.1}),
                  std::domain_error);
}

TEST_CASE("benjamini_hochberg monotone and order preserving") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p(9);
    for (double& v : p) v = dist(gen);
    const auto q = benjamini_hochberg(p);
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(q[i] >= p[i]);
      CHECK(q[i] <= 1.0);
      if (i > 0) CHECK(q[order[i]] >= q[order[i - 1]]);
    }
  }
}

TEST_CASE("sweep smoke run: single grid point") {
  SweepConfig config;
  config.base = UrnSpec{{6, 6, 6}, 8, {0.0, 0.0, 0.0}};
  config.param = SweepConfig::Param::kOmega2;
  config.grid = {2.0};
  config.samples_per_arm = 10;
  config.tau = 1.0;
  config.seed = 3;
  const auto result = ks_sensitivity_sweep(config);
  REQUIRE(result.rows.size() == 3);
  for (const auto& row : result.rows) {
    CHECK(row.sweep_value == 2.0);
    CHECK(row.n_samples == 10);
    CHECK(row.statistic >= 0.0);
    CHECK(row.statistic <= 1.0);
    CHECK(row.p_raw >= 0.0);
    CHECK(row.p_adjusted >= row.p_raw);
    CHECK(row.p_adjusted <= 1.0);
  }
  CHECK(!result.histograms.empty());
  // Histogram mass equals the number of samples per arm and class.
  std::int64_t mass = 0;
  for (const auto& h : result.histograms) {
    if (h.class_index == 0) mass += h.freq_differentiable;
  }
  CHECK(mass == 10);
}

TEST_CASE("sweep over n applies the grid to draws") {
  SweepConfig config;
  config.base = UrnSpec{{10, 10, 10}, 0, {0.0, std::log(5.0), 0.0}};
  config.param = SweepConfig::Param::kDraws;
  config.grid = {5.0, 20.0};
  config.samples_per_arm = 50;
  config.seed = 9;
  const auto result = ks_sensitivity_sweep(config);
  CHECK(result.rows.size() == 6);
  CHECK(result.rows.front().sweep_value == 5.0);
  CHECK(result.rows.back().sweep_value == 20.0);
}

TEST_CASE("sweep rejects invalid grids") {
  SweepConfig config;
  config.base = UrnSpec{{6, 6, 6}, 8, {0.0, 0.0, 0.0}};
  config.grid = {};
  CHECK_THROWS_AS(ks_sensitivity_sweep(config), std::invalid_argument);
  config.grid = {-1.0};
  CHECK_THROWS_AS(ks_sensitivity_sweep(config), std::invalid_argument);
  config.param = SweepConfig::Param::kDraws;
  config.grid = {100.0};  // exceeds the urn total
  CHECK_THROWS_AS(ks_sensitivity_sweep(config), std::invalid_argument);
}

TEST_CASE("null calibration: exact-vs-exact rejections stay rare") {
  // Both arms drawn from the exact sampler with independent streams; the
  // corrected p < 0.05 rate over 100 repetitions must stay below 10%.
  const UrnSpec urn{{30, 30, 30}, 27, {0.0, std::log(3.0), 0.0}};
  const UrnSampler sampler(urn);
  int rejections = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Pcg32 rng_a(1000 + rep, 0), rng_b(1000 + rep, 1);
    std::vector<std::vector<double>> a(3), b(3);
    for (int s = 0; s < 500; ++s) {
      const DrawVector xa = sampler.exact(rng_a);
      const DrawVector xb = sampler.exact(rng_b);
      for (std::size_t k = 0; k < 3; ++k) {
        a[k].push_back(static_cast<double>(xa[k]));
        b[k].push_back(static_cast<double>(xb[k]));
      }
    }
    std::vector<double> p(3);
    for (std::size_t k = 0; k < 3; ++k) {
      p[k] = ks_two_sample(a[k], b[k]).p_value;
    }
    for (double q : benjamini_hochberg(p)) {
      if (q < 0.05) {
        ++rejections;
        break;
      }
    }
  }
  CHECK(rejections <= 10);
}
