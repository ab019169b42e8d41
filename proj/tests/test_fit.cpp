#include "dhyper/fit.hpp"

#include <cmath>

#include "doctest.h"

using namespace dhyper;

namespace {

UrnSpec paper_urn(double w2) {
  return UrnSpec{{200, 200, 200}, 180, {0.0, std::log(w2), 0.0}};
}

}  // namespace

TEST_CASE("mse_loss") {
  RelaxedDraw sampled;
  sampled.soft_counts = {59.0, 61.0, 60.0};
  CHECK(mse_loss({60, 60, 60}, sampled) == doctest::Approx(2.0));
  sampled.soft_counts = {0.0, 0.0};
  CHECK(mse_loss({0, 0}, sampled) == doctest::Approx(0.0));
  CHECK_THROWS_AS(mse_loss({1, 2, 3}, sampled), std::domain_error);
}

TEST_CASE("mse_loss gradient matches finite differences at fixed noise") {
  const UrnSpec urn{{20, 15, 25}, 18, {0.2, -0.4, 0.9}};
  Pcg32 rng(17, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const NoiseBundle noise = draw_noise(urn, rng);
    const DrawVector observed{6, 4, 8};
    const double tau = 1.0;

    const RelaxedDraw base = sample_differentiable(urn, tau, noise);
    const SoftCountJacobian J = soft_count_jacobian(urn, tau, noise);
    // Gradient of the fully differentiable surrogate, where the last class
    // is the remainder n - sum of soft counts. The optimizer substitutes the
    // straight-through value in the last coefficient, which FD cannot see.
    double rest_base = static_cast<double>(urn.draws);
    for (std::size_t i = 0; i + 1 < 3; ++i) rest_base -= base.soft_counts[i];
    std::vector<double> grad(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
      const double value =
          i + 1 < 3 ? base.soft_counts[i] : rest_base;
      const double dloss = 2.0 * (value - static_cast<double>(observed[i]));
      for (std::size_t j = 0; j < 3; ++j) grad[j] += dloss * J[i][j];
    }

    const double step = 1e-5;
    for (std::size_t j = 0; j < 3; ++j) {
      UrnSpec hi = urn, lo = urn;
      hi.log_weights[j] += step;
      lo.log_weights[j] -= step;
      const RelaxedDraw up = sample_differentiable(hi, tau, noise);
      const RelaxedDraw dn = sample_differentiable(lo, tau, noise);
      REQUIRE(up.hard_counts == dn.hard_counts);
      // The loss seen by FD treats the remainder class like the Jacobian
      // does: through the differentiable remainder n - sum of soft counts.
      auto loss_soft = [&](const RelaxedDraw& d) {
        double rest = static_cast<double>(urn.draws);
        double loss = 0.0;
        for (std::size_t i = 0; i + 1 < 3; ++i) {
          const double diff =
              static_cast<double>(observed[i]) - d.soft_counts[i];
          loss += diff * diff;
          rest -= d.soft_counts[i];
        }
        const double diff = static_cast<double>(observed[2]) - rest;
        return loss + diff * diff;
      };
      const double fd = (loss_soft(up) - loss_soft(dn)) / (2.0 * step);
      if (std::abs(grad[j]) > 1e-6) {
        CHECK(std::abs(grad[j] - fd) / std::abs(grad[j]) < 1e-4);
      }
    }
  }
}

TEST_CASE("anneal_temperature") {
  FitConfig cfg;
  cfg.tau_init = 10.0;
  cfg.tau_final = 0.01;
  cfg.anneal_steps = 100;
  CHECK(anneal_temperature(0, cfg) == doctest::Approx(10.0));
  CHECK(anneal_temperature(100, cfg) == doctest::Approx(0.01));
  CHECK(anneal_temperature(100000, cfg) == doctest::Approx(0.01));
  // Monotone nonincreasing.
  double prev = anneal_temperature(0, cfg);
  for (std::int64_t t = 1; t <= 120; ++t) {
    const double tau = anneal_temperature(t, cfg);
    CHECK(tau <= prev + 1e-15);
    prev = tau;
  }

  FitConfig constant = cfg;
  constant.tau_init = constant.tau_final = 0.7;
  CHECK(anneal_temperature(0, constant) == doctest::Approx(0.7));
  CHECK(anneal_temperature(57, constant) == doctest::Approx(0.7));
  CHECK_THROWS_AS(anneal_temperature(-1, cfg), std::domain_error);
}

TEST_CASE("generate_dataset is deterministic per seed and in-support") {
  const UrnSpec gt = paper_urn(5.0);
  Pcg32 a(33, 0), b(33, 0);
  const auto da = generate_dataset(gt, 50, a);
  const auto db = generate_dataset(gt, 50, b);
  CHECK(da == db);
  for (const auto& x : da) {
    CHECK(in_support(gt, x));
  }
  Pcg32 c(1, 0);
  CHECK(generate_dataset(gt, 1, c).size() == 1);
}

TEST_CASE("zero epochs yields only the init row") {
  const UrnSpec gt = paper_urn(2.0);
  Pcg32 rng(5, 0);
  const auto data = generate_dataset(gt, 20, rng);
  FitConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 1;
  const auto trace =
      fit_omega(data, {}, gt.class_counts, gt.draws, cfg);
  REQUIRE(trace.step.size() == 1);
  CHECK(trace.step[0] == 0);
  CHECK(trace.log_weights[0] == std::vector<double>(3, 0.0));
}

TEST_CASE("zero-ish learning rate keeps log weights at init") {
  const UrnSpec gt = paper_urn(3.0);
  Pcg32 rng(6, 0);
  const auto data = generate_dataset(gt, 64, rng);
  FitConfig cfg;
  cfg.learning_rate = 1e-300;  // the smallest admissible stand-in for zero
  cfg.epochs = 2;
  cfg.seed = 2;
  cfg.init_log_weights = {0.5, -0.25, 0.0};
  const auto trace = fit_omega(data, {}, gt.class_counts, gt.draws, cfg);
  for (const auto& lw : trace.log_weights) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(lw[j] - cfg.init_log_weights[j]) <= 1e-290);
    }
  }
}

TEST_CASE("m and n are never mutated by the optimizer") {
  const UrnSpec gt = paper_urn(4.0);
  Pcg32 rng(7, 0);
  const auto data = generate_dataset(gt, 40, rng);
  const std::vector<std::int64_t> m_snapshot = gt.class_counts;
  FitConfig cfg;
  cfg.epochs = 1;
  const auto trace = fit_omega(data, {}, m_snapshot, gt.draws, cfg);
  CHECK(m_snapshot == gt.class_counts);
  CHECK(trace.epoch.back() == 1);
}

TEST_CASE("uniform ground truth with matching init stays flat") {
  const UrnSpec gt = paper_urn(1.0);
  Pcg32 rng(8, 0);
  const auto data = generate_dataset(gt, 400, rng);
  const std::vector<DrawVector> train(data.begin(), data.begin() + 320);
  const std::vector<DrawVector> val(data.begin() + 320, data.end());
  FitConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 3;
  const auto trace = fit_omega(train, val, gt.class_counts, gt.draws, cfg);
  // Already optimal at init: every per-epoch validation loss stays within
  // Monte Carlo noise of the first one.
  for (std::size_t e = 1; e < trace.val_loss.size(); ++e) {
    CHECK(trace.val_loss[e] < 2.0 * trace.val_loss[1] + 50.0);
  }
  // And the weights barely move relative to each other.
  const auto& final_lw = trace.final_log_weights();
  for (std::size_t j = 1; j < 3; ++j) {
    CHECK(std::abs(final_lw[j] - final_lw[0]) < 0.3);
  }
}

TEST_CASE("first-epoch updates push log w2 up when class 2 is undersampled") {
  const UrnSpec gt = paper_urn(5.0);
  Pcg32 rng(9, 0);
  const auto data = generate_dataset(gt, 256, rng);
  FitConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 4;
  const auto trace = fit_omega(data, {}, gt.class_counts, gt.draws, cfg);
  const auto& lw = trace.final_log_weights();
  CHECK(lw[1] > lw[0]);
  CHECK(lw[1] > lw[2]);
}

TEST_CASE("log weights stay finite at the spec's stress learning rate") {
  const UrnSpec gt = paper_urn(5.0);
  Pcg32 rng(10, 0);
  const auto data = generate_dataset(gt, 200, rng);
  FitConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 3;
  cfg.seed = 5;
  const auto trace = fit_omega(data, {}, gt.class_counts, gt.draws, cfg);
  for (const auto& lw : trace.log_weights) {
    for (double v : lw) CHECK(std::isfinite(v));
  }
  for (double v : trace.train_loss) {
    if (!std::isnan(v)) CHECK(std::isfinite(v));
  }
}

TEST_CASE("scale-shifted inits reach similar validation losses") {
  const UrnSpec gt = paper_urn(5.0);
  Pcg32 rng(11, 0);
  const auto data = generate_dataset(gt, 500, rng);
  const std::vector<DrawVector> train(data.begin(), data.begin() + 400);
  const std::vector<DrawVector> val(data.begin() + 400, data.end());
  FitConfig cfg;
  cfg.epochs = 6;
  cfg.seed = 6;
  const auto base = fit_omega(train, val, gt.class_counts, gt.draws, cfg);
  FitConfig shifted_cfg = cfg;
  shifted_cfg.init_log_weights = {3.0, 3.0, 3.0};
  const auto shifted =
      fit_omega(train, val, gt.class_counts, gt.draws, shifted_cfg);
  CHECK(std::abs(base.val_loss.back() - shifted.val_loss.back()) <
        0.10 * base.val_loss.back());
}

TEST_CASE("fit rejects inconsistent datasets") {
  FitConfig cfg;
  CHECK_THROWS_AS(fit_omega({}, {}, {10, 10}, 5, cfg), std::domain_error);
  const std::vector<DrawVector> bad{{3, 2}, {4, 2}};  // second sums to 6
  CHECK_THROWS_AS(fit_omega(bad, {}, {10, 10}, 5, cfg), std::domain_error);
  const std::vector<DrawVector> out_of_bounds{{11, -6}};
  CHECK_THROWS_AS(fit_omega(out_of_bounds, {}, {10, 10}, 5, cfg),
                  std::domain_error);
}
