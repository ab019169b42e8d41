#include "dhyper/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dhyper {

void FitConfig::validate(std::size_t num_classes) const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("FitConfig: learning rate must be > 0");
  }
  if (epochs < 0 || batch_size < 1 || anneal_steps < 1) {
    throw std::invalid_argument("FitConfig: invalid epochs/batch/anneal_steps");
  }
  if (!(tau_final > 0.0) || !(tau_init >= tau_final)) {
    throw std::invalid_argument("FitConfig: need tau_init >= tau_final > 0");
  }
  if (!init_log_weights.empty() && init_log_weights.size() != num_classes) {
    throw std::invalid_argument("FitConfig: init weight length mismatch");
  }
}

double mse_loss(const DrawVector& observed, const RelaxedDraw& sampled) {
  if (observed.size() != sampled.soft_counts.size()) {
    throw std::domain_error("mse_loss: class count mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = static_cast<double>(observed[i]) - sampled.soft_counts[i];
    loss += d * d;
  }
  return loss;
}

double anneal_temperature(std::int64_t t, const FitConfig& cfg) {
  if (t < 0) {
    throw std::domain_error("anneal_temperature: negative step");
  }
  if (t >= cfg.anneal_steps || cfg.tau_init == cfg.tau_final) {
    return cfg.tau_final;
  }
  const double rate = (std::log(cfg.tau_init) - std::log(cfg.tau_final)) /
                      static_cast<double>(cfg.anneal_steps);
  return std::max(cfg.tau_final,
                  cfg.tau_init * std::exp(-rate * static_cast<double>(t)));
}

std::vector<DrawVector> generate_dataset(const UrnSpec& urn_gt,
                                         std::int64_t count, Pcg32& rng) {
  if (count < 1) {
    throw std::invalid_argument("generate_dataset: count must be >= 1");
  }
  const UrnSampler sampler(urn_gt);
  std::vector<DrawVector> data;
  data.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    data.push_back(sampler.exact(rng));
  }
  return data;
}

std::vector<double> expected_counts(const UrnSpec& urn, std::int64_t num_draws,
                                    Pcg32& rng) {
  const UrnSampler sampler(urn);
  std::vector<double> mean(urn.num_classes(), 0.0);
  for (std::int64_t s = 0; s < num_draws; ++s) {
    const DrawVector x = sampler.exact(rng);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += static_cast<double>(x[i]);
    }
  }
  for (double& v : mean) v /= static_cast<double>(num_draws);
  return mean;
}

namespace {

double validation_loss(const UrnSampler& sampler,
                       std::span<const DrawVector> validation, Pcg32& rng) {
  if (validation.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0.0;
  for (const DrawVector& obs : validation) {
    const DrawVector x = sampler.exact(rng);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double d = static_cast<double>(obs[i] - x[i]);
      total += d * d;
    }
  }
  return total / static_cast<double>(validation.size());
}

}  // namespace

FitTrace fit_omega(std::span<const DrawVector> train,
                   std::span<const DrawVector> validation,
                   const std::vector<std::int64_t>& class_counts,
                   std::int64_t draws, const FitConfig& cfg) {
  if (train.empty()) {
    throw std::domain_error("fit_omega: empty training set");
  }
  const std::size_t c = class_counts.size();
  cfg.validate(c);
  UrnSpec urn{class_counts, draws,
              cfg.init_log_weights.empty() ? std::vector<double>(c, 0.0)
                                           : cfg.init_log_weights};
  urn.validate();
  auto check_dataset = [&](std::span<const DrawVector> data) {
    for (const DrawVector& x : data) {
      if (!in_support(urn, x)) {
        throw std::domain_error("fit_omega: datum outside the (m, n) support");
      }
    }
  };
  check_dataset(train);
  check_dataset(validation);

  Pcg32 shuffle_rng(cfg.seed, 0);
  Pcg32 noise_rng(cfg.seed, 1);
  Pcg32 val_rng(cfg.seed, 2);

  FitTrace trace;
  auto record = [&](std::int64_t step, std::int64_t epoch, double loss,
                    double tau) {
    trace.step.push_back(step);
    trace.epoch.push_back(epoch);
    trace.train_loss.push_back(loss);
    trace.tau.push_back(tau);
    trace.log_weights.push_back(urn.log_weights);
  };
  record(0, 0, std::numeric_limits<double>::quiet_NaN(),
         anneal_temperature(0, cfg));
  trace.val_loss.push_back(validation_loss(UrnSampler(urn), validation, val_rng));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  std::int64_t global_step = 0;
  for (std::int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates with the dedicated shuffle stream.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double tau = anneal_temperature(global_step, cfg);
      const UrnSampler sampler(urn);
      std::vector<double> grad(c, 0.0);
      double batch_loss = 0.0;
      for (std::size_t bi = start; bi < stop; ++bi) {
        const DrawVector& obs = train[order[bi]];
        const NoiseBundle noise = draw_noise(urn, noise_rng);
        const RelaxedDraw sample = sampler.differentiable(tau, noise);
        const SoftCountJacobian J = sampler.jacobian(tau, noise);
        batch_loss += mse_loss(obs, sample);
        for (std::size_t i = 0; i < c; ++i) {
          const double dloss =
              2.0 * (sample.soft_counts[i] - static_cast<double>(obs[i]));
          for (std::size_t j = 0; j < c; ++j) {
            grad[j] += dloss * J[i][j];
          }
        }
      }
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      double norm_sq = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        grad[j] *= inv_batch * cfg.learning_rate;
        norm_sq += grad[j] * grad[j];
      }
      const double norm = std::sqrt(norm_sq);
      const double scale =
          norm > cfg.max_update_norm ? cfg.max_update_norm / norm : 1.0;
      for (std::size_t j = 0; j < c; ++j) {
        urn.log_weights[j] -= scale * grad[j];
      }
      ++global_step;
      record(global_step, epoch, batch_loss * inv_batch, tau);
    }
    trace.val_loss.push_back(
        validation_loss(UrnSampler(urn), validation, val_rng));
  }
  return trace;
}

}  // namespace dhyper
