#ifndef DHYPER_FIT_HPP
#define DHYPER_FIT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dhyper/rng.hpp"
#include "dhyper/sampler.hpp"
#include "dhyper/urn.hpp"

namespace dhyper {

struct FitConfig {
  double learning_rate = 1e-4;
  std::int64_t epochs = 10;
  std::int64_t batch_size = 32;
  double tau_init = 2.0;
  double tau_final = 0.5;
  std::int64_t anneal_steps = 150;
  std::uint64_t seed = 0;
  std::vector<double> init_log_weights;  // empty -> all zeros
  // Plain SGD can spike when a near-tie meets a small temperature; updates
  // larger than this norm are rescaled. Large enough to be inactive in
  // ordinary runs.
  double max_update_norm = 10.0;

  void validate(std::size_t num_classes) const;
};

/// Optimization history. Row 0 is the initial state (step 0, loss NaN);
/// rows 1.. hold one entry per SGD step. Validation losses are per epoch,
/// entry 0 evaluated before training.
struct FitTrace {
  std::vector<std::int64_t> step;
  std::vector<std::int64_t> epoch;
  std::vector<double> train_loss;
  std::vector<double> tau;
  std::vector<std::vector<double>> log_weights;
  std::vector<double> val_loss;

  const std::vector<double>& final_log_weights() const { return log_weights.back(); }
};

/// Squared-count loss sum_i (observed_i - soft_count_i)^2; soft counts keep
/// it differentiable in log w at fixed noise.
double mse_loss(const DrawVector& observed, const RelaxedDraw& sampled);

/// Exponential schedule tau_t = tau_init * exp(-r t) with
/// r = (ln tau_init - ln tau_final) / anneal_steps, floored at tau_final.
double anneal_temperature(std::int64_t t, const FitConfig& cfg);

/// `count` i.i.d. exact draws from the ground-truth urn.
std::vector<DrawVector> generate_dataset(const UrnSpec& urn_gt,
                                         std::int64_t count, Pcg32& rng);

/// SGD on log w: per step, fresh noise per minibatch element, one
/// differentiable sample each (L = 1), loss against the observed vector,
/// update by the batch-averaged gradient. Only log w is learned; m and n
/// stay fixed. Validation uses hard counts from exact draws.
FitTrace fit_omega(std::span<const DrawVector> train,
                   std::span<const DrawVector> validation,
                   const std::vector<std::int64_t>& class_counts,
                   std::int64_t draws, const FitConfig& cfg);

/// Per-class mean hard counts over `num_draws` exact samples.
std::vector<double> expected_counts(const UrnSpec& urn, std::int64_t num_draws,
                                    Pcg32& rng);

}  // namespace dhyper

#endif  // DHYPER_FIT_HPP
