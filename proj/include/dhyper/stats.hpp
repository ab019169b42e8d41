#ifndef DHYPER_STATS_HPP
#define DHYPER_STATS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dhyper/urn.hpp"

namespace dhyper {

struct KsResult {
  double statistic = 0.0;  // D in [0, 1]
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Two-sided two-sample Kolmogorov-Smirnov test. D is the sup-norm gap
/// between the empirical CDFs evaluated at the pooled sample points (both
/// one-sided gaps checked at each distinct point, which makes D well
/// defined on tied/discrete data). The p-value uses the asymptotic
/// Kolmogorov series, truncated when terms drop below 1e-12.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Benjamini-Hochberg step-up adjustment; returns q-values in the original
/// input order, capped at 1.
std::vector<double> benjamini_hochberg(std::span<const double> p);

/// One KS sensitivity sweep per the validation protocol: vary exactly one
/// of w2, n, m2 over a grid, and at every grid point compare per-class
/// marginals of the differentiable sampler's hard counts against the exact
/// sampler, BH-correcting across the c per-class tests.
struct SweepConfig {
  enum class Param { kOmega2, kDraws, kM2 };
  UrnSpec base;  // c >= 2; the swept field is overwritten per grid point
  Param param = Param::kOmega2;
  std::vector<double> grid;
  std::int64_t samples_per_arm = 20000;
  double tau = 1.0;
  std::uint64_t seed = 0;
};

struct SweepRow {
  double sweep_value = 0.0;
  std::size_t class_index = 0;
  double statistic = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct SweepHistogramRow {
  double sweep_value = 0.0;
  std::size_t class_index = 0;
  std::int64_t count_value = 0;
  std::int64_t freq_differentiable = 0;
  std::int64_t freq_exact = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid-major, class-minor
  std::vector<SweepHistogramRow> histograms;
};

std::string to_string(SweepConfig::Param param);

SweepResult ks_sensitivity_sweep(const SweepConfig& config);

}  // namespace dhyper

#endif  // DHYPER_STATS_HPP
