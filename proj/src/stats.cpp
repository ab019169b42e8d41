#include "dhyper/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dhyper/sampler.hpp"

namespace dhyper {

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::domain_error("ks_two_sample: empty sample");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < sa.size() || ib < sb.size()) {
    // Next distinct pooled point; consume all ties on both sides so the
    // CDFs are evaluated at their right limits.
    const double t = (ib >= sb.size() || (ia < sa.size() && sa[ia] <= sb[ib]))
                         ? sa[ia]
                         : sb[ib];
    while (ia < sa.size() && sa[ia] == t) ++ia;
    while (ib < sb.size() && sb[ib] == t) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }

  KsResult res;
  res.statistic = d;
  res.n_a = sa.size();
  res.n_b = sb.size();
  if (d == 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double lambda = d * std::sqrt(na * nb / (na + nb));
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  res.p_value = std::clamp(2.0 * p, 0.0, 1.0);
  return res;
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
  const std::size_t m = p.size();
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::domain_error("benjamini_hochberg: p-values must be in [0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return p[l] < p[r]; });
  std::vector<double> q(m);
  double running_min = 1.0;
  for (std::size_t rank = m; rank-- > 0;) {
    const double scaled = p[order[rank]] * static_cast<double>(m) /
                          static_cast<double>(rank + 1);
    running_min = std::min(running_min, scaled);
    // Rounding in scaled can dip a few ulps below the raw p-value.
    q[order[rank]] = std::max(running_min, p[order[rank]]);
  }
  return q;
}

std::string to_string(SweepConfig::Param param) {
  switch (param) {
    case SweepConfig::Param::kOmega2: return "omega2";
    case SweepConfig::Param::kDraws: return "n";
    case SweepConfig::Param::kM2: return "m2";
  }
  return "?";
}

namespace {

UrnSpec apply_sweep_value(const SweepConfig& config, double value) {
  UrnSpec urn = config.base;
  switch (config.param) {
    case SweepConfig::Param::kOmega2:
      if (urn.num_classes() < 2 || !(value > 0.0)) {
        throw std::invalid_argument("sweep: omega2 grid values must be > 0");
      }
      urn.log_weights[1] = std::log(value);
      break;
    case SweepConfig::Param::kDraws:
      urn.draws = static_cast<std::int64_t>(value);
      break;
    case SweepConfig::Param::kM2:
      if (urn.num_classes() < 2) {
        throw std::invalid_argument("sweep: base urn needs a second class");
      }
      urn.class_counts[1] = static_cast<std::int64_t>(value);
      break;
  }
  urn.validate();
  return urn;
}

}  // namespace

SweepResult ks_sensitivity_sweep(const SweepConfig& config) {
  if (config.grid.empty() || config.samples_per_arm < 1 || !(config.tau > 0.0)) {
    throw std::invalid_argument("sweep: invalid grid configuration");
  }
  config.base.validate();

  SweepResult result;
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    const double value = config.grid[gi];
    const UrnSpec urn = apply_sweep_value(config, value);
    const std::size_t c = urn.num_classes();
    const UrnSampler sampler(urn);

    // Independent streams per arm, derived from the root seed by index.
    Pcg32 rng_diff(config.seed, 2 * gi);
    Pcg32 rng_exact(config.seed, 2 * gi + 1);

    std::vector<std::vector<double>> marg_diff(c), marg_exact(c);
    std::vector<std::vector<std::int64_t>> hist_diff(c), hist_exact(c);
    for (std::size_t k = 0; k < c; ++k) {
      marg_diff[k].reserve(config.samples_per_arm);
      marg_exact[k].reserve(config.samples_per_arm);
      hist_diff[k].assign(static_cast<std::size_t>(urn.class_counts[k]) + 1, 0);
      hist_exact[k].assign(static_cast<std::size_t>(urn.class_counts[k]) + 1, 0);
    }
    for (std::int64_t s = 0; s < config.samples_per_arm; ++s) {
      const RelaxedDraw draw = sampler.differentiable(config.tau, rng_diff);
      const DrawVector ref = sampler.exact(rng_exact);
      for (std::size_t k = 0; k < c; ++k) {
        marg_diff[k].push_back(static_cast<double>(draw.hard_counts[k]));
        marg_exact[k].push_back(static_cast<double>(ref[k]));
        ++hist_diff[k][static_cast<std::size_t>(draw.hard_counts[k])];
        ++hist_exact[k][static_cast<std::size_t>(ref[k])];
      }
    }

    std::vector<KsResult> ks(c);
    std::vector<double> p_raw(c);
    for (std::size_t k = 0; k < c; ++k) {
      ks[k] = ks_two_sample(marg_diff[k], marg_exact[k]);
      p_raw[k] = ks[k].p_value;
    }
    const std::vector<double> p_adj = benjamini_hochberg(p_raw);

    for (std::size_t k = 0; k < c; ++k) {
      result.rows.push_back({value, k, ks[k].statistic, p_raw[k], p_adj[k],
                             config.samples_per_arm, config.seed});
      for (std::size_t v = 0; v < hist_diff[k].size(); ++v) {
        if (hist_diff[k][v] == 0 && hist_exact[k][v] == 0) continue;
        result.histograms.push_back({value, k, static_cast<std::int64_t>(v),
                                     hist_diff[k][v], hist_exact[k][v]});
      }
    }
  }
  return result;
}

}  // namespace dhyper
