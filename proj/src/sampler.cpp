#include "dhyper/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace dhyper {

namespace {
constexpr double kUniformEps = 1e-12;
}

std::vector<double> sample_gumbel(Pcg32& rng, std::size_t len) {
  if (len == 0) {
    throw std::domain_error("sample_gumbel: length must be >= 1");
  }
  std::vector<double> g(len);
  for (double& v : g) {
    const double u =
        std::clamp(rng.next_double(), kUniformEps, 1.0 - kUniformEps);
    v = -std::log(-std::log(u));
  }
  return g;
}

NoiseBundle draw_noise(const UrnSpec& urn, Pcg32& rng) {
  NoiseBundle noise;
  noise.gumbel.reserve(urn.num_classes());
  for (auto m : urn.class_counts) {
    noise.gumbel.push_back(sample_gumbel(rng, static_cast<std::size_t>(m) + 1));
  }
  return noise;
}

RelaxResult relax_and_select(const LogPmfTable& table, std::span<const double> g,
                             double tau) {
  if (g.size() != table.size()) {
    throw std::domain_error("relax_and_select: noise length mismatch");
  }
  RelaxResult out;
  out.perturbed_logits.resize(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    out.perturbed_logits[k] =
        table.feasible(k) ? table.logits()[k] + g[k] : neg_inf;
  }
  out.soft_onehot = softmax_tempered(out.perturbed_logits, tau);
  out.hard_index = static_cast<std::int64_t>(
      std::max_element(out.perturbed_logits.begin(), out.perturbed_logits.end()) -
      out.perturbed_logits.begin());
  return out;
}

UrnSampler::UrnSampler(UrnSpec urn)
    : urn_(std::move(urn)), lgamma_((urn_.validate(), urn_.total() + 2)) {
  const std::size_t c = urn_.num_classes();
  merges_.reserve(c - 1);
  right_shares_.reserve(c - 1);
  for (std::size_t i = 0; i + 1 < c; ++i) {
    merges_.push_back(merge_classes(urn_, i, 0));
    // Softmax shares of the merged right-hand weight: d log w_R / d log w_j.
    std::vector<double> share(c, 0.0);
    const double denom = merges_[i].log_w_right +
                         std::log(static_cast<double>(merges_[i].m_right));
    for (std::size_t j = i + 1; j < c; ++j) {
      share[j] = std::exp(urn_.log_weights[j] +
                          std::log(static_cast<double>(urn_.class_counts[j])) -
                          denom);
    }
    right_shares_.push_back(std::move(share));
  }
}

LogPmfTable UrnSampler::step_table(std::size_t i, std::int64_t remaining) const {
  const MergedStep& step = merges_[i];
  return fisher_uni_log_pmf_table(step.m_left, step.m_right, step.log_w_left,
                                  step.log_w_right, remaining, &lgamma_);
}

RelaxedDraw UrnSampler::differentiable(double tau,
                                       const NoiseBundle& noise) const {
  const std::size_t c = urn_.num_classes();
  if (noise.gumbel.size() != c) {
    throw std::domain_error("sample_differentiable: noise bundle size mismatch");
  }
  RelaxedDraw draw;
  draw.hard_counts.resize(c);
  draw.soft_counts.resize(c);
  draw.soft_onehots.resize(c);
  draw.perturbed_logits.resize(c);
  draw.noise = noise;

  std::int64_t remaining = urn_.draws;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const LogPmfTable table = step_table(i, remaining);
    RelaxResult step = relax_and_select(table, noise.gumbel[i], tau);
    double soft = 0.0;
    for (std::size_t k = 0; k < step.soft_onehot.size(); ++k) {
      soft += static_cast<double>(k) * step.soft_onehot[k];
    }
    draw.hard_counts[i] = step.hard_index;
    draw.soft_counts[i] = soft;
    draw.soft_onehots[i] = std::move(step.soft_onehot);
    draw.perturbed_logits[i] = std::move(step.perturbed_logits);
    remaining -= step.hard_index;  // straight-through value
  }
  // Remainder class: deterministic, degenerate one-hot.
  const std::size_t last = c - 1;
  draw.hard_counts[last] = remaining;
  draw.soft_counts[last] = static_cast<double>(remaining);
  draw.soft_onehots[last].assign(
      static_cast<std::size_t>(urn_.class_counts[last]) + 1, 0.0);
  draw.soft_onehots[last][static_cast<std::size_t>(remaining)] = 1.0;
  draw.perturbed_logits[last].assign(
      static_cast<std::size_t>(urn_.class_counts[last]) + 1, neg_inf);
  draw.perturbed_logits[last][static_cast<std::size_t>(remaining)] = 0.0;
  return draw;
}

RelaxedDraw UrnSampler::differentiable(double tau, Pcg32& rng) const {
  return differentiable(tau, draw_noise(urn_, rng));
}

DrawVector UrnSampler::exact(Pcg32& rng) const {
  const std::size_t c = urn_.num_classes();
  DrawVector x(c);
  std::int64_t remaining = urn_.draws;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const LogPmfTable table = step_table(i, remaining);
    const std::vector<double> p = table.probabilities();
    const double u = rng.next_double();
    double cdf = 0.0;
    std::int64_t pick = -1;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] == 0.0) continue;
      cdf += p[k];
      pick = static_cast<std::int64_t>(k);
      if (u < cdf) break;
    }
    x[i] = pick;
    remaining -= pick;
  }
  x[c - 1] = remaining;
  return x;
}

SoftCountJacobian UrnSampler::jacobian(double tau,
                                       const NoiseBundle& noise) const {
  const std::size_t c = urn_.num_classes();
  SoftCountJacobian J(c, std::vector<double>(c, 0.0));
  std::int64_t remaining = urn_.draws;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const LogPmfTable table = step_table(i, remaining);
    const RelaxResult step = relax_and_select(table, noise.gumbel[i], tau);
    // With the hard path held fixed, alpha_k depends on log w only through
    // k log w_L + (remaining - k) log w_R, so the softmax derivative
    // collapses to a variance term:
    //   d soft_i / d log w_j = Var_p(k) / tau * (delta_ij - share_i[j]).
    double mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < step.soft_onehot.size(); ++k) {
      mean += static_cast<double>(k) * step.soft_onehot[k];
      second += static_cast<double>(k) * static_cast<double>(k) *
                step.soft_onehot[k];
    }
    const double variance = second - mean * mean;
    J[i][i] = variance / tau;
    for (std::size_t j = i + 1; j < c; ++j) {
      J[i][j] = -variance / tau * right_shares_[i][j];
    }
    remaining -= step.hard_index;
  }
  // Remainder row from the sum constraint sum(x) = n.
  for (std::size_t j = 0; j < c; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i + 1 < c; ++i) col += J[i][j];
    J[c - 1][j] = -col;
  }
  return J;
}

RelaxedDraw sample_differentiable(const UrnSpec& urn, double tau,
                                  const NoiseBundle& noise) {
  return UrnSampler(urn).differentiable(tau, noise);
}

RelaxedDraw sample_differentiable(const UrnSpec& urn, double tau, Pcg32& rng) {
  return UrnSampler(urn).differentiable(tau, rng);
}

DrawVector sample_exact(const UrnSpec& urn, Pcg32& rng) {
  return UrnSampler(urn).exact(rng);
}

SoftCountJacobian soft_count_jacobian(const UrnSpec& urn, double tau,
                                      const NoiseBundle& noise) {
  return UrnSampler(urn).jacobian(tau, noise);
}

}  // namespace dhyper
