#ifndef DHYPER_SAMPLER_HPP
#define DHYPER_SAMPLER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dhyper/pmf.hpp"
#include "dhyper/rng.hpp"
#include "dhyper/urn.hpp"

namespace dhyper {

/// Per-class standard Gumbel noise, entry i of length m_i + 1. Fixing a
/// bundle fixes the whole sampling pass, which is what makes the draw
/// reparameterizable.
struct NoiseBundle {
  std::vector<std::vector<double>> gumbel;
};

/// One differentiable sampling pass: hard counts (always a valid
/// DrawVector), their soft relaxations, and the per-class one-hots and
/// perturbed logits that produced them. The final class is the forced
/// remainder and carries a degenerate one-hot.
struct RelaxedDraw {
  DrawVector hard_counts;
  std::vector<double> soft_counts;
  std::vector<std::vector<double>> soft_onehots;
  std::vector<std::vector<double>> perturbed_logits;
  NoiseBundle noise;
};

struct RelaxResult {
  std::vector<double> soft_onehot;
  std::vector<double> perturbed_logits;
  std::int64_t hard_index = 0;
};

/// J[i][j] = d soft_count_i / d log w_j at fixed noise, holding the hard
/// straight-through path fixed. Row c-1 is the negated column sum of the
/// other rows (the remainder class is pinned by sum(x) = n).
using SoftCountJacobian = std::vector<std::vector<double>>;

/// `len` i.i.d. standard Gumbel draws, -ln(-ln u) with u clamped away from
/// the endpoints by 1e-12.
std::vector<double> sample_gumbel(Pcg32& rng, std::size_t len);

NoiseBundle draw_noise(const UrnSpec& urn, Pcg32& rng);

/// Gumbel-Softmax step on one conditional table: perturb the feasible
/// logits with g, take the tempered softmax and the argmax. The argmax
/// index does not depend on tau.
RelaxResult relax_and_select(const LogPmfTable& table, std::span<const double> g,
                             double tau);

/// Bound urn sampler; precomputes the per-step merged parameters and the
/// integer log-Gamma table so repeated draws stay cheap.
class UrnSampler {
 public:
  explicit UrnSampler(UrnSpec urn);

  const UrnSpec& urn() const { return urn_; }

  RelaxedDraw differentiable(double tau, const NoiseBundle& noise) const;
  RelaxedDraw differentiable(double tau, Pcg32& rng) const;

  /// Exact (non-relaxed) draw from the same conditional chain via inverse
  /// CDF per step; distributed exactly as conditional_chain_log_pmf.
  DrawVector exact(Pcg32& rng) const;

  SoftCountJacobian jacobian(double tau, const NoiseBundle& noise) const;

 private:
  LogPmfTable step_table(std::size_t i, std::int64_t remaining) const;

  UrnSpec urn_;
  std::vector<MergedStep> merges_;                 // one per step 0..c-2
  std::vector<std::vector<double>> right_shares_;  // d log w_R_i / d log w_j
  LogGammaIntCache lgamma_;
};

// Convenience one-shot wrappers over UrnSampler.
RelaxedDraw sample_differentiable(const UrnSpec& urn, double tau,
                                  const NoiseBundle& noise);
RelaxedDraw sample_differentiable(const UrnSpec& urn, double tau, Pcg32& rng);
DrawVector sample_exact(const UrnSpec& urn, Pcg32& rng);
SoftCountJacobian soft_count_jacobian(const UrnSpec& urn, double tau,
                                      const NoiseBundle& noise);

}  // namespace dhyper

#endif  // DHYPER_SAMPLER_HPP
