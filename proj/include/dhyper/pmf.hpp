#ifndef DHYPER_PMF_HPP
#define DHYPER_PMF_HPP

#include <cstdint>
#include <vector>

#include "dhyper/urn.hpp"

namespace dhyper {

// Exact PMFs for the central and noncentral hypergeometric distributions,
// plus the brute-force joint form used as an oracle against the
// conditional-chain sampler.

/// Every x with sum(x) = n and 0 <= x_i <= m_i, in lexicographic order.
/// Guarded: throws CapacityError if prod(m_i + 1) exceeds 1e7.
std::vector<DrawVector> enumerate_support(const UrnSpec& urn);

/// ln P(X = x) for the central univariate hypergeometric distribution
/// (N total, m marked, n drawn). Infeasible x yields -inf.
double central_uni_log_pmf(std::int64_t N, std::int64_t m, std::int64_t n,
                           std::int64_t x);

/// Unnormalized conditional table for a two-class noncentral urn:
/// alpha[x] = x log w_L + (n - x) log w_R + psi_F(x), psi_F built from
/// four log-Gamma terms. `lgamma_cache`, when non-null, must cover integer
/// arguments up to m_L + m_R + 2.
LogPmfTable fisher_uni_log_pmf_table(std::int64_t m_left, std::int64_t m_right,
                                     double log_w_left, double log_w_right,
                                     std::int64_t n,
                                     const LogGammaIntCache* lgamma_cache = nullptr);

/// Exact normalized joint log-PMF, with the normalizer obtained by
/// log-sum-exp over the full enumerated support. Subject to the same
/// capacity guard as enumerate_support. Infeasible x yields -inf.
double fisher_multi_log_pmf(const UrnSpec& urn, const DrawVector& x);

/// Normalized log-PMF of the distribution the sequential sampler actually
/// realizes: the product of two-class conditionals with merged right-hand
/// parameters. Exact for uniform weights and for c = 2; carries the merge
/// bias otherwise.
double conditional_chain_log_pmf(const UrnSpec& urn, const DrawVector& x);

/// Joint table over the whole support (support point i pairs with
/// log_probs[i]); shares one normalizer computation across all points.
struct JointPmfTable {
  std::vector<DrawVector> support;
  std::vector<double> log_joint;  // fisher_multi_log_pmf values
  std::vector<double> log_chain;  // conditional_chain_log_pmf values
};

JointPmfTable joint_pmf_table(const UrnSpec& urn);

}  // namespace dhyper

#endif  // DHYPER_PMF_HPP
