#ifndef DHYPER_NUMERICS_HPP
#define DHYPER_NUMERICS_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

// Log-domain scalar kernels shared by the PMF and sampling code. All
// probability mass is carried around as natural logarithms; conversion to
// linear scale happens only at API boundaries.
namespace dhyper {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// ln Gamma(z) for z > 0 via the Lanczos approximation (g = 607/128, 15
/// terms, Godfrey's coefficients). Relative error is ~1e-14 over the
/// supported range. Throws std::domain_error for z <= 0.
double log_gamma(double z);

/// ln C(m, k) computed as lgamma(m+1) - lgamma(k+1) - lgamma(m-k+1).
/// Requires 0 <= k <= m.
double log_binomial(std::int64_t m, std::int64_t k);

/// ln sum_i exp(v_i) with max-subtraction. -inf entries contribute zero
/// mass; the result is -inf only if every entry is -inf. Throws on empty
/// input.
double log_sum_exp(std::span<const double> v);

/// Tempered softmax p_k = exp(v_k / tau) / sum_j exp(v_j / tau).
/// -inf entries map to exactly zero. Translation-invariant and, for the
/// argmax, temperature-invariant. Throws if tau <= 0 or v is empty.
std::vector<double> softmax_tempered(std::span<const double> v, double tau);

/// Cache of ln Gamma(k) at integer arguments k = 0..max_arg, so the hot
/// sampling loops avoid recomputing the Lanczos series. Index 0 is +inf
/// (pole); callers never hit it because all PMF arguments are >= 1.
class LogGammaIntCache {
 public:
  explicit LogGammaIntCache(std::int64_t max_arg);
  double operator()(std::int64_t k) const { return table_[static_cast<std::size_t>(k)]; }
  std::int64_t max_arg() const { return static_cast<std::int64_t>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

}  // namespace dhyper

#endif  // DHYPER_NUMERICS_HPP
