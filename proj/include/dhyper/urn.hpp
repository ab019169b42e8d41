#ifndef DHYPER_URN_HPP
#define DHYPER_URN_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dhyper/numerics.hpp"

namespace dhyper {

/// One draw outcome: per-class counts x with sum(x) = n, 0 <= x_i <= m_i.
using DrawVector = std::vector<std::int64_t>;

/// Parameters of a multivariate noncentral urn: per-class totals m, the
/// number of draws n, and per-class log importance weights.
struct UrnSpec {
  std::vector<std::int64_t> class_counts;  // m, all >= 1
  std::int64_t draws = 0;                  // n
  std::vector<double> log_weights;         // log omega, finite

  std::size_t num_classes() const { return class_counts.size(); }

  std::int64_t total() const {
    std::int64_t n = 0;
    for (auto m : class_counts) n += m;
    return n;
  }

  /// Throws std::invalid_argument if the spec is malformed (fewer than two
  /// classes, m_i < 1, n out of range, non-finite weights, size mismatch).
  void validate() const;
};

bool in_support(const UrnSpec& urn, const DrawVector& x);

/// Unnormalized class-conditional log-weights over candidate counts
/// x_L in {0..m_L}. Infeasible counts (x_L > n or n - x_L > m_R) are held
/// at exactly -inf so the table always has length m_L + 1 and index equals
/// count. The normalizer is computed lazily and cached; the unnormalized
/// logits are the canonical stored form.
class LogPmfTable {
 public:
  explicit LogPmfTable(std::vector<double> logits);

  const std::vector<double>& logits() const { return logits_; }
  std::size_t size() const { return logits_.size(); }
  bool feasible(std::size_t k) const { return logits_[k] != neg_inf; }

  /// ln sum_k exp(logits_k). Cached after the first call; recomputation by
  /// a concurrent caller is benign (it produces the identical value).
  double log_normalizer() const;

  /// Normalized probabilities (linear scale, infeasible entries exactly 0).
  std::vector<double> probabilities() const;

 private:
  std::vector<double> logits_;
  mutable double cached_norm_;
  mutable bool norm_valid_ = false;
};

/// Two-class view of the urn at chain step i: class i on the left, classes
/// i+1..c-1 merged on the right with log w_R the count-weighted mean of the
/// right-hand weights, computed in log domain.
struct MergedStep {
  std::int64_t m_left = 0;
  std::int64_t m_right = 0;
  double log_w_left = 0.0;
  double log_w_right = 0.0;
};

/// Requires i < c - 1 and 0 <= remaining_n <= sum of m_j for j >= i.
MergedStep merge_classes(const UrnSpec& urn, std::size_t i,
                         std::int64_t remaining_n);

/// Raised when an operation would need to enumerate a support larger than
/// its guard allows.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dhyper

#endif  // DHYPER_URN_HPP
