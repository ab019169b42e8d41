#include "dhyper/pmf.hpp"

#include <algorithm>
#include <cmath>

namespace dhyper {

namespace {

constexpr double kSupportGuard = 1e7;

void check_support_guard(const UrnSpec& urn) {
  double cells = 1.0;
  for (auto m : urn.class_counts) {
    cells *= static_cast<double>(m) + 1.0;
    if (cells > kSupportGuard) {
      throw CapacityError("support enumeration guard exceeded");
    }
  }
}

double unnormalized_joint(const UrnSpec& urn, const DrawVector& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += static_cast<double>(x[i]) * urn.log_weights[i] +
           log_binomial(urn.class_counts[i], x[i]);
  }
  return acc;
}

}  // namespace

std::vector<DrawVector> enumerate_support(const UrnSpec& urn) {
  urn.validate();
  check_support_guard(urn);
  const std::size_t c = urn.num_classes();
  std::vector<DrawVector> out;
  DrawVector x(c, 0);
  // Depth-first over class indices; remaining draws pinned to the last class.
  auto recurse = [&](auto&& self, std::size_t i, std::int64_t left) -> void {
    if (i + 1 == c) {
      if (left <= urn.class_counts[i]) {
        x[i] = left;
        out.push_back(x);
      }
      return;
    }
    const std::int64_t hi = std::min(urn.class_counts[i], left);
    for (std::int64_t v = 0; v <= hi; ++v) {
      x[i] = v;
      self(self, i + 1, left - v);
    }
  };
  recurse(recurse, 0, urn.draws);
  return out;
}

double central_uni_log_pmf(std::int64_t N, std::int64_t m, std::int64_t n,
                           std::int64_t x) {
  if (N < 1 || m < 0 || m > N || n < 0 || n > N) {
    throw std::domain_error("central_uni_log_pmf: invalid parameters");
  }
  if (x < 0 || x > m || x > n || n - x > N - m) {
    return neg_inf;
  }
  return log_binomial(m, x) + log_binomial(N - m, n - x) - log_binomial(N, n);
}

LogPmfTable fisher_uni_log_pmf_table(std::int64_t m_left, std::int64_t m_right,
                                     double log_w_left, double log_w_right,
                                     std::int64_t n,
                                     const LogGammaIntCache* lgamma_cache) {
  if (m_left < 1 || m_right < 1) {
    throw std::domain_error("fisher_uni_log_pmf_table: class sizes must be >= 1");
  }
  if (n < 0 || n > m_left + m_right) {
    throw std::domain_error("fisher_uni_log_pmf_table: draws out of range");
  }
  auto lg = [&](std::int64_t k) {
    return lgamma_cache ? (*lgamma_cache)(k) : log_gamma(static_cast<double>(k));
  };
  std::vector<double> logits(static_cast<std::size_t>(m_left) + 1, neg_inf);
  const std::int64_t lo = std::max<std::int64_t>(0, n - m_right);
  const std::int64_t hi = std::min(m_left, n);
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double psi = -lg(x + 1) - lg(n - x + 1) - lg(m_left - x + 1) -
                       lg(m_right - n + x + 1);
    logits[static_cast<std::size_t>(x)] =
        static_cast<double>(x) * log_w_left +
        static_cast<double>(n - x) * log_w_right + psi;
  }
  return LogPmfTable(std::move(logits));
}

double fisher_multi_log_pmf(const UrnSpec& urn, const DrawVector& x) {
  urn.validate();
  if (!in_support(urn, x)) {
    return neg_inf;
  }
  const auto support = enumerate_support(urn);
  std::vector<double> logits;
  logits.reserve(support.size());
  for (const auto& s : support) {
    logits.push_back(unnormalized_joint(urn, s));
  }
  return unnormalized_joint(urn, x) - log_sum_exp(logits);
}

double conditional_chain_log_pmf(const UrnSpec& urn, const DrawVector& x) {
  urn.validate();
  if (!in_support(urn, x)) {
    return neg_inf;
  }
  const std::size_t c = urn.num_classes();
  double acc = 0.0;
  std::int64_t remaining = urn.draws;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const MergedStep step = merge_classes(urn, i, remaining);
    const LogPmfTable table =
        fisher_uni_log_pmf_table(step.m_left, step.m_right, step.log_w_left,
                                 step.log_w_right, remaining);
    acc += table.logits()[static_cast<std::size_t>(x[i])] - table.log_normalizer();
    remaining -= x[i];
  }
  return acc;  // final class is deterministic given the prefix
}

JointPmfTable joint_pmf_table(const UrnSpec& urn) {
  urn.validate();
  JointPmfTable out;
  out.support = enumerate_support(urn);
  std::vector<double> unnorm;
  unnorm.reserve(out.support.size());
  for (const auto& s : out.support) {
    unnorm.push_back(unnormalized_joint(urn, s));
  }
  const double norm = log_sum_exp(unnorm);
  out.log_joint.reserve(out.support.size());
  out.log_chain.reserve(out.support.size());
  for (std::size_t i = 0; i < out.support.size(); ++i) {
    out.log_joint.push_back(unnorm[i] - norm);
    out.log_chain.push_back(conditional_chain_log_pmf(urn, out.support[i]));
  }
  return out;
}

}  // namespace dhyper
