#include "dhyper/urn.hpp"

#include <cmath>

namespace dhyper {

void UrnSpec::validate() const {
  if (class_counts.size() < 2) {
    throw std::invalid_argument("UrnSpec: need at least two classes");
  }
  if (log_weights.size() != class_counts.size()) {
    throw std::invalid_argument("UrnSpec: weight/count length mismatch");
  }
  for (auto m : class_counts) {
    if (m < 1) throw std::invalid_argument("UrnSpec: class counts must be >= 1");
  }
  for (auto w : log_weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("UrnSpec: log weights must be finite");
  }
  if (draws < 0 || draws > total()) {
    throw std::invalid_argument("UrnSpec: draws must satisfy 0 <= n <= sum(m)");
  }
}

bool in_support(const UrnSpec& urn, const DrawVector& x) {
  if (x.size() != urn.num_classes()) return false;
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] > urn.class_counts[i]) return false;
    sum += x[i];
  }
  return sum == urn.draws;
}

MergedStep merge_classes(const UrnSpec& urn, std::size_t i,
                         std::int64_t remaining_n) {
  const std::size_t c = urn.num_classes();
  if (i + 1 >= c) {
    throw std::domain_error("merge_classes: class index must be < c - 1");
  }
  MergedStep step;
  step.m_left = urn.class_counts[i];
  step.log_w_left = urn.log_weights[i];
  std::vector<double> terms;
  terms.reserve(c - i - 1);
  std::int64_t tail = step.m_left;
  for (std::size_t j = i + 1; j < c; ++j) {
    step.m_right += urn.class_counts[j];
    tail += urn.class_counts[j];
    terms.push_back(urn.log_weights[j] +
                    std::log(static_cast<double>(urn.class_counts[j])));
  }
  if (remaining_n < 0 || remaining_n > tail) {
    throw std::domain_error("merge_classes: remaining draws out of range");
  }
  step.log_w_right =
      log_sum_exp(terms) - std::log(static_cast<double>(step.m_right));
  return step;
}

LogPmfTable::LogPmfTable(std::vector<double> logits) : logits_(std::move(logits)) {
  bool any_feasible = false;
  for (double a : logits_) {
    if (a != neg_inf) {
      any_feasible = true;
      break;
    }
  }
  if (logits_.empty() || !any_feasible) {
    throw std::domain_error("LogPmfTable: no feasible entry");
  }
}

double LogPmfTable::log_normalizer() const {
  if (!norm_valid_) {
    cached_norm_ = log_sum_exp(logits_);
    norm_valid_ = true;
  }
  return cached_norm_;
}

std::vector<double> LogPmfTable::probabilities() const {
  const double norm = log_normalizer();
  std::vector<double> p(logits_.size());
  for (std::size_t k = 0; k < logits_.size(); ++k) {
    p[k] = logits_[k] == neg_inf ? 0.0 : std::exp(logits_[k] - norm);
  }
  return p;
}

}  // namespace dhyper
