#include "dhyper/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dhyper {

namespace {

// Lanczos approximation, g = 607/128, N = 15 (Godfrey's coefficients,
// computed at high precision; the same set used by GSL and Boost.Math).
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosCoeff[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};
const double kHalfLogTwoPi = 0.5 * std::log(2.0 * 3.14159265358979323846);

}  // namespace

double log_gamma(double z) {
  if (!(z > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive");
  }
  double sum = kLanczosCoeff[0];
  for (int k = 1; k < 15; ++k) {
    sum += kLanczosCoeff[k] / (z - 1.0 + k);
  }
  const double t = z + kLanczosG - 0.5;
  return kHalfLogTwoPi + (z - 0.5) * std::log(t) - t + std::log(sum);
}

double log_binomial(std::int64_t m, std::int64_t k) {
  if (m < 0 || k < 0 || k > m) {
    throw std::domain_error("log_binomial: need 0 <= k <= m");
  }
  // Grouped so that swapping k and m-k yields the bit-identical result.
  return log_gamma(static_cast<double>(m) + 1.0) -
         (log_gamma(static_cast<double>(k) + 1.0) +
          log_gamma(static_cast<double>(m - k) + 1.0));
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) {
    throw std::domain_error("log_sum_exp: empty input");
  }
  const double vmax = *std::max_element(v.begin(), v.end());
  if (vmax == neg_inf) {
    return neg_inf;
  }
  double acc = 0.0;
  for (double x : v) {
    acc += std::exp(x - vmax);
  }
  return vmax + std::log(acc);
}

std::vector<double> softmax_tempered(std::span<const double> v, double tau) {
  if (v.empty()) {
    throw std::domain_error("softmax_tempered: empty input");
  }
  if (!(tau > 0.0)) {
    throw std::domain_error("softmax_tempered: temperature must be positive");
  }
  const double vmax = *std::max_element(v.begin(), v.end());
  if (vmax == neg_inf) {
    throw std::domain_error("softmax_tempered: all entries are -inf");
  }
  std::vector<double> p(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    p[i] = v[i] == neg_inf ? 0.0 : std::exp((v[i] - vmax) / tau);
    total += p[i];
  }
  for (double& x : p) {
    x /= total;
  }
  return p;
}

LogGammaIntCache::LogGammaIntCache(std::int64_t max_arg) {
  table_.resize(static_cast<std::size_t>(std::max<std::int64_t>(max_arg, 1)) + 1);
  table_[0] = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < table_.size(); ++k) {
    table_[k] = log_gamma(static_cast<double>(k));
  }
}

}  // namespace dhyper
