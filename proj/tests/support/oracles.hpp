#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the update, IG or scoring code paths under test.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace plumeig::oracle {

/// Closed-form isotropic blob, written out independently of plume_field.
inline double blob(double dx, double dy, double q, double l) {
  return q * std::exp(-(dx * dx + dy * dy) / (2.0 * l * l));
}

/// Linear-space Bayes: prior * prod_r N(m_r; f_r(s), sigma^2), normalized.
inline std::vector<double> linear_bayes(const std::vector<double>& prior,
                                        const std::vector<std::vector<double>>& means,
                                        const std::vector<double>& measurements, double sigma) {
  std::vector<double> post = prior;
  for (std::size_t r = 0; r < measurements.size(); ++r) {
    double total = 0.0;
    for (std::size_t s = 0; s < post.size(); ++s) {
      const double z = (measurements[r] - means[r][s]) / sigma;
      post[s] *= std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
      total += post[s];
    }
    for (double& p : post) p /= total;
  }
  return post;
}

/// sum p log2(p / q) in linear space.
inline double kl_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double bits = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] > 0.0) bits += p[s] * std::log2(p[s] / q[s]);
  }
  return bits;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Expected IG by sampling s ~ post, m ~ N(f(s), sigma^2) and averaging
/// KL(post(.|m) || reference) computed in linear space.
inline MonteCarloEstimate monte_carlo_eig(const std::vector<double>& post, const std::vector<double>& reference,
                                          const std::vector<double>& means, double sigma, long samples,
                                          unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(post.begin(), post.end());
  std::normal_distribution<double> noise(0.0, sigma);
  const std::size_t n = post.size();
  std::vector<double> updated(n);
  double sum = 0.0, sum_sq = 0.0;
  for (long k = 0; k < samples; ++k) {
    const int s = pick(rng);
    const double m = means[s] + noise(rng);
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double z = (m - means[c]) / sigma;
      updated[c] = post[c] * std::exp(-0.5 * z * z);
      total += updated[c];
    }
    double ig = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double p = updated[c] / total;
      if (p > 0.0) ig += p * std::log2(p / reference[c]);
    }
    sum += ig;
    sum_sq += ig * ig;
  }
  const double mean = sum / samples;
  const double var = (sum_sq / samples - mean * mean) * samples / (samples - 1.0);
  return {mean, std::sqrt(var / samples)};
}

/// Random normalized weights in [lo, 1) before normalization.
inline std::vector<double> random_distribution(std::size_t n, std::mt19937_64& rng, double lo = 0.01) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  for (double& x : w) x /= total;
  return w;
}

}  // namespace plumeig::oracle
