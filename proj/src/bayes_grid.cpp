#include "plumeig/bayes_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "plumeig/errors.hpp"

namespace plumeig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void normalize_in_place(std::vector<double>& log_probs) {
  const double lse = logsumexp(log_probs);
  if (!std::isfinite(lse)) throw AllMassLost("posterior has no finite mass");
  for (double& v : log_probs) v -= lse;
}

}  // namespace

double logsumexp(std::span<const double> values) {
  double max_v = kNegInf;
  for (double v : values) max_v = std::max(max_v, v);
  if (!std::isfinite(max_v)) return max_v;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_v);
  return max_v + std::log(sum);
}

SourcePosterior::SourcePosterior(const GridSpec& grid, std::vector<double> log_probs)
    : grid_(grid), log_probs_(std::move(log_probs)) {}

SourcePosterior SourcePosterior::uniform(const GridSpec& grid) {
  grid.validate();
  const int n = grid.source_count();
  return SourcePosterior(grid, std::vector<double>(n, -std::log(static_cast<double>(n))));
}

SourcePosterior SourcePosterior::from_weights(const GridSpec& grid, std::span<const double> weights) {
  grid.validate();
  if (static_cast<int>(weights.size()) != grid.source_count()) {
    throw ConfigError("prior weights: expected " + std::to_string(grid.source_count()) + " entries, got " +
                      std::to_string(weights.size()));
  }
  std::vector<double> log_w(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
      throw ConfigError("prior weights must be finite and nonnegative");
    }
    log_w[k] = weights[k] > 0.0 ? std::log(weights[k]) : kNegInf;
  }
  return from_log_weights(grid, std::move(log_w));
}

SourcePosterior SourcePosterior::from_log_weights(const GridSpec& grid, std::vector<double> log_weights) {
  grid.validate();
  if (static_cast<int>(log_weights.size()) != grid.source_count()) {
    throw ConfigError("log weights: size does not match the source grid");
  }
  for (double v : log_weights) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw ConfigError("log weights must not be NaN or +inf");
    }
  }
  normalize_in_place(log_weights);
  return SourcePosterior(grid, std::move(log_weights));
}

double SourcePosterior::prob(int cell) const { return std::exp(log_probs_[cell]); }

std::vector<double> SourcePosterior::probabilities() const {
  std::vector<double> p(log_probs_.size());
  std::transform(log_probs_.begin(), log_probs_.end(), p.begin(), [](double v) { return std::exp(v); });
  return p;
}

double gaussian_log_density(double m, double mean, double sigma) {
  const double z = (m - mean) / sigma;
  return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
}

double log_likelihood(double m, Point loc, SourceLocation source, const PlumeParams& params) {
  return gaussian_log_density(m, concentration(loc, source, params), params.noise_sigma);
}

SourcePosterior posterior_update_with_means(const SourcePosterior& post, std::span<const double> measurements,
                                            std::span<const std::vector<double>> means, double noise_sigma) {
  std::vector<double> log_probs(post.log_probs().begin(), post.log_probs().end());
  const std::size_t n = log_probs.size();
  for (std::size_t r = 0; r < measurements.size(); ++r) {
    const std::vector<double>& f = means[r];
    bool any_above_floor = false;
    bool any_supported = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (log_probs[s] == kNegInf) continue;
      any_supported = true;
      double ll = gaussian_log_density(measurements[r], f[s], noise_sigma);
      if (ll > kLogLikelihoodFloor) {
        any_above_floor = true;
      } else {
        ll = kLogLikelihoodFloor;
      }
      log_probs[s] += ll;
    }
    if (any_supported && !any_above_floor) {
      throw AllMassLost("every source cell hit the likelihood floor; check noise_sigma against the data");
    }
  }
  return SourcePosterior::from_log_weights(post.grid(), std::move(log_probs));
}

SourcePosterior posterior_update(const SourcePosterior& post, std::span<const MeasurementRecord> records,
                                 const PlumeParams& params) {
  const GridSpec& grid = post.grid();
  const int n = grid.source_count();
  std::vector<double> measurements;
  std::vector<std::vector<double>> means;
  measurements.reserve(records.size());
  means.reserve(records.size());
  for (const MeasurementRecord& rec : records) {
    std::vector<double> f(n);
    for (int s = 0; s < n; ++s) f[s] = concentration(rec.loc, grid.source_center(s), params);
    measurements.push_back(rec.m);
    means.push_back(std::move(f));
  }
  return posterior_update_with_means(post, measurements, means, params.noise_sigma);
}

double info_gain_bits(const SourcePosterior& post, const SourcePosterior& reference) {
  if (!(post.grid() == reference.grid())) {
    throw ConfigError("info_gain_bits: posterior and reference live on different grids");
  }
  const auto lp = post.log_probs();
  const auto lq = reference.log_probs();
  double nats = 0.0;
  for (std::size_t s = 0; s < lp.size(); ++s) {
    if (lp[s] == kNegInf) continue;
    if (lq[s] == kNegInf) {
      throw UnsupportedReference("posterior has mass on cell " + std::to_string(s) +
                                 " where the reference is zero");
    }
    nats += std::exp(lp[s]) * (lp[s] - lq[s]);
  }
  return std::max(0.0, nats / std::numbers::ln2);
}

MapEstimate map_estimate(const SourcePosterior& post) {
  const auto lp = post.log_probs();
  const auto best = std::max_element(lp.begin(), lp.end());  // first maximum wins
  const int cell = static_cast<int>(best - lp.begin());
  return {cell, post.grid().source_center(cell)};
}

std::vector<int> hpd_region(const SourcePosterior& post, double mass) {
  if (!(mass > 0.0 && mass <= 1.0)) throw ConfigError("hpd_region: mass must lie in (0, 1]");
  const auto lp = post.log_probs();
  std::vector<int> order(lp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lp[a] > lp[b]; });
  // Tolerance absorbs rounding in the running sum, e.g. 95 * 0.01 < 0.95.
  constexpr double kTol = 1e-12;
  std::vector<int> region;
  double cumulative = 0.0;
  for (int cell : order) {
    region.push_back(cell);
    cumulative += std::exp(lp[cell]);
    if (cumulative + kTol >= mass) break;
  }
  std::sort(region.begin(), region.end());
  return region;
}

}  // namespace plumeig
