#pragma once

#include <span>
#include <vector>

#include "plumeig/geometry.hpp"
#include "plumeig/plume_field.hpp"

namespace plumeig {

/// Per-cell log-likelihood floor applied before normalization.
inline constexpr double kLogLikelihoodFloor = -700.0;

/// ln(sum(exp(values))) accumulated in index order. Returns -inf for an
/// empty or all -inf input.
double logsumexp(std::span<const double> values);

/// Belief over the I x J source grid, held as natural-log probabilities that
/// always logsumexp to zero. Cells may be -inf only where a prior assigned
/// them zero probability.
class SourcePosterior {
 public:
  static SourcePosterior uniform(const GridSpec& grid);
  /// Nonnegative weights, one per source cell; normalized here.
  static SourcePosterior from_weights(const GridSpec& grid, std::span<const double> weights);
  /// Unnormalized log weights; normalized here.
  static SourcePosterior from_log_weights(const GridSpec& grid, std::vector<double> log_weights);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> log_probs() const { return log_probs_; }
  int size() const { return static_cast<int>(log_probs_.size()); }
  double prob(int cell) const;
  std::vector<double> probabilities() const;

  friend bool operator==(const SourcePosterior&, const SourcePosterior&) = default;

 private:
  SourcePosterior(const GridSpec& grid, std::vector<double> log_probs);

  GridSpec grid_;
  std::vector<double> log_probs_;
};

struct MeasurementRecord {
  Point loc;
  double m = 0.0;
  int t = 0;
  int agent_id = 0;
};

/// ln N(m; mean, sigma^2).
double gaussian_log_density(double m, double mean, double sigma);

double log_likelihood(double m, Point loc, SourceLocation source, const PlumeParams& params);

inline double log_likelihood(double m, Point loc, int source_cell, const GridSpec& grid,
                             const PlumeParams& params) {
  return log_likelihood(m, loc, grid.source_center(source_cell), params);
}

/// Bayes step in log space. Each record contributes its per-cell
/// log-likelihood, floored at kLogLikelihoodFloor; throws AllMassLost when a
/// record drives every supported cell onto the floor.
SourcePosterior posterior_update(const SourcePosterior& post, std::span<const MeasurementRecord> records,
                                 const PlumeParams& params);

/// Same update with the per-record, per-cell mean concentrations already
/// known: means[r][cell] = f(records[r].loc, source cell).
SourcePosterior posterior_update_with_means(const SourcePosterior& post, std::span<const double> measurements,
                                            std::span<const std::vector<double>> means, double noise_sigma);

/// KL(post || reference) in bits.
double info_gain_bits(const SourcePosterior& post, const SourcePosterior& reference);

struct MapEstimate {
  int cell = 0;
  Point location;
};

/// Argmax cell, ties to the lowest index.
MapEstimate map_estimate(const SourcePosterior& post);

/// Smallest greedy set (descending probability, ties by index) reaching
/// `mass`; returned in ascending index order.
std::vector<int> hpd_region(const SourcePosterior& post, double mass);

}  // namespace plumeig
