#pragma once

#include <string_view>
#include <vector>

#include "plumeig/bayes_grid.hpp"
#include "plumeig/geometry.hpp"
#include "plumeig/plume_field.hpp"

namespace plumeig {

/// C(from, to) = overhead + quad_coeff * |to - from|^2.
struct CostModel {
  double overhead = 1.0;
  double quad_coeff = 0.01;

  void validate() const;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

enum class PlannerTier { Exact, ExpectedMeasurement, SnrFft };

std::string_view to_string(PlannerTier tier);
/// Accepts "exact", "expected-measurement", "snr-fft"; throws ConfigError otherwise.
PlannerTier parse_tier(std::string_view text);

/// Per-candidate score over the measurement grid, in bits (or bit proxies
/// for the SNR tier). Row-major like the grid.
struct ScoreMap {
  PlannerTier tier = PlannerTier::SnrFft;
  GridSpec grid;
  std::vector<double> values;
};

struct QuadratureSpec {
  int node_count = 16;
};

/// Gauss-Hermite rule for weight exp(-x^2) with weights rescaled to sum to 1,
/// so that E[g(mu + sqrt(2) sigma X)] ~= sum_k w_k g(mu + sqrt(2) sigma x_k).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int node_count);

double movement_cost(Point from, Point to, const CostModel& cm);

/// Expected information gain (bits, against `reference`) of measuring at
/// `candidate`, marginalizing the measurement over the posterior predictive
/// Gaussian mixture with per-component Gauss-Hermite quadrature.
double eig_exact(const SourcePosterior& post, const SourcePosterior& reference, Point candidate,
                 const PlumeParams& params, const QuadratureSpec& quad);

/// Posterior-mean measurement sum_s f(candidate, s) p(s).
double expected_measurement(const SourcePosterior& post, Point candidate, const PlumeParams& params);

/// IG (bits, against `reference`) of the single hypothetical measurement
/// equal to the posterior-mean measurement.
double eig_at_expected_measurement(const SourcePosterior& post, const SourcePosterior& reference,
                                   Point candidate, const PlumeParams& params);

/// sum_s p(s) f(candidate, s)^2 / (2 sigma^2), converted to bits.
double snr_score_bruteforce(const SourcePosterior& post, Point candidate, const PlumeParams& params);

/// The same score for every measurement cell at once, via one zero-padded
/// FFT convolution of the posterior with the squared-SNR kernel.
ScoreMap snr_score_map_fft(const SourcePosterior& post, const SnrKernel& kernel, const GridSpec& grid);

/// Candidate-by-candidate snr_score_bruteforce over the measurement grid.
ScoreMap snr_score_map_bruteforce(const SourcePosterior& post, const PlumeParams& params);

ScoreMap exact_score_map(const SourcePosterior& post, const SourcePosterior& reference, const PlumeParams& params,
                         const QuadratureSpec& quad);

ScoreMap expected_measurement_score_map(const SourcePosterior& post, const SourcePosterior& reference,
                                        const PlumeParams& params);

/// Candidate cell maximizing score / movement_cost. Exact ratio ties go to
/// the cheaper move, then the lowest index.
int select_next_cell(const ScoreMap& scores, const CostModel& cm, Point agent_pos);

inline Point select_next(const ScoreMap& scores, const CostModel& cm, Point agent_pos) {
  return scores.grid.measurement_center(select_next_cell(scores, cm, agent_pos));
}

/// Planner bound to one grid, plume and tier. Caches the SNR kernel.
class Planner {
 public:
  Planner(const GridSpec& grid, const PlumeParams& params, PlannerTier tier, QuadratureSpec quad = {});

  ScoreMap score(const SourcePosterior& post, const SourcePosterior& reference) const;

  PlannerTier tier() const { return tier_; }

 private:
  GridSpec grid_;
  PlumeParams params_;
  PlannerTier tier_;
  QuadratureSpec quad_;
  SnrKernel kernel_;
};

}  // namespace plumeig
