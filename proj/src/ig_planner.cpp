#include "plumeig/ig_planner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "plumeig/errors.hpp"
#include "plumeig/fft_conv.hpp"

namespace plumeig {

void CostModel::validate() const {
  if (!(overhead > 0.0)) throw ConfigError("cost: overhead must be > 0");
  if (!(quad_coeff >= 0.0)) throw ConfigError("cost: quad_coeff must be >= 0");
}

std::string_view to_string(PlannerTier tier) {
  switch (tier) {
    case PlannerTier::Exact: return "exact";
    case PlannerTier::ExpectedMeasurement: return "expected-measurement";
    case PlannerTier::SnrFft: return "snr-fft";
  }
  return "snr-fft";
}

PlannerTier parse_tier(std::string_view text) {
  if (text == "exact") return PlannerTier::Exact;
  if (text == "expected-measurement") return PlannerTier::ExpectedMeasurement;
  if (text == "snr-fft") return PlannerTier::SnrFft;
  throw ConfigError("unknown planner tier '" + std::string(text) + "'");
}

GaussHermiteRule gauss_hermite(int node_count) {
  if (node_count < 1) throw ConfigError("quadrature: node_count must be >= 1");
  // Golub-Welsch: eigen-decomposition of the Hermite Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(node_count, node_count);
  for (int k = 1; k < node_count; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(node_count);
  rule.weights.resize(node_count);
  double total = 0.0;
  for (int k = 0; k < node_count; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;
    total += rule.weights[k];
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

double movement_cost(Point from, Point to, const CostModel& cm) {
  return cm.overhead + cm.quad_coeff * squared_norm(to - from);
}

namespace {

std::vector<double> means_at(const GridSpec& grid, Point candidate, const PlumeParams& params) {
  std::vector<double> f(grid.source_count());
  for (int s = 0; s < grid.source_count(); ++s) f[s] = concentration(candidate, grid.source_center(s), params);
  return f;
}

double hypothetical_ig(const SourcePosterior& post, const SourcePosterior& reference,
                       const std::vector<double>& means, double m, double sigma) {
  const double measurements[] = {m};
  const SourcePosterior updated =
      posterior_update_with_means(post, measurements, std::span<const std::vector<double>>(&means, 1), sigma);
  return info_gain_bits(updated, reference);
}

ScoreMap per_candidate(PlannerTier tier, const GridSpec& grid, auto&& score) {
  ScoreMap map{tier, grid, std::vector<double>(grid.measurement_count())};
  for (int c = 0; c < grid.measurement_count(); ++c) {
    map.values[c] = std::max(0.0, score(grid.measurement_center(c)));
  }
  return map;
}

}  // namespace

double eig_exact(const SourcePosterior& post, const SourcePosterior& reference, Point candidate,
                 const PlumeParams& params, const QuadratureSpec& quad) {
  const GaussHermiteRule rule = gauss_hermite(quad.node_count);
  const std::vector<double> f = means_at(post.grid(), candidate, params);
  const double spread = std::numbers::sqrt2 * params.noise_sigma;

  // Mixture components with identical means integrate identically; merge
  // their posterior mass so each distinct mean is integrated once.
  std::map<double, double> mass_by_mean;
  const auto lp = post.log_probs();
  for (std::size_t s = 0; s < lp.size(); ++s) {
    if (lp[s] == -std::numeric_limits<double>::infinity()) continue;
    mass_by_mean[f[s]] += std::exp(lp[s]);
  }

  double expected = 0.0;
  for (const auto& [mean, mass] : mass_by_mean) {
    double inner = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      inner += rule.weights[k] * hypothetical_ig(post, reference, f, mean + spread * rule.nodes[k],
                                                 params.noise_sigma);
    }
    expected += mass * inner;
  }
  return std::max(0.0, expected);
}

double expected_measurement(const SourcePosterior& post, Point candidate, const PlumeParams& params) {
  const auto lp = post.log_probs();
  double m = 0.0;
  for (std::size_t s = 0; s < lp.size(); ++s) {
    if (lp[s] == -std::numeric_limits<double>::infinity()) continue;
    m += std::exp(lp[s]) * concentration(candidate, post.grid().source_center(static_cast<int>(s)), params);
  }
  return m;
}

double eig_at_expected_measurement(const SourcePosterior& post, const SourcePosterior& reference,
                                   Point candidate, const PlumeParams& params) {
  const std::vector<double> f = means_at(post.grid(), candidate, params);
  return hypothetical_ig(post, reference, f, expected_measurement(post, candidate, params), params.noise_sigma);
}

double snr_score_bruteforce(const SourcePosterior& post, Point candidate, const PlumeParams& params) {
  const auto lp = post.log_probs();
  const double two_var = 2.0 * params.noise_sigma * params.noise_sigma;
  double nats = 0.0;
  for (std::size_t s = 0; s < lp.size(); ++s) {
    if (lp[s] == -std::numeric_limits<double>::infinity()) continue;
    const double f = concentration(candidate, post.grid().source_center(static_cast<int>(s)), params);
    nats += std::exp(lp[s]) * f * f / two_var;
  }
  return nats / std::numbers::ln2;
}

ScoreMap snr_score_map_fft(const SourcePosterior& post, const SnrKernel& kernel, const GridSpec& grid) {
  if (!(post.grid() == grid)) throw KernelGridMismatch("posterior grid differs from the scoring grid");
  const auto [ax, ay] = kernel_lattice(grid);
  if (!(kernel.x == ax) || !(kernel.y == ay) ||
      kernel.values.size() != static_cast<std::size_t>(ax.size) * ay.size) {
    throw KernelGridMismatch("kernel lattice does not cover the grid's measurement-source offsets");
  }

  // Source cell (i, j) sits at fine lattice point (i * stride_x, j * stride_y).
  Array2D fine_post((grid.j_cells - 1) * ay.source_stride + 1, (grid.i_cells - 1) * ax.source_stride + 1);
  const auto lp = post.log_probs();
  for (int j = 0; j < grid.j_cells; ++j)
    for (int i = 0; i < grid.i_cells; ++i)
      fine_post(j * ay.source_stride, i * ax.source_stride) = std::exp(lp[static_cast<std::size_t>(j) * grid.i_cells + i]);

  Array2D k(ay.size, ax.size);
  k.data = kernel.values;

  const Array2D conv = linear_convolve_2d(fine_post, k);
  ScoreMap map{PlannerTier::SnrFft, grid, std::vector<double>(grid.measurement_count())};
  const int row0 = -ay.min_offset;
  const int col0 = -ax.min_offset;
  for (int b = 0; b < grid.b_cells; ++b)
    for (int a = 0; a < grid.a_cells; ++a) {
      const double nats = conv(b * ay.measurement_stride + row0, a * ax.measurement_stride + col0);
      map.values[static_cast<std::size_t>(b) * grid.a_cells + a] = std::max(0.0, nats / std::numbers::ln2);
    }
  return map;
}

ScoreMap snr_score_map_bruteforce(const SourcePosterior& post, const PlumeParams& params) {
  return per_candidate(PlannerTier::SnrFft, post.grid(),
                       [&](Point c) { return snr_score_bruteforce(post, c, params); });
}

ScoreMap exact_score_map(const SourcePosterior& post, const SourcePosterior& reference, const PlumeParams& params,
                         const QuadratureSpec& quad) {
  return per_candidate(PlannerTier::Exact, post.grid(),
                       [&](Point c) { return eig_exact(post, reference, c, params, quad); });
}

ScoreMap expected_measurement_score_map(const SourcePosterior& post, const SourcePosterior& reference,
                                        const PlumeParams& params) {
  return per_candidate(PlannerTier::ExpectedMeasurement, post.grid(),
                       [&](Point c) { return eig_at_expected_measurement(post, reference, c, params); });
}

int select_next_cell(const ScoreMap& scores, const CostModel& cm, Point agent_pos) {
  int best = 0;
  double best_ratio = -std::numeric_limits<double>::infinity();
  double best_cost = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(scores.values.size()); ++c) {
    const double cost = movement_cost(agent_pos, scores.grid.measurement_center(c), cm);
    const double ratio = scores.values[c] / cost;
    if (ratio > best_ratio || (ratio == best_ratio && cost < best_cost)) {
      best = c;
      best_ratio = ratio;
      best_cost = cost;
    }
  }
  return best;
}

Planner::Planner(const GridSpec& grid, const PlumeParams& params, PlannerTier tier, QuadratureSpec quad)
    : grid_(grid), params_(params), tier_(tier), quad_(quad) {
  grid_.validate();
  params_.validate();
  if (quad_.node_count < 1) throw ConfigError("quadrature: node_count must be >= 1");
  if (tier_ == PlannerTier::SnrFft) kernel_ = squared_snr_kernel(params_, grid_);
}

ScoreMap Planner::score(const SourcePosterior& post, const SourcePosterior& reference) const {
  switch (tier_) {
    case PlannerTier::Exact: return exact_score_map(post, reference, params_, quad_);
    case PlannerTier::ExpectedMeasurement: return expected_measurement_score_map(post, reference, params_);
    case PlannerTier::SnrFft: return snr_score_map_fft(post, kernel_, grid_);
  }
  return snr_score_map_fft(post, kernel_, grid_);
}

}  // namespace plumeig
