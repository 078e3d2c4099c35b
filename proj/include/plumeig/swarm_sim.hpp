#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "plumeig/bayes_grid.hpp"
#include "plumeig/ig_planner.hpp"
#include "plumeig/rng.hpp"

namespace plumeig {

enum class MotionPolicy { Info, CostOnly, Random };

std::string_view to_string(MotionPolicy policy);
MotionPolicy parse_policy(std::string_view text);

enum class SourcePlacement { Fixed, SampledFromPrior };

std::string_view to_string(SourcePlacement placement);
SourcePlacement parse_placement(std::string_view text);

inline constexpr int kBufferCapacity = 4;

struct AgentState {
  int id = 0;
  Point position;
  Point velocity;
  SourcePosterior belief;
  std::deque<MeasurementRecord> concentration_buffer;  // at most kBufferCapacity
  int last_action = -1;
};

struct SimConfig {
  GridSpec grid;
  PlumeParams plume;
  CostModel cost;
  PlannerTier tier = PlannerTier::SnrFft;
  QuadratureSpec quadrature;
  int n_agents = 5;
  int n_steps = 300;
  MotionPolicy policy = MotionPolicy::Info;
  std::uint64_t seed = 0;
  SourcePlacement placement = SourcePlacement::SampledFromPrior;
  SourceLocation source;             // used when placement == Fixed
  std::vector<double> prior_weights;  // empty means uniform

  void validate() const;
};

/// Initial prior described by the config (uniform unless weights are given).
SourcePosterior make_prior(const GridSpec& grid, std::span<const double> weights);

/// One row per agent per step.
struct AgentStep {
  int step = 0;
  int agent_id = 0;
  Point position;  // where the measurement was taken
  double m = 0.0;
  double ig_bits = 0.0;  // shared belief vs initial prior, after this step's update
  Point next;            // location chosen for the next measurement
  double cost = 0.0;     // movement cost paid to reach `next`
};

struct EpisodeSummary {
  int map_cell = 0;
  Point map_xy;
  double final_ig_bits = 0.0;
  int hpd95_size = 0;
  double cumulative_cost = 0.0;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  MotionPolicy policy = MotionPolicy::Info;
  SourceLocation source;
  int n_agents = 0;
  std::vector<AgentStep> rows;     // step-major, agent id order within a step
  std::vector<double> ig_series;   // one entry per step
  EpisodeSummary summary;
};

/// Measure, broadcast, update, plan, move; repeated n_steps times. Every
/// agent receives every measurement, so beliefs stay identical.
// Called after each step's belief update, before agents move.
using StepObserver =
    std::function<void(int step, std::span<const AgentState> agents, std::span<const MeasurementRecord> records)>;

EpisodeLog run_episode(const SimConfig& config, const StepObserver& observer = {});

/// Uniformly random measurement cell center.
Point random_policy(const GridSpec& grid, Rng& rng);

/// Measurement cell sampled with probability proportional to
/// 1 / movement_cost(position, cell).
Point cost_only_policy(Point position, const GridSpec& grid, const CostModel& cm, Rng& rng);

/// First step whose IG reaches `threshold_bits`.
std::optional<int> steps_to_ig(std::span<const double> ig_series, double threshold_bits);

inline std::optional<int> steps_to_ig(const EpisodeLog& log, double threshold_bits) {
  return steps_to_ig(log.ig_series, threshold_bits);
}

/// Rebuilds the IG series from the logged measurements alone.
std::vector<double> replay_ig_series(const EpisodeLog& log, const SimConfig& config);

}  // namespace plumeig
