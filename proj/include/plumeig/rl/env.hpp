#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "plumeig/swarm_sim.hpp"

namespace plumeig::rl {

enum class Action : int { DoNothing = 0, Move = 1, Measure = 2, Update = 3, Communicate = 4 };

inline constexpr int kActionCount = 5;
inline constexpr int kObservationSize = 17;

std::string_view to_string(Action action);

using Observation = std::array<double, kObservationSize>;

/// Index -> meaning of every observation slot.
const std::array<std::string_view, kObservationSize>& observation_layout();

// Observation slot indices.
namespace obs {
inline constexpr int kPosX = 0, kPosY = 1, kVelX = 2, kVelY = 3, kWindX = 4, kWindY = 5, kLastM = 6,
                     kEstX = 7, kEstY = 8, kIg = 9, kMovedSinceMeasure = 10, kRepeatedAction = 11,
                     kLastActionOneHot = 12;
}

struct RewardWeights {
  double w_info = 1.0;
  double w_est = 1.0;
  // Indexed by Action: nothing, move, measure, update, communicate.
  std::array<double, kActionCount> action_costs{0.0, 0.2, 0.1, 0.1, 0.3};

  void validate() const;
};

struct RewardTerms {
  double info = 0.0;
  double estimate = 0.0;
  double action_cost = 0.0;

  double total() const { return info + estimate - action_cost; }
  /// |info| / (|info| + |estimate| + |action_cost|), 0 when all vanish.
  double info_share() const;
};

/// w_info * dIG + w_est * (1 - d / d_diag) - cost(action).
RewardTerms reward_terms(double delta_ig_bits, double estimate_error, double diagonal, Action action,
                         const RewardWeights& weights);

inline double reward(double delta_ig_bits, double estimate_error, double diagonal, Action action,
                     const RewardWeights& weights) {
  return reward_terms(delta_ig_bits, estimate_error, diagonal, action, weights).total();
}

struct Kinematics {
  double a_max = 0.5;
  double damping = 0.95;
  double v_max = 2.0;
  double dt = 1.0;
};

struct EnvConfig {
  GridSpec grid;
  PlumeParams plume;
  int n_agents = 3;
  int horizon = 200;
  Kinematics kinematics;
  double wind_max = 1.0;  // wind normalization
  SourcePlacement placement = SourcePlacement::SampledFromPrior;
  SourceLocation source;
  std::vector<double> prior_weights;
  RewardWeights reward;

  void validate() const;
};

struct StepResult {
  std::vector<Observation> observations;
  std::vector<double> rewards;
  std::vector<RewardTerms> terms;
  bool done = false;
};

struct RlAgent {
  AgentState state;
  double ig_bits = 0.0;
  MapEstimate estimate{};
  std::optional<MeasurementRecord> last_measurement{};
  long last_measurement_id = -1;
  std::vector<long> consumed_from_peer{};// last measurement id pulled from each peer
  int repeat_count = 0;                  // consecutive uses of last_action
  bool moved_since_measure = false;
};

/// Multi-agent plume environment with five high-level actions. Agents act in
/// id order within a step; motion uses a damped semi-implicit Euler step
/// toward each agent's MAP source estimate.
class HybridEnv {
 public:
  explicit HybridEnv(EnvConfig config);

  std::vector<Observation> reset(std::uint64_t seed);
  /// Throws EpisodeDone once the horizon is reached.
  StepResult step(std::span<const Action> actions);

  const EnvConfig& config() const { return config_; }
  const RlAgent& agent(int id) const { return agents_.at(id); }
  int n_agents() const { return static_cast<int>(agents_.size()); }
  SourceLocation source() const { return source_; }
  const SourcePosterior& prior() const { return prior_; }
  int steps_taken() const { return step_; }
  bool done() const { return step_ >= config_.horizon; }

  Observation observe(int id) const;

  /// Test hook: move an agent to a fixed spot.
  void place_agent(int id, Point position);

 private:
  void apply(int id, Action action);
  void refresh_belief(RlAgent& agent, SourcePosterior belief);

  EnvConfig config_;
  SourcePosterior prior_;
  SourceLocation source_;
  std::vector<RlAgent> agents_;
  std::vector<Rng> noise_;
  int step_ = 0;
  long next_measurement_id_ = 0;
};

}  // namespace plumeig::rl
