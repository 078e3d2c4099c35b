#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "plumeig/rl/env.hpp"
#include "plumeig/rl/qnet.hpp"

namespace plumeig::rl {

enum class TrainMode { Individual, Communicating };

std::string_view to_string(TrainMode mode);
TrainMode parse_mode(std::string_view text);

struct DqnSettings {
  std::vector<int> hidden{64, 64};
  int batch_size = 32;
  int replay_capacity = 10000;
  double gamma = 0.95;
  double learning_rate = 1e-3;
  int target_sync = 500;
  EpsilonSchedule epsilon;

  void validate() const;
};

struct TrainConfig {
  EnvConfig env;
  DqnSettings dqn;
  int episodes = 30;
  int smoothing_window = 200;

  void validate() const;
};

struct TrainResult {
  TrainMode mode = TrainMode::Communicating;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> rewards;   // [agent][env step]
  std::vector<std::vector<double>> smoothed;  // trailing mean over smoothing_window
  std::vector<QNet> nets;
  std::vector<std::array<long, kActionCount>> action_counts;  // logged transitions per action
};

/// Mask for a mode: Communicate is unavailable to individual learners.
ActionMask action_mask(TrainMode mode);

/// Epsilon-greedy over the masked actions. A masked action drawn by the
/// random branch is remapped to DoNothing.
Action choose_action(const QNet& net, const Observation& obs, double epsilon, const ActionMask& mask, Rng& rng);

/// Independent DQN per agent over `episodes` episodes of the hybrid env.
TrainResult train(const TrainConfig& config, TrainMode mode, std::uint64_t seed);

/// Trailing moving average with the given window.
std::vector<double> trailing_mean(std::span<const double> values, int window);

}  // namespace plumeig::rl
