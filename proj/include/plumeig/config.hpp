#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "plumeig/ig_planner.hpp"
#include "plumeig/rl/trainer.hpp"
#include "plumeig/swarm_sim.hpp"

namespace plumeig {

struct BenchSettings {
  std::vector<int> sizes{8, 16, 32, 64};
  int repeats = 5;
};

/// Everything a CLI run needs. Missing keys take the defaults below; unknown
/// keys are rejected.
struct RunConfig {
  GridSpec grid{0.0, 64.0, 0.0, 64.0, 64, 64, 64, 64};
  PlumeParams plume;
  CostModel cost;
  PlannerTier tier = PlannerTier::SnrFft;
  QuadratureSpec quadrature;

  int n_agents = 5;
  int n_steps = 300;
  std::vector<MotionPolicy> policies{MotionPolicy::Info, MotionPolicy::CostOnly, MotionPolicy::Random};
  SourcePlacement placement = SourcePlacement::SampledFromPrior;
  SourceLocation source;
  std::vector<double> prior_weights;
  double ig_threshold_bits = 10.0;

  rl::TrainConfig train;
  std::vector<rl::TrainMode> modes{rl::TrainMode::Individual, rl::TrainMode::Communicating};

  BenchSettings bench;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";

  SimConfig sim_config(std::uint64_t seed, MotionPolicy policy) const;
  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
/// Throws ConfigError for a missing file, bad JSON, or invalid values.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace plumeig
