#include "plumeig/swarm_sim.hpp"

#include <random>
#include <string>

#include "plumeig/errors.hpp"

namespace plumeig {

std::string_view to_string(MotionPolicy policy) {
  switch (policy) {
    case MotionPolicy::Info: return "info";
    case MotionPolicy::CostOnly: return "cost-only";
    case MotionPolicy::Random: return "random";
  }
  return "info";
}

MotionPolicy parse_policy(std::string_view text) {
  if (text == "info") return MotionPolicy::Info;
  if (text == "cost-only") return MotionPolicy::CostOnly;
  if (text == "random") return MotionPolicy::Random;
  throw ConfigError("unknown motion policy '" + std::string(text) + "'");
}

std::string_view to_string(SourcePlacement placement) {
  return placement == SourcePlacement::Fixed ? "fixed" : "sampled-from-prior";
}

SourcePlacement parse_placement(std::string_view text) {
  if (text == "fixed") return SourcePlacement::Fixed;
  if (text == "sampled-from-prior") return SourcePlacement::SampledFromPrior;
  throw ConfigError("unknown source placement '" + std::string(text) + "'");
}

void SimConfig::validate() const {
  grid.validate();
  plume.validate();
  cost.validate();
  if (n_agents < 1) throw ConfigError("simulation: n_agents must be >= 1");
  if (n_steps < 1) throw ConfigError("simulation: n_steps must be >= 1");
  if (quadrature.node_count < 1) throw ConfigError("quadrature: node_count must be >= 1");
  if (placement == SourcePlacement::Fixed && !grid.contains(source)) {
    throw ConfigError("simulation: fixed source lies outside the world");
  }
  if (!prior_weights.empty() && static_cast<int>(prior_weights.size()) != grid.source_count()) {
    throw ConfigError("simulation: prior weights do not match the source grid");
  }
  if (policy == MotionPolicy::Info && tier == PlannerTier::SnrFft) {
    (void)kernel_lattice(grid);  // surfaces incommensurate grids before the run
  }
}

SourcePosterior make_prior(const GridSpec& grid, std::span<const double> weights) {
  return weights.empty() ? SourcePosterior::uniform(grid) : SourcePosterior::from_weights(grid, weights);
}

Point random_policy(const GridSpec& grid, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, grid.measurement_count() - 1);
  return grid.measurement_center(pick(rng));
}

Point cost_only_policy(Point position, const GridSpec& grid, const CostModel& cm, Rng& rng) {
  std::vector<double> weights(grid.measurement_count());
  for (int c = 0; c < grid.measurement_count(); ++c) {
    weights[c] = 1.0 / movement_cost(position, grid.measurement_center(c), cm);
  }
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  return grid.measurement_center(pick(rng));
}

std::optional<int> steps_to_ig(std::span<const double> ig_series, double threshold_bits) {
  for (std::size_t t = 0; t < ig_series.size(); ++t) {
    if (ig_series[t] >= threshold_bits) return static_cast<int>(t);
  }
  return std::nullopt;
}

namespace {

SourceLocation place_source(const SimConfig& config, const SourcePosterior& prior) {
  if (config.placement == SourcePlacement::Fixed) return config.source;
  Rng rng = make_stream(config.seed, Stream::Source);
  const std::vector<double> p = prior.probabilities();
  std::discrete_distribution<int> pick(p.begin(), p.end());
  return config.grid.source_center(pick(rng));
}

}  // namespace

EpisodeLog run_episode(const SimConfig& config, const StepObserver& observer) {
  config.validate();
  const GridSpec& grid = config.grid;
  const SourcePosterior prior = make_prior(grid, config.prior_weights);

  EpisodeLog log;
  log.seed = config.seed;
  log.policy = config.policy;
  log.n_agents = config.n_agents;
  log.source = place_source(config, prior);

  std::vector<AgentState> agents;
  std::vector<Rng> noise_streams;
  std::vector<Rng> policy_streams;
  for (int id = 0; id < config.n_agents; ++id) {
    Rng placement = make_stream(config.seed, Stream::Placement, id);
    agents.push_back(AgentState{id, random_policy(grid, placement), {}, prior, {}, -1});
    noise_streams.push_back(make_stream(config.seed, Stream::Measurement, id));
    policy_streams.push_back(make_stream(config.seed, Stream::Policy, id));
  }

  std::optional<Planner> planner;
  if (config.policy == MotionPolicy::Info) planner.emplace(grid, config.plume, config.tier, config.quadrature);

  SourcePosterior shared = prior;
  log.rows.reserve(static_cast<std::size_t>(config.n_steps) * config.n_agents);
  for (int t = 0; t < config.n_steps; ++t) {
    // Measure.
    std::vector<MeasurementRecord> records;
    for (AgentState& agent : agents) {
      std::normal_distribution<double> noise(0.0, config.plume.noise_sigma);
      const double m = concentration(agent.position, log.source, config.plume) + noise(noise_streams[agent.id]);
      records.push_back({agent.position, m, t, agent.id});
    }
    // Broadcast and update: every agent applies the same records in id order.
    shared = posterior_update(shared, records, config.plume);
    for (AgentState& agent : agents) agent.belief = shared;
    const double ig = info_gain_bits(shared, prior);
    log.ig_series.push_back(ig);
    if (observer) observer(t, agents, records);

    // Plan and move.
    std::optional<ScoreMap> scores;
    if (planner) scores = planner->score(shared, prior);
    for (AgentState& agent : agents) {
      Point next;
      switch (config.policy) {
        case MotionPolicy::Info: next = select_next(*scores, config.cost, agent.position); break;
        case MotionPolicy::CostOnly:
          next = cost_only_policy(agent.position, grid, config.cost, policy_streams[agent.id]);
          break;
        case MotionPolicy::Random: next = random_policy(grid, policy_streams[agent.id]); break;
      }
      const double cost = movement_cost(agent.position, next, config.cost);
      log.rows.push_back({t, agent.id, agent.position, records[agent.id].m, ig, next, cost});
      log.summary.cumulative_cost += cost;
      agent.position = next;
    }
  }

  const MapEstimate map = map_estimate(shared);
  log.summary.map_cell = map.cell;
  log.summary.map_xy = map.location;
  log.summary.final_ig_bits = log.ig_series.back();
  log.summary.hpd95_size = static_cast<int>(hpd_region(shared, 0.95).size());
  return log;
}

std::vector<double> replay_ig_series(const EpisodeLog& log, const SimConfig& config) {
  const SourcePosterior prior = make_prior(config.grid, config.prior_weights);
  SourcePosterior post = prior;
  std::vector<double> series;
  for (std::size_t k = 0; k < log.rows.size(); k += log.n_agents) {
    std::vector<MeasurementRecord> records;
    for (int a = 0; a < log.n_agents; ++a) {
      const AgentStep& row = log.rows[k + a];
      records.push_back({row.position, row.m, row.step, row.agent_id});
    }
    post = posterior_update(post, records, config.plume);
    series.push_back(info_gain_bits(post, prior));
  }
  return series;
}

}  // namespace plumeig
