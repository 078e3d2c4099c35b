#include "plumeig/rl/env.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plumeig/errors.hpp"

namespace plumeig::rl {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::DoNothing: return "do-nothing";
    case Action::Move: return "move";
    case Action::Measure: return "measure";
    case Action::Update: return "update";
    case Action::Communicate: return "communicate";
  }
  return "do-nothing";
}

const std::array<std::string_view, kObservationSize>& observation_layout() {
  static const std::array<std::string_view, kObservationSize> layout{
      "position_x",       "position_y",       "velocity_x",          "velocity_y",
      "wind_x",           "wind_y",           "last_concentration",  "estimate_x",
      "estimate_y",       "ig_since_start",   "moved_since_measure", "repeated_action_gt4",
      "last_do_nothing",  "last_move",        "last_measure",        "last_update",
      "last_communicate"};
  return layout;
}

void RewardWeights::validate() const {
  if (!(w_info >= 0.0) || !(w_est >= 0.0)) throw ConfigError("reward: weights must be >= 0");
  for (double c : action_costs) {
    if (!(c >= 0.0)) throw ConfigError("reward: action costs must be >= 0");
  }
}

double RewardTerms::info_share() const {
  const double denom = std::abs(info) + std::abs(estimate) + std::abs(action_cost);
  return denom > 0.0 ? std::abs(info) / denom : 0.0;
}

RewardTerms reward_terms(double delta_ig_bits, double estimate_error, double diagonal, Action action,
                         const RewardWeights& weights) {
  return {weights.w_info * delta_ig_bits, weights.w_est * (1.0 - estimate_error / diagonal),
          weights.action_costs[static_cast<int>(action)]};
}

void EnvConfig::validate() const {
  grid.validate();
  plume.validate();
  reward.validate();
  if (n_agents < 1) throw ConfigError("rl: n_agents must be >= 1");
  if (horizon < 1) throw ConfigError("rl: horizon must be >= 1");
  if (!(kinematics.a_max >= 0.0) || !(kinematics.v_max > 0.0) || !(kinematics.dt > 0.0) ||
      !(kinematics.damping >= 0.0 && kinematics.damping <= 1.0)) {
    throw ConfigError("rl: invalid kinematics");
  }
  if (!(wind_max > 0.0)) throw ConfigError("rl: wind_max must be > 0");
  if (placement == SourcePlacement::Fixed && !grid.contains(source)) {
    throw ConfigError("rl: fixed source lies outside the world");
  }
}

HybridEnv::HybridEnv(EnvConfig config)
    : config_(std::move(config)), prior_(make_prior(config_.grid, config_.prior_weights)) {
  config_.validate();
  step_ = config_.horizon;  // not usable until reset
}

void HybridEnv::refresh_belief(RlAgent& agent, SourcePosterior belief) {
  agent.state.belief = std::move(belief);
  agent.ig_bits = info_gain_bits(agent.state.belief, prior_);
  agent.estimate = map_estimate(agent.state.belief);
}

std::vector<Observation> HybridEnv::reset(std::uint64_t seed) {
  const GridSpec& grid = config_.grid;
  if (config_.placement == SourcePlacement::Fixed) {
    source_ = config_.source;
  } else {
    Rng rng = make_stream(seed, Stream::Source);
    const std::vector<double> p = prior_.probabilities();
    std::discrete_distribution<int> pick(p.begin(), p.end());
    source_ = grid.source_center(pick(rng));
  }

  agents_.clear();
  noise_.clear();
  for (int id = 0; id < config_.n_agents; ++id) {
    Rng placement = make_stream(seed, Stream::Placement, id);
    std::uniform_real_distribution<double> ux(grid.x_min, grid.x_max);
    std::uniform_real_distribution<double> uy(grid.y_min, grid.y_max);
    RlAgent agent{.state = AgentState{id, {ux(placement), uy(placement)}, {}, prior_, {}, -1}};
    agent.consumed_from_peer.assign(config_.n_agents, -1);
    refresh_belief(agent, prior_);
    agents_.push_back(std::move(agent));
    noise_.push_back(make_stream(seed, Stream::Measurement, id));
  }
  step_ = 0;
  next_measurement_id_ = 0;

  std::vector<Observation> out;
  for (int id = 0; id < config_.n_agents; ++id) out.push_back(observe(id));
  return out;
}

void HybridEnv::place_agent(int id, Point position) { agents_.at(id).state.position = config_.grid.clamp(position); }

void HybridEnv::apply(int id, Action action) {
  RlAgent& agent = agents_[id];
  AgentState& st = agent.state;
  switch (action) {
    case Action::DoNothing: break;
    case Action::Move: {
      const Kinematics& k = config_.kinematics;
      const Point to_target = agent.estimate.location - st.position;
      const double dist = norm(to_target);
      const Point accel = dist > 0.0 ? (k.a_max / dist) * to_target : Point{};
      // Semi-implicit Euler: velocity first, then position with the new velocity.
      st.velocity = k.damping * st.velocity + k.dt * accel;
      const double speed = norm(st.velocity);
      if (speed > k.v_max) st.velocity = (k.v_max / speed) * st.velocity;
      const Point moved = st.position + k.dt * st.velocity;
      const Point clamped = config_.grid.clamp(moved);
      if (clamped.x != moved.x) st.velocity.x = 0.0;
      if (clamped.y != moved.y) st.velocity.y = 0.0;
      if (!(clamped == st.position)) agent.moved_since_measure = true;
      st.position = clamped;
      break;
    }
    case Action::Measure: {
      std::normal_distribution<double> noise(0.0, config_.plume.noise_sigma);
      const double m = concentration(st.position, source_, config_.plume) + noise(noise_[id]);
      const MeasurementRecord rec{st.position, m, step_, id};
      st.concentration_buffer.push_back(rec);
      while (static_cast<int>(st.concentration_buffer.size()) > kBufferCapacity) {
        st.concentration_buffer.pop_front();
      }
      agent.last_measurement = rec;
      agent.last_measurement_id = next_measurement_id_++;
      agent.moved_since_measure = false;
      break;
    }
    case Action::Update: {
      if (st.concentration_buffer.empty()) break;
      const std::vector<MeasurementRecord> records(st.concentration_buffer.begin(), st.concentration_buffer.end());
      refresh_belief(agent, posterior_update(st.belief, records, config_.plume));
      st.concentration_buffer.clear();
      break;
    }
    case Action::Communicate: {
      std::vector<MeasurementRecord> records;
      for (int peer = 0; peer < n_agents(); ++peer) {
        if (peer == id) continue;
        const RlAgent& other = agents_[peer];
        if (!other.last_measurement || other.last_measurement_id <= agent.consumed_from_peer[peer]) continue;
        records.push_back(*other.last_measurement);
        agent.consumed_from_peer[peer] = other.last_measurement_id;
      }
      if (!records.empty()) refresh_belief(agent, posterior_update(st.belief, records, config_.plume));
      break;
    }
  }
  const int a = static_cast<int>(action);
  agent.repeat_count = (st.last_action == a) ? agent.repeat_count + 1 : 1;
  st.last_action = a;
}

StepResult HybridEnv::step(std::span<const Action> actions) {
  if (done()) throw EpisodeDone("episode finished; call reset()");
  if (static_cast<int>(actions.size()) != n_agents()) {
    throw ConfigError("step: expected one action per agent");
  }
  StepResult result;
  const double diag = config_.grid.diagonal();
  for (int id = 0; id < n_agents(); ++id) {
    const double ig_before = agents_[id].ig_bits;
    apply(id, actions[id]);
    const RlAgent& agent = agents_[id];
    const RewardTerms terms = reward_terms(agent.ig_bits - ig_before, distance(agent.estimate.location, source_),
                                           diag, actions[id], config_.reward);
    result.terms.push_back(terms);
    result.rewards.push_back(terms.total());
  }
  ++step_;
  result.done = done();
  for (int id = 0; id < n_agents(); ++id) result.observations.push_back(observe(id));
  return result;
}

Observation HybridEnv::observe(int id) const {
  const RlAgent& agent = agents_.at(id);
  const GridSpec& g = config_.grid;
  const double v_max = config_.kinematics.v_max;
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  auto signed_unit = [](double v) { return std::clamp(v, -1.0, 1.0); };

  Observation o{};
  o[obs::kPosX] = unit((agent.state.position.x - g.x_min) / g.width());
  o[obs::kPosY] = unit((agent.state.position.y - g.y_min) / g.height());
  o[obs::kVelX] = signed_unit(agent.state.velocity.x / v_max);
  o[obs::kVelY] = signed_unit(agent.state.velocity.y / v_max);
  o[obs::kWindX] = signed_unit(config_.plume.wind_x / config_.wind_max);
  o[obs::kWindY] = signed_unit(config_.plume.wind_y / config_.wind_max);
  o[obs::kLastM] = agent.last_measurement ? unit(agent.last_measurement->m) : 0.0;
  o[obs::kEstX] = unit((agent.estimate.location.x - g.x_min) / g.width());
  o[obs::kEstY] = unit((agent.estimate.location.y - g.y_min) / g.height());
  const double max_bits = std::log2(static_cast<double>(g.source_count()));
  o[obs::kIg] = max_bits > 0.0 ? unit(agent.ig_bits / max_bits) : 0.0;
  o[obs::kMovedSinceMeasure] = agent.moved_since_measure ? 1.0 : 0.0;
  o[obs::kRepeatedAction] = agent.repeat_count > 4 ? 1.0 : 0.0;
  if (agent.state.last_action >= 0) o[obs::kLastActionOneHot + agent.state.last_action] = 1.0;
  return o;
}

}  // namespace plumeig::rl
