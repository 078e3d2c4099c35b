#include "plumeig/rl/trainer.hpp"

#include <random>
#include <string>

#include "plumeig/errors.hpp"

namespace plumeig::rl {

std::string_view to_string(TrainMode mode) {
  return mode == TrainMode::Individual ? "individual" : "communicating";
}

TrainMode parse_mode(std::string_view text) {
  if (text == "individual") return TrainMode::Individual;
  if (text == "communicating") return TrainMode::Communicating;
  throw ConfigError("unknown training mode '" + std::string(text) + "'");
}

void DqnSettings::validate() const {
  for (int h : hidden) {
    if (h < 1) throw ConfigError("dqn: hidden sizes must be >= 1");
  }
  if (batch_size < 1) throw ConfigError("dqn: batch_size must be >= 1");
  if (replay_capacity < batch_size) throw ConfigError("dqn: replay_capacity must be >= batch_size");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("dqn: gamma must lie in [0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("dqn: learning_rate must be > 0");
  if (target_sync < 1) throw ConfigError("dqn: target_sync must be >= 1");
  if (!(epsilon.min >= 0.0 && epsilon.start <= 1.0 && epsilon.min <= epsilon.start)) {
    throw ConfigError("dqn: invalid epsilon schedule");
  }
}

void TrainConfig::validate() const {
  env.validate();
  dqn.validate();
  if (episodes < 0) throw ConfigError("train: episodes must be >= 0");
  if (smoothing_window < 1) throw ConfigError("train: smoothing_window must be >= 1");
}

ActionMask action_mask(TrainMode mode) {
  ActionMask mask = kAllActions;
  if (mode == TrainMode::Individual) mask[static_cast<int>(Action::Communicate)] = false;
  return mask;
}

Action choose_action(const QNet& net, const Observation& obs, double epsilon, const ActionMask& mask, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, kActionCount - 1);
    const int a = pick(rng);
    return mask[a] ? static_cast<Action>(a) : Action::DoNothing;
  }
  const Eigen::VectorXd q = net.forward(obs);
  int best = -1;
  for (int a = 0; a < kActionCount; ++a) {
    if (mask[a] && (best < 0 || q(a) > q(best))) best = a;
  }
  return static_cast<Action>(best);
}

std::vector<double> trailing_mean(std::span<const double> values, int window) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    sum += values[t];
    if (t >= static_cast<std::size_t>(window)) sum -= values[t - window];
    out[t] = sum / static_cast<double>(std::min<std::size_t>(t + 1, window));
  }
  return out;
}

TrainResult train(const TrainConfig& config, TrainMode mode, std::uint64_t seed) {
  config.validate();
  const int n = config.env.n_agents;
  const ActionMask mask = action_mask(mode);
  const DqnSettings& dqn = config.dqn;
  const std::vector<int> sizes = default_layer_sizes(dqn.hidden);

  TrainResult result;
  result.mode = mode;
  result.seed = seed;
  result.rewards.assign(n, {});
  result.action_counts.assign(n, {});

  std::vector<QNet> targets;
  std::vector<ReplayBuffer> replay;
  std::vector<Rng> explore;
  std::vector<Rng> sampler;
  for (int id = 0; id < n; ++id) {
    Rng init = make_stream(seed, Stream::Init, id);
    result.nets.emplace_back(sizes, init);
    targets.push_back(result.nets.back());
    replay.emplace_back(static_cast<std::size_t>(dqn.replay_capacity));
    explore.push_back(make_stream(seed, Stream::Exploration, id));
    sampler.push_back(make_stream(seed, Stream::Replay, id));
  }

  HybridEnv env(config.env);
  long global_step = 0;
  for (int episode = 0; episode < config.episodes; ++episode) {
    std::vector<Observation> obs = env.reset(splitmix64(seed) ^ static_cast<std::uint64_t>(episode));
    bool done = false;
    while (!done) {
      const double eps = dqn.epsilon(global_step);
      std::vector<Action> actions(n);
      for (int id = 0; id < n; ++id) actions[id] = choose_action(result.nets[id], obs[id], eps, mask, explore[id]);

      StepResult step = env.step(actions);
      done = step.done;
      for (int id = 0; id < n; ++id) {
        const int a = static_cast<int>(actions[id]);
        replay[id].push({obs[id], a, step.rewards[id], step.observations[id], done});
        ++result.action_counts[id][a];
        result.rewards[id].push_back(step.rewards[id]);
        if (replay[id].size() >= static_cast<std::size_t>(dqn.batch_size)) {
          const std::vector<Transition> batch = replay[id].sample(dqn.batch_size, sampler[id]);
          td_train_step(result.nets[id], targets[id], batch, dqn.gamma, dqn.learning_rate, mask);
        }
      }
      obs = std::move(step.observations);
      ++global_step;
      if (global_step % dqn.target_sync == 0) {
        for (int id = 0; id < n; ++id) targets[id] = result.nets[id];
      }
    }
  }

  for (int id = 0; id < n; ++id) result.smoothed.push_back(trailing_mean(result.rewards[id], config.smoothing_window));
  return result;
}

}  // namespace plumeig::rl
