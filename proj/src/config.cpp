#include "plumeig/config.hpp"

#include <fstream>
#include <set>

#include "plumeig/errors.hpp"

namespace plumeig {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string_view kind_name(PlumeKind kind) {
  return kind == PlumeKind::IsotropicBlob ? "isotropic-blob" : "advected-plume";
}

PlumeKind parse_kind(const std::string& s) {
  if (s == "isotropic-blob") return PlumeKind::IsotropicBlob;
  if (s == "advected-plume") return PlumeKind::AdvectedPlume;
  throw ConfigError("plume: unknown kind '" + s + "'");
}

GridSpec grid_from(const json& j, GridSpec g) {
  reject_unknown(j, "grid", {"x_min", "x_max", "y_min", "y_max", "a_cells", "b_cells", "i_cells", "j_cells"});
  read(j, "x_min", g.x_min);
  read(j, "x_max", g.x_max);
  read(j, "y_min", g.y_min);
  read(j, "y_max", g.y_max);
  read(j, "a_cells", g.a_cells);
  read(j, "b_cells", g.b_cells);
  read(j, "i_cells", g.i_cells);
  read(j, "j_cells", g.j_cells);
  return g;
}

json grid_to(const GridSpec& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max},
          {"a_cells", g.a_cells}, {"b_cells", g.b_cells}, {"i_cells", g.i_cells}, {"j_cells", g.j_cells}};
}

PlumeParams plume_from(const json& j, PlumeParams p) {
  reject_unknown(j, "plume",
                 {"kind", "strength", "length_scale", "wind", "sigma0", "spread_rate", "noise_sigma"});
  if (j.contains("kind")) p.kind = parse_kind(j.at("kind").get<std::string>());
  read(j, "strength", p.strength);
  read(j, "length_scale", p.length_scale);
  if (j.contains("wind")) {
    const auto w = j.at("wind").get<std::vector<double>>();
    if (w.size() != 2) throw ConfigError("plume: wind must be [ux, uy]");
    p.wind_x = w[0];
    p.wind_y = w[1];
  }
  read(j, "sigma0", p.sigma0);
  read(j, "spread_rate", p.spread_rate);
  read(j, "noise_sigma", p.noise_sigma);
  return p;
}

json plume_to(const PlumeParams& p) {
  return {{"kind", kind_name(p.kind)},  {"strength", p.strength},
          {"length_scale", p.length_scale}, {"wind", {p.wind_x, p.wind_y}},
          {"sigma0", p.sigma0},          {"spread_rate", p.spread_rate},
          {"noise_sigma", p.noise_sigma}};
}

void source_from(const json& j, const std::string& where, SourcePlacement& placement, Point& source) {
  reject_unknown(j, where, {"placement", "x", "y"});
  if (j.contains("placement")) placement = parse_placement(j.at("placement").get<std::string>());
  read(j, "x", source.x);
  read(j, "y", source.y);
}

json source_to(SourcePlacement placement, Point source) {
  return {{"placement", to_string(placement)}, {"x", source.x}, {"y", source.y}};
}

}  // namespace

SimConfig RunConfig::sim_config(std::uint64_t seed, MotionPolicy policy) const {
  SimConfig c;
  c.grid = grid;
  c.plume = plume;
  c.cost = cost;
  c.tier = tier;
  c.quadrature = quadrature;
  c.n_agents = n_agents;
  c.n_steps = n_steps;
  c.policy = policy;
  c.seed = seed;
  c.placement = placement;
  c.source = source;
  c.prior_weights = prior_weights;
  return c;
}

void RunConfig::validate() const {
  sim_config(0, MotionPolicy::Info).validate();
  train.validate();
  if (policies.empty()) throw ConfigError("simulation: policies must not be empty");
  if (modes.empty()) throw ConfigError("rl: modes must not be empty");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (bench.repeats < 1) throw ConfigError("bench: repeats must be >= 1");
  for (int s : bench.sizes) {
    if (s < 1) throw ConfigError("bench: sizes must be >= 1");
  }
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j, "config",
                   {"grid", "plume", "cost", "planner", "simulation", "rl", "bench", "seeds", "output_dir"});
    if (j.contains("grid")) c.grid = grid_from(j.at("grid"), c.grid);
    if (j.contains("plume")) c.plume = plume_from(j.at("plume"), c.plume);
    if (j.contains("cost")) {
      const json& cj = j.at("cost");
      reject_unknown(cj, "cost", {"overhead", "quad_coeff"});
      read(cj, "overhead", c.cost.overhead);
      read(cj, "quad_coeff", c.cost.quad_coeff);
    }
    if (j.contains("planner")) {
      const json& pj = j.at("planner");
      reject_unknown(pj, "planner", {"tier", "quadrature_nodes"});
      if (pj.contains("tier")) c.tier = parse_tier(pj.at("tier").get<std::string>());
      read(pj, "quadrature_nodes", c.quadrature.node_count);
    }
    if (j.contains("simulation")) {
      const json& sj = j.at("simulation");
      reject_unknown(sj, "simulation",
                     {"n_agents", "n_steps", "policies", "source", "prior_weights", "ig_threshold_bits"});
      read(sj, "n_agents", c.n_agents);
      read(sj, "n_steps", c.n_steps);
      if (sj.contains("policies")) {
        c.policies.clear();
        for (const auto& p : sj.at("policies")) c.policies.push_back(parse_policy(p.get<std::string>()));
      }
      if (sj.contains("source")) source_from(sj.at("source"), "simulation.source", c.placement, c.source);
      if (sj.contains("prior_weights") && !sj.at("prior_weights").is_null()) {
        c.prior_weights = sj.at("prior_weights").get<std::vector<double>>();
      }
      read(sj, "ig_threshold_bits", c.ig_threshold_bits);
    }

    // The RL environment inherits the top-level world unless it overrides it.
    rl::TrainConfig& t = c.train;
    t.env.grid = c.grid;
    t.env.plume = c.plume;
    if (j.contains("rl")) {
      const json& rj = j.at("rl");
      reject_unknown(rj, "rl",
                     {"grid", "plume", "n_agents", "horizon", "kinematics", "wind_max", "source", "reward", "dqn",
                      "episodes", "smoothing_window", "modes"});
      if (rj.contains("grid")) t.env.grid = grid_from(rj.at("grid"), t.env.grid);
      if (rj.contains("plume")) t.env.plume = plume_from(rj.at("plume"), t.env.plume);
      read(rj, "n_agents", t.env.n_agents);
      read(rj, "horizon", t.env.horizon);
      read(rj, "wind_max", t.env.wind_max);
      if (rj.contains("kinematics")) {
        const json& kj = rj.at("kinematics");
        reject_unknown(kj, "rl.kinematics", {"a_max", "damping", "v_max", "dt"});
        read(kj, "a_max", t.env.kinematics.a_max);
        read(kj, "damping", t.env.kinematics.damping);
        read(kj, "v_max", t.env.kinematics.v_max);
        read(kj, "dt", t.env.kinematics.dt);
      }
      if (rj.contains("source")) source_from(rj.at("source"), "rl.source", t.env.placement, t.env.source);
      if (rj.contains("reward")) {
        const json& wj = rj.at("reward");
        reject_unknown(wj, "rl.reward", {"w_info", "w_est", "action_costs"});
        read(wj, "w_info", t.env.reward.w_info);
        read(wj, "w_est", t.env.reward.w_est);
        if (wj.contains("action_costs")) {
          const auto costs = wj.at("action_costs").get<std::vector<double>>();
          if (costs.size() != rl::kActionCount) throw ConfigError("rl.reward: action_costs needs 5 entries");
          std::copy(costs.begin(), costs.end(), t.env.reward.action_costs.begin());
        }
      }
      if (rj.contains("dqn")) {
        const json& dj = rj.at("dqn");
        reject_unknown(dj, "rl.dqn",
                       {"hidden", "batch_size", "replay_capacity", "gamma", "learning_rate", "target_sync",
                        "epsilon_start", "epsilon_min", "epsilon_decay_steps"});
        read(dj, "hidden", t.dqn.hidden);
        read(dj, "batch_size", t.dqn.batch_size);
        read(dj, "replay_capacity", t.dqn.replay_capacity);
        read(dj, "gamma", t.dqn.gamma);
        read(dj, "learning_rate", t.dqn.learning_rate);
        read(dj, "target_sync", t.dqn.target_sync);
        read(dj, "epsilon_start", t.dqn.epsilon.start);
        read(dj, "epsilon_min", t.dqn.epsilon.min);
        read(dj, "epsilon_decay_steps", t.dqn.epsilon.decay_steps);
      }
      read(rj, "episodes", t.episodes);
      read(rj, "smoothing_window", t.smoothing_window);
      if (rj.contains("modes")) {
        c.modes.clear();
        for (const auto& m : rj.at("modes")) c.modes.push_back(rl::parse_mode(m.get<std::string>()));
      }
    }
    if (j.contains("bench")) {
      const json& bj = j.at("bench");
      reject_unknown(bj, "bench", {"sizes", "repeats"});
      read(bj, "sizes", c.bench.sizes);
      read(bj, "repeats", c.bench.repeats);
    }
    read(j, "seeds", c.seeds);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  const rl::TrainConfig& t = c.train;
  json policies = json::array();
  for (MotionPolicy p : c.policies) policies.push_back(to_string(p));
  json modes = json::array();
  for (rl::TrainMode m : c.modes) modes.push_back(rl::to_string(m));
  return json{
      {"grid", grid_to(c.grid)},
      {"plume", plume_to(c.plume)},
      {"cost", {{"overhead", c.cost.overhead}, {"quad_coeff", c.cost.quad_coeff}}},
      {"planner", {{"tier", to_string(c.tier)}, {"quadrature_nodes", c.quadrature.node_count}}},
      {"simulation",
       {{"n_agents", c.n_agents},
        {"n_steps", c.n_steps},
        {"policies", policies},
        {"source", source_to(c.placement, c.source)},
        {"prior_weights", c.prior_weights.empty() ? json(nullptr) : json(c.prior_weights)},
        {"ig_threshold_bits", c.ig_threshold_bits}}},
      {"rl",
       {{"grid", grid_to(t.env.grid)},
        {"plume", plume_to(t.env.plume)},
        {"n_agents", t.env.n_agents},
        {"horizon", t.env.horizon},
        {"kinematics",
         {{"a_max", t.env.kinematics.a_max},
          {"damping", t.env.kinematics.damping},
          {"v_max", t.env.kinematics.v_max},
          {"dt", t.env.kinematics.dt}}},
        {"wind_max", t.env.wind_max},
        {"source", source_to(t.env.placement, t.env.source)},
        {"reward",
         {{"w_info", t.env.reward.w_info}, {"w_est", t.env.reward.w_est}, {"action_costs", t.env.reward.action_costs}}},
        {"dqn",
         {{"hidden", t.dqn.hidden},
          {"batch_size", t.dqn.batch_size},
          {"replay_capacity", t.dqn.replay_capacity},
          {"gamma", t.dqn.gamma},
          {"learning_rate", t.dqn.learning_rate},
          {"target_sync", t.dqn.target_sync},
          {"epsilon_start", t.dqn.epsilon.start},
          {"epsilon_min", t.dqn.epsilon.min},
          {"epsilon_decay_steps", t.dqn.epsilon.decay_steps}}},
        {"episodes", t.episodes},
        {"smoothing_window", t.smoothing_window},
        {"modes", modes}}},
      {"bench", {{"sizes", c.bench.sizes}, {"repeats", c.bench.repeats}}},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace plumeig
