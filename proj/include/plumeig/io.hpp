#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "plumeig/bayes_grid.hpp"
#include "plumeig/ig_planner.hpp"
#include "plumeig/rl/qnet.hpp"
#include "plumeig/rl/trainer.hpp"
#include "plumeig/swarm_sim.hpp"

namespace plumeig::io {

using nlohmann::json;

/// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double v);

// Posterior snapshots: one probability per line, row-major.
void write_posterior_csv(std::ostream& out, const SourcePosterior& post);
/// {map_cell, map_xy, ig_bits, hpd95_size}
json posterior_summary_json(const SourcePosterior& post, const SourcePosterior& reference);

/// Header "row,col,x,y,score" then one line per measurement cell.
void write_score_map_csv(std::ostream& out, const ScoreMap& scores);

// Episode logs: header "step,agent_id,x,y,m,ig_bits,cost".
void write_episode_csv(std::ostream& out, const EpisodeLog& log);
/// Rows of an episode CSV (the `next` column is not stored and stays zero).
std::vector<AgentStep> read_episode_csv(std::istream& in);
/// Per-step IG series recovered from episode CSV rows.
std::vector<double> ig_series_from_rows(const std::vector<AgentStep>& rows);
json episode_summary_json(const EpisodeLog& log, double ig_threshold_bits);

// Training curves: header "step,agent_id,smoothed_reward".
void write_curves_csv(std::ostream& out, const rl::TrainResult& result);
/// Smoothed reward per agent, indexed [agent][step].
std::vector<std::vector<double>> read_curves_csv(std::istream& in);

/// {"layer_sizes": [...], "layers": [{"weight_shape": [out, in], "weight": [...row-major], "bias": [...]}]}
json checkpoint_json(const rl::QNet& net);
rl::QNet qnet_from_checkpoint(const json& j);
std::vector<std::string> observation_layout_from_checkpoint(const json& j);

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart as a standalone SVG document.
void write_line_chart_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series);

}  // namespace plumeig::io
