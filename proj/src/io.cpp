#include "plumeig/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "plumeig/errors.hpp"

namespace plumeig::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("csv: cannot parse number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_posterior_csv(std::ostream& out, const SourcePosterior& post) {
  const GridSpec& g = post.grid();
  out << "cell,x,y,probability\n";
  for (int s = 0; s < post.size(); ++s) {
    const Point c = g.source_center(s);
    out << s << ',' << format_double(c.x) << ',' << format_double(c.y) << ','
        << format_double(std::exp(post.log_probs()[s])) << '\n';
  }
}

json posterior_summary_json(const SourcePosterior& post, const SourcePosterior& reference) {
  const MapEstimate map = map_estimate(post);
  return json{{"map_cell", map.cell},
              {"map_xy", {map.location.x, map.location.y}},
              {"ig_bits", info_gain_bits(post, reference)},
              {"hpd95_size", hpd_region(post, 0.95).size()}};
}

void write_score_map_csv(std::ostream& out, const ScoreMap& scores) {
  out << "row,col,x,y,score\n";
  for (int c = 0; c < static_cast<int>(scores.values.size()); ++c) {
    const Point p = scores.grid.measurement_center(c);
    out << c / scores.grid.a_cells << ',' << c % scores.grid.a_cells << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(scores.values[c]) << '\n';
  }
}

void write_episode_csv(std::ostream& out, const EpisodeLog& log) {
  out << "step,agent_id,x,y,m,ig_bits,cost\n";
  for (const AgentStep& r : log.rows) {
    out << r.step << ',' << r.agent_id << ',' << format_double(r.position.x) << ',' << format_double(r.position.y)
        << ',' << format_double(r.m) << ',' << format_double(r.ig_bits) << ',' << format_double(r.cost) << '\n';
  }
}

std::vector<AgentStep> read_episode_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,agent_id,x,y,m,ig_bits,cost") {
    throw ConfigError("episode csv: missing or unexpected header");
  }
  std::vector<AgentStep> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw ConfigError("episode csv: expected 7 fields, got " + std::to_string(f.size()));
    AgentStep r;
    r.step = std::stoi(f[0]);
    r.agent_id = std::stoi(f[1]);
    r.position = {parse_double(f[2]), parse_double(f[3])};
    r.m = parse_double(f[4]);
    r.ig_bits = parse_double(f[5]);
    r.cost = parse_double(f[6]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> ig_series_from_rows(const std::vector<AgentStep>& rows) {
  std::vector<double> series;
  for (const AgentStep& r : rows) {
    if (r.step == static_cast<int>(series.size())) series.push_back(r.ig_bits);
  }
  return series;
}

json episode_summary_json(const EpisodeLog& log, double ig_threshold_bits) {
  const auto reached = steps_to_ig(log, ig_threshold_bits);
  return json{{"seed", log.seed},
              {"policy", std::string(to_string(log.policy))},
              {"source_xy", {log.source.x, log.source.y}},
              {"n_steps", log.ig_series.size()},
              {"final_ig_bits", log.summary.final_ig_bits},
              {"map_cell", log.summary.map_cell},
              {"map_xy", {log.summary.map_xy.x, log.summary.map_xy.y}},
              {"hpd95_size", log.summary.hpd95_size},
              {"cumulative_cost", log.summary.cumulative_cost},
              {"ig_threshold_bits", ig_threshold_bits},
              {"steps_to_ig", reached ? json(*reached) : json(nullptr)}};
}

void write_curves_csv(std::ostream& out, const rl::TrainResult& result) {
  out << "step,agent_id,smoothed_reward\n";
  const std::size_t steps = result.smoothed.empty() ? 0 : result.smoothed.front().size();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t a = 0; a < result.smoothed.size(); ++a) {
      out << t << ',' << a << ',' << format_double(result.smoothed[a][t]) << '\n';
    }
  }
}

std::vector<std::vector<double>> read_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,agent_id,smoothed_reward") {
    throw ConfigError("curves csv: missing or unexpected header");
  }
  std::vector<std::vector<double>> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw ConfigError("curves csv: expected 3 fields");
    const std::size_t agent = std::stoul(f[1]);
    if (curves.size() <= agent) curves.resize(agent + 1);
    curves[agent].push_back(parse_double(f[2]));
  }
  return curves;
}

json checkpoint_json(const rl::QNet& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    std::vector<double> w;
    w.reserve(layer.weight.size());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.push_back(layer.weight(r, c));
    layers.push_back({{"weight_shape", {layer.weight.rows(), layer.weight.cols()}},
                      {"weight", w},
                      {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}});
  }
  const auto& names = rl::observation_layout();
  return json{{"layer_sizes", net.layer_sizes()},
              {"activation", "relu"},
              {"observation_layout", std::vector<std::string>(names.begin(), names.end())},
              {"layers", layers}};
}

std::vector<std::string> observation_layout_from_checkpoint(const json& j) {
  return j.at("observation_layout").get<std::vector<std::string>>();
}

rl::QNet qnet_from_checkpoint(const json& j) {
  if (j.contains("observation_layout")) {
    const auto& names = rl::observation_layout();
    if (observation_layout_from_checkpoint(j) != std::vector<std::string>(names.begin(), names.end())) {
      throw ConfigError("checkpoint: observation layout differs from this build");
    }
  }
  rl::QNet net(j.at("layer_sizes").get<std::vector<int>>());
  const json& layers = j.at("layers");
  if (layers.size() != net.layers().size()) throw ConfigError("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = net.layers()[l];
    const auto w = layers[l].at("weight").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    if (w.size() != static_cast<std::size_t>(layer.weight.size()) ||
        b.size() != static_cast<std::size_t>(layer.bias.size())) {
      throw ConfigError("checkpoint: parameter shape mismatch");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = w[k++];
    for (std::size_t i = 0; i < b.size(); ++i) layer.bias(static_cast<Eigen::Index>(i)) = b[i];
  }
  return net;
}

void write_line_chart_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series) {
  constexpr double kW = 720, kH = 420, kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const Series& s : series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, s.y[k]);
      y_hi = std::max(y_hi, s.y[k]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  if (y_hi <= y_lo) y_hi = y_lo + 1;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - y_lo) / (y_hi - y_lo) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  auto tick = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
      << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
    out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
        << tick(xv) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kH - 10) << "\" text-anchor=\"middle\">"
      << xml_escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    out << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      out << num(sx(s.x[k])) << ',' << num(sy(s.y[k])) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << num(kW - kRight + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(kW - kRight + 36)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kW - kRight + 42) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace plumeig::io
