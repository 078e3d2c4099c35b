#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "plumeig/cli.hpp"
#include "plumeig/config.hpp"
#include "plumeig/errors.hpp"
#include "plumeig/ig_planner.hpp"
#include "plumeig/rl/trainer.hpp"
#include "plumeig/swarm_sim.hpp"

namespace py = pybind11;
using namespace plumeig;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

// Row-major (rows = y, columns = x), the same layout the grid uses.
py::array_t<double> to_image(const std::vector<double>& v, int columns, int rows) {
  py::array_t<double> out({rows, columns});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<MeasurementRecord> to_records(const std::vector<std::tuple<double, double, double>>& rows) {
  std::vector<MeasurementRecord> out;
  int t = 0;
  for (const auto& [x, y, m] : rows) out.push_back({{x, y}, m, t++, 0});
  return out;
}

py::dict episode_dict(const EpisodeLog& log) {
  py::dict d;
  d["seed"] = log.seed;
  d["policy"] = std::string(to_string(log.policy));
  d["source"] = py::make_tuple(log.source.x, log.source.y);
  d["ig_series"] = to_array(log.ig_series);
  std::vector<double> step, agent, x, y, m;
  for (const auto& r : log.rows) {
    step.push_back(r.step);
    agent.push_back(r.agent_id);
    x.push_back(r.position.x);
    y.push_back(r.position.y);
    m.push_back(r.m);
  }
  d["step"] = to_array(step);
  d["agent"] = to_array(agent);
  d["x"] = to_array(x);
  d["y"] = to_array(y);
  d["m"] = to_array(m);
  d["final_ig_bits"] = log.summary.final_ig_bits;
  d["map_xy"] = py::make_tuple(log.summary.map_xy.x, log.summary.map_xy.y);
  d["hpd95_size"] = log.summary.hpd95_size;
  d["cumulative_cost"] = log.summary.cumulative_cost;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grid Bayesian plume-source localization and information-gain planning";

  // translators run newest first, so the base class goes in before its subclasses
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AllMassLost>(m, "AllMassLost", PyExc_ArithmeticError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double x_min, double x_max, double y_min, double y_max, int a, int b, int i, int j) {
             GridSpec g{x_min, x_max, y_min, y_max, a, b, i, j};
             g.validate();
             return g;
           }),
           py::arg("x_min"), py::arg("x_max"), py::arg("y_min"), py::arg("y_max"), py::arg("a_cells"),
           py::arg("b_cells"), py::arg("i_cells"), py::arg("j_cells"))
      .def_readonly("x_min", &GridSpec::x_min)
      .def_readonly("x_max", &GridSpec::x_max)
      .def_readonly("y_min", &GridSpec::y_min)
      .def_readonly("y_max", &GridSpec::y_max)
      .def_readonly("a_cells", &GridSpec::a_cells)
      .def_readonly("b_cells", &GridSpec::b_cells)
      .def_readonly("i_cells", &GridSpec::i_cells)
      .def_readonly("j_cells", &GridSpec::j_cells)
      .def("measurement_center", [](const GridSpec& g, int k) {
        const Point p = g.measurement_center(k);
        return py::make_tuple(p.x, p.y);
      })
      .def("source_center", [](const GridSpec& g, int k) {
        const Point p = g.source_center(k);
        return py::make_tuple(p.x, p.y);
      });

  py::class_<PlumeParams>(m, "PlumeParams")
      .def(py::init([](const std::string& kind, double strength, double length_scale, double wind_x, double wind_y,
                       double sigma0, double spread_rate, double noise_sigma) {
             PlumeParams p;
             if (kind == "blob" || kind == "isotropic-blob") {
               p.kind = PlumeKind::IsotropicBlob;
             } else if (kind == "advected" || kind == "advected-plume") {
               p.kind = PlumeKind::AdvectedPlume;
             } else {
               throw ConfigError("plume kind must be 'isotropic-blob' (or 'blob') or 'advected-plume' (or 'advected')");
             }
             p.strength = strength;
             p.length_scale = length_scale;
             p.wind_x = wind_x;
             p.wind_y = wind_y;
             p.sigma0 = sigma0;
             p.spread_rate = spread_rate;
             p.noise_sigma = noise_sigma;
             p.validate();
             return p;
           }),
           py::arg("kind") = "blob", py::arg("strength") = 1.0, py::arg("length_scale") = 1.0,
           py::arg("wind_x") = 1.0, py::arg("wind_y") = 0.0, py::arg("sigma0") = 1.0, py::arg("spread_rate") = 0.0,
           py::arg("noise_sigma") = 0.1)
      .def_readonly("noise_sigma", &PlumeParams::noise_sigma);

  m.def(
      "concentration",
      [](std::pair<double, double> loc, std::pair<double, double> source, const PlumeParams& p) {
        return concentration({loc.first, loc.second}, {source.first, source.second}, p);
      },
      py::arg("loc"), py::arg("source"), py::arg("params"));
  m.def("snr_area_fraction", &snr_area_fraction, py::arg("params"), py::arg("grid"), py::arg("threshold") = 1.0);

  py::class_<SourcePosterior>(m, "SourcePosterior")
      .def_static("uniform", &SourcePosterior::uniform, py::arg("grid"))
      .def_static(
          "from_weights",
          [](const GridSpec& g, const std::vector<double>& w) { return SourcePosterior::from_weights(g, w); },
          py::arg("grid"), py::arg("weights"))
      .def_property_readonly("grid", &SourcePosterior::grid)
      .def("probabilities", [](const SourcePosterior& p) {
        return to_image(p.probabilities(), p.grid().i_cells, p.grid().j_cells);
      })
      .def("log_probs", [](const SourcePosterior& p) {
        return to_array(std::vector<double>(p.log_probs().begin(), p.log_probs().end()));
      });

  m.def(
      "posterior_update",
      [](const SourcePosterior& post, const std::vector<std::tuple<double, double, double>>& measurements,
         const PlumeParams& p) { return posterior_update(post, to_records(measurements), p); },
      py::arg("posterior"), py::arg("measurements"), py::arg("params"),
      "Update with a list of (x, y, m) measurements.");
  m.def("info_gain_bits", &info_gain_bits, py::arg("posterior"), py::arg("reference"));
  m.def(
      "map_estimate",
      [](const SourcePosterior& post) {
        const MapEstimate e = map_estimate(post);
        return py::make_tuple(e.cell, py::make_tuple(e.location.x, e.location.y));
      },
      py::arg("posterior"));
  m.def("hpd_region", &hpd_region, py::arg("posterior"), py::arg("mass") = 0.95);

  py::class_<CostModel>(m, "CostModel")
      .def(py::init([](double overhead, double quad_coeff) {
             CostModel c{overhead, quad_coeff};
             c.validate();
             return c;
           }),
           py::arg("overhead") = 1.0, py::arg("quad_coeff") = 0.01)
      .def_readonly("overhead", &CostModel::overhead)
      .def_readonly("quad_coeff", &CostModel::quad_coeff);

  m.def(
      "score_map",
      [](const SourcePosterior& post, const SourcePosterior& reference, const PlumeParams& p,
         const std::string& tier, int nodes) {
        const Planner planner(post.grid(), p, parse_tier(tier), {nodes});
        const ScoreMap s = planner.score(post, reference);
        return to_image(s.values, post.grid().a_cells, post.grid().b_cells);
      },
      py::arg("posterior"), py::arg("reference"), py::arg("params"), py::arg("tier") = "snr-fft",
      py::arg("quadrature_nodes") = 16,
      "Score of every measurement cell under the given planner tier.");
  m.def(
      "select_next",
      [](const SourcePosterior& post, const SourcePosterior& reference, const PlumeParams& p, const CostModel& cm,
         std::pair<double, double> position, const std::string& tier) {
        const Planner planner(post.grid(), p, parse_tier(tier));
        const Point next = select_next(planner.score(post, reference), cm, {position.first, position.second});
        return py::make_tuple(next.x, next.y);
      },
      py::arg("posterior"), py::arg("reference"), py::arg("params"), py::arg("cost"), py::arg("position"),
      py::arg("tier") = "snr-fft");
  m.def(
      "eig_exact",
      [](const SourcePosterior& post, const SourcePosterior& reference, std::pair<double, double> candidate,
         const PlumeParams& p, int nodes) {
        return eig_exact(post, reference, {candidate.first, candidate.second}, p, {nodes});
      },
      py::arg("posterior"), py::arg("reference"), py::arg("candidate"), py::arg("params"),
      py::arg("quadrature_nodes") = 16);

  m.def(
      "run_episode",
      [](const std::filesystem::path& config, std::uint64_t seed, const std::string& policy) {
        const RunConfig rc = load_config(config);
        const SimConfig sc = rc.sim_config(seed, parse_policy(policy));
        EpisodeLog log;
        {
          py::gil_scoped_release release;
          log = run_episode(sc);
        }
        return episode_dict(log);
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("policy") = "info",
      "Run one swarm episode from a JSON config file.");
  m.def(
      "train",
      [](const std::filesystem::path& config, const std::string& mode, std::uint64_t seed) {
        const RunConfig rc = load_config(config);
        rl::TrainResult r;
        {
          py::gil_scoped_release release;
          r = rl::train(rc.train, rl::parse_mode(mode), seed);
        }
        py::dict d;
        d["mode"] = std::string(rl::to_string(r.mode));
        d["seed"] = r.seed;
        py::list rewards, smoothed;
        for (const auto& v : r.rewards) rewards.append(to_array(v));
        for (const auto& v : r.smoothed) smoothed.append(to_array(v));
        d["rewards"] = rewards;
        d["smoothed"] = smoothed;
        return d;
      },
      py::arg("config"), py::arg("mode") = "communicating", py::arg("seed") = 0,
      "Train one DQN learner per agent and return the per-step reward curves.");
  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a plumeig subcommand; returns (exit_code, stdout, stderr).");
}
