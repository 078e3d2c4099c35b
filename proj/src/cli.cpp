#include "plumeig/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "plumeig/config.hpp"
#include "plumeig/errors.hpp"
#include "plumeig/io.hpp"

namespace plumeig::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  const char* env = std::getenv("PLUMEIG_LOG_LEVEL");
  if (env == nullptr) return LogLevel::Warn;
  const std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log(std::ostream& err, LogLevel level, const std::string& msg) {
  static std::mutex mu;
  if (level > log_level()) return;
  std::lock_guard lock(mu);
  err << msg << '\n';
}

struct CommonOptions {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  bool force = false;
  int threads = 1;
};

/// Runs fn(k) for k in [0, n) on up to `threads` workers. The first failure
/// (lowest job index) is rethrown after all workers finish.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  fn(out);
}

RunConfig load_with_overrides(const CommonOptions& opts) {
  RunConfig config = load_config(opts.config_path);
  if (!opts.seeds.empty()) config.seeds = opts.seeds;
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  return config;
}

/// Refuses to clobber a non-empty output directory unless forced.
void prepare_output(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
    throw ConfigError("output directory '" + dir.string() + "' is not empty; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const char* policy_color(MotionPolicy p) {
  switch (p) {
    case MotionPolicy::Info: return "#1f77b4";
    case MotionPolicy::CostOnly: return "#ff7f0e";
    case MotionPolicy::Random: return "#2ca02c";
  }
  return "black";
}

const char* mode_color(rl::TrainMode m) { return m == rl::TrainMode::Individual ? "#d62728" : "#1f77b4"; }

std::vector<double> mean_over(const std::vector<std::vector<double>>& curves) {
  std::size_t len = 0;
  for (const auto& c : curves) len = std::max(len, c.size());
  std::vector<double> mean(len, 0.0);
  std::vector<int> count(len, 0);
  for (const auto& c : curves)
    for (std::size_t t = 0; t < c.size(); ++t) {
      mean[t] += c[t];
      ++count[t];
    }
  for (std::size_t t = 0; t < len; ++t) mean[t] /= std::max(1, count[t]);
  return mean;
}

io::Series as_series(std::string label, std::string color, const std::vector<double>& y) {
  io::Series s{std::move(label), std::move(color), {}, y};
  s.x.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) s.x[t] = static_cast<double>(t);
  return s;
}

std::vector<fs::path> sorted_matches(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind(prefix, 0) == 0 && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void plot_ig_curves(const fs::path& dir) {
  std::vector<io::Series> series;
  for (MotionPolicy p : {MotionPolicy::Info, MotionPolicy::CostOnly, MotionPolicy::Random}) {
    std::vector<std::vector<double>> curves;
    for (const fs::path& f : sorted_matches(dir / std::string(to_string(p)), "episode_", ".csv")) {
      std::ifstream in(f);
      curves.push_back(io::ig_series_from_rows(io::read_episode_csv(in)));
    }
    if (!curves.empty()) series.push_back(as_series(std::string(to_string(p)), policy_color(p), mean_over(curves)));
  }
  if (series.empty()) return;
  write_file(dir / "ig_curves.svg", [&](std::ostream& out) {
    io::write_line_chart_svg(out, "Information gain vs. step (mean over seeds)", "step", "IG (bits)", series);
  });
}

bool plot_reward_comparison(const fs::path& dir) {
  std::vector<io::Series> series;
  for (rl::TrainMode m : {rl::TrainMode::Individual, rl::TrainMode::Communicating}) {
    std::vector<std::vector<double>> per_seed;
    for (const fs::path& f : sorted_matches(dir / std::string(rl::to_string(m)), "curves_", ".csv")) {
      std::ifstream in(f);
      per_seed.push_back(mean_over(io::read_curves_csv(in)));
    }
    if (per_seed.empty()) return false;
    series.push_back(as_series(std::string(rl::to_string(m)), mode_color(m), mean_over(per_seed)));
  }
  write_file(dir / "reward_comparison.svg", [&](std::ostream& out) {
    io::write_line_chart_svg(out, "Smoothed reward per step (mean over agents and seeds)", "step", "reward",
                             series);
  });
  return true;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOptions : CommonOptions {
  std::string policy;
  std::string tier;
  bool dump_posterior = false;
};

int simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig config = load_with_overrides(opts);
  if (!opts.policy.empty()) config.policies = {parse_policy(opts.policy)};
  if (!opts.tier.empty()) config.tier = parse_tier(opts.tier);
  config.validate();

  const GridSpec& g = config.grid;
  const bool uses_planner = std::find(config.policies.begin(), config.policies.end(), MotionPolicy::Info) !=
                            config.policies.end();
  if (uses_planner && config.tier == PlannerTier::Exact && !opts.force) {
    const double work = static_cast<double>(g.measurement_count()) * g.source_count();
    if (work > 64.0 * 64.0 * 32.0 * 32.0) {
      throw ConfigError("exact tier on a " + std::to_string(g.a_cells) + "x" + std::to_string(g.b_cells) +
                        " measurement grid and " + std::to_string(g.i_cells) + "x" + std::to_string(g.j_cells) +
                        " source grid is intractable; pass --force to run anyway");
    }
  }

  const fs::path dir = config.output_dir;
  prepare_output(dir, opts.force);
  write_text(dir / "effective_config.json", to_json(config).dump(2) + "\n");
  for (MotionPolicy p : config.policies) fs::create_directories(dir / std::string(to_string(p)));

  struct Job {
    std::uint64_t seed;
    MotionPolicy policy;
  };
  std::vector<Job> jobs;
  for (MotionPolicy p : config.policies)
    for (std::uint64_t s : config.seeds) jobs.push_back({s, p});

  std::vector<json> summaries(jobs.size());
  std::vector<std::optional<int>> reached(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), opts.threads, [&](int k) {
    const SimConfig sim = config.sim_config(jobs[k].seed, jobs[k].policy);
    log(err, LogLevel::Info,
        "simulate: policy=" + std::string(to_string(jobs[k].policy)) + " seed=" + std::to_string(jobs[k].seed));
    const EpisodeLog episode = run_episode(sim);
    const fs::path pdir = dir / std::string(to_string(jobs[k].policy));
    write_file(pdir / ("episode_" + std::to_string(jobs[k].seed) + ".csv"),
               [&](std::ostream& o) { io::write_episode_csv(o, episode); });
    if (opts.dump_posterior) {
      // Beliefs are shared, so the final posterior is recomputed from the log.
      SourcePosterior post = make_prior(g, config.prior_weights);
      std::vector<MeasurementRecord> records;
      for (const AgentStep& r : episode.rows) records.push_back({r.position, r.m, r.step, r.agent_id});
      post = posterior_update(post, records, config.plume);
      write_file(pdir / ("posterior_" + std::to_string(jobs[k].seed) + ".csv"),
                 [&](std::ostream& o) { io::write_posterior_csv(o, post); });
    }
    summaries[k] = io::episode_summary_json(episode, config.ig_threshold_bits);
    reached[k] = steps_to_ig(episode, config.ig_threshold_bits);
  });

  json by_policy = json::object();
  for (MotionPolicy p : config.policies) {
    std::vector<double> steps;
    std::vector<double> final_ig;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      if (jobs[k].policy != p) continue;
      steps.push_back(reached[k] ? *reached[k] : config.n_steps + 1);
      final_ig.push_back(summaries[k].at("final_ig_bits").get<double>());
    }
    by_policy[std::string(to_string(p))] = {{"median_steps_to_ig", median(steps)},
                                            {"median_final_ig_bits", median(final_ig)}};
  }
  const json summary{{"ig_threshold_bits", config.ig_threshold_bits},
                     {"snr_area_fraction", snr_area_fraction(config.plume, g, 1.0)},
                     {"max_ig_bits", std::log2(static_cast<double>(g.source_count()))},
                     {"policies", by_policy},
                     {"episodes", summaries}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  plot_ig_curves(dir);
  out << "simulate: wrote " << jobs.size() << " episodes to " << dir.string() << '\n';
  return kExitOk;
}

// ---- train ------------------------------------------------------------------

struct TrainOptions : CommonOptions {
  std::string mode;
};

double mean_of_range(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  double s = 0.0;
  for (std::size_t t = begin; t < end; ++t) s += v[t];
  return s / static_cast<double>(end - begin);
}

int train_cmd(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig config = load_with_overrides(opts);
  if (!opts.mode.empty()) config.modes = {rl::parse_mode(opts.mode)};
  config.validate();

  const fs::path dir = config.output_dir;
  prepare_output(dir, opts.force);
  write_text(dir / "effective_config.json", to_json(config).dump(2) + "\n");
  for (rl::TrainMode m : config.modes) fs::create_directories(dir / std::string(rl::to_string(m)));

  struct Job {
    std::uint64_t seed;
    rl::TrainMode mode;
  };
  std::vector<Job> jobs;
  for (rl::TrainMode m : config.modes)
    for (std::uint64_t s : config.seeds) jobs.push_back({s, m});

  std::vector<json> runs(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), opts.threads, [&](int k) {
    const Job& job = jobs[k];
    log(err, LogLevel::Info,
        "train: mode=" + std::string(rl::to_string(job.mode)) + " seed=" + std::to_string(job.seed));
    const rl::TrainResult result = rl::train(config.train, job.mode, job.seed);
    const fs::path mdir = dir / std::string(rl::to_string(job.mode));
    const std::string stem = std::to_string(job.seed);
    write_file(mdir / ("curves_" + stem + ".csv"), [&](std::ostream& o) { io::write_curves_csv(o, result); });
    json checkpoints = json::array();
    for (std::size_t a = 0; a < result.nets.size(); ++a) {
      const std::string name = "checkpoint_" + stem + "_agent" + std::to_string(a) + ".json";
      write_text(mdir / name, io::checkpoint_json(result.nets[a]).dump() + "\n");
      checkpoints.push_back((fs::path(std::string(rl::to_string(job.mode))) / name).generic_string());
    }
    const std::vector<double> mean_curve = mean_over(result.smoothed);
    const std::size_t n = mean_curve.size();
    runs[k] = {{"mode", rl::to_string(job.mode)},
               {"seed", job.seed},
               {"steps", n},
               {"first_quartile_mean_reward", mean_of_range(mean_curve, 0, n / 4)},
               {"final_quartile_mean_reward", mean_of_range(mean_curve, n - n / 4, n)},
               {"action_counts", result.action_counts},
               {"curves", (fs::path(std::string(rl::to_string(job.mode))) / ("curves_" + stem + ".csv")).generic_string()},
               {"checkpoints", checkpoints}};
  });

  write_text(dir / "train_summary.json", json{{"runs", runs}}.dump(2) + "\n");
  plot_reward_comparison(dir);
  out << "train: wrote " << jobs.size() << " runs to " << dir.string() << '\n';
  return kExitOk;
}

// ---- bench ------------------------------------------------------------------

int bench_cmd(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig config = load_with_overrides(opts);
  const fs::path dir = config.output_dir;
  prepare_output(dir, opts.force);

  std::vector<int> sizes = config.bench.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  std::map<int, std::pair<double, double>> timing;
  std::string csv = "size,fft_ms,brute_ms\n";
  for (int n : sizes) {
    const GridSpec grid{0.0, static_cast<double>(n), 0.0, static_cast<double>(n), n, n, n, n};
    Rng rng = make_stream(config.seeds.front(), Stream::Init, static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(grid.source_count());
    for (double& x : w) x = u(rng);
    const SourcePosterior post = SourcePosterior::from_weights(grid, w);
    const SnrKernel kernel = squared_snr_kernel(config.plume, grid);

    double fft_ms = 1e300, brute_ms = 1e300;
    double sink = 0.0;
    for (int r = 0; r < config.bench.repeats; ++r) {
      auto t0 = clock::now();
      sink += snr_score_map_fft(post, kernel, grid).values[0];
      fft_ms = std::min(fft_ms, ms_since(t0));
      t0 = clock::now();
      sink += snr_score_map_bruteforce(post, config.plume).values[0];
      brute_ms = std::min(brute_ms, ms_since(t0));
    }
    log(err, LogLevel::Debug, "bench: checksum " + std::to_string(sink));
    timing[n] = {fft_ms, brute_ms};
    csv += std::to_string(n) + "," + io::format_double(fft_ms) + "," + io::format_double(brute_ms) + "\n";
  }
  write_text(dir / "bench.csv", csv);
  out << csv;

  if (timing.contains(32) && timing.contains(64)) {
    const double fft_growth = timing[64].first / timing[32].first;
    const double brute_growth = timing[64].second / timing[32].second;
    out << "growth 32->64: fft x" << fft_growth << ", brute-force x" << brute_growth << '\n';
    if (!(fft_growth <= 4.5 && brute_growth >= 10.0)) {
      err << "bench: relative-growth check failed (want fft <= 4.5x, brute-force >= 10x)\n";
      return kExitRuntimeFailure;
    }
  }
  return kExitOk;
}

// ---- plot -------------------------------------------------------------------

int plot_cmd(const std::string& out_dir, std::ostream& out) {
  const fs::path dir = out_dir;
  if (!fs::is_directory(dir)) throw ConfigError("plot: '" + dir.string() + "' is not a directory");
  plot_ig_curves(dir);
  const bool compared = plot_reward_comparison(dir);
  out << "plot: regenerated figures in " << dir.string() << (compared ? "" : " (no training comparison)") << '\n';
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->required();
  cmd->add_option("--seed", opts.seeds, "seed (repeatable); overrides the config's seed list");
  cmd->add_option("--out", opts.out_dir, "output directory; overrides the config");
  cmd->add_flag("--force", opts.force, "overwrite a non-empty output directory");
  cmd->add_option("--threads", opts.threads, "worker threads across seeds")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent plume source localization: information-driven planning and hybrid RL", "plumeig"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run the multi-agent exploration episodes");
  add_common(simulate_cmd, sim);
  simulate_cmd->add_option("--policy", sim.policy, "info | cost-only | random (default: all)");
  simulate_cmd->add_option("--tier", sim.tier, "exact | expected-measurement | snr-fft");
  simulate_cmd->add_flag("--posterior", sim.dump_posterior, "also write final posterior snapshots");

  TrainOptions tr;
  CLI::App* train_sub = app.add_subcommand("train", "train per-agent DQNs over the hybrid environment");
  add_common(train_sub, tr);
  train_sub->add_option("--mode", tr.mode, "individual | communicating (default: both)");

  CommonOptions bench;
  CLI::App* bench_sub = app.add_subcommand("bench", "time FFT vs brute-force SNR scoring");
  add_common(bench_sub, bench);

  std::string plot_dir;
  CLI::App* plot_sub = app.add_subcommand("plot", "regenerate SVG figures from CSV outputs");
  plot_sub->add_option("--out", plot_dir, "output directory of a previous run")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  try {
    if (*simulate_cmd) return simulate(sim, out, err);
    if (*train_sub) return train_cmd(tr, out, err);
    if (*bench_sub) return bench_cmd(bench, out, err);
    if (*plot_sub) return plot_cmd(plot_dir, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
  return kExitInvalidConfig;
}

}  // namespace plumeig::cli
