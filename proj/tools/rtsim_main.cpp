#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtsim/harness.hpp"

namespace {

rtsim::Config load_or_default(const std::string& config_file) {
  if (config_file.empty()) return rtsim::Config{};
  return rtsim::load_config(config_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic-timestep simulation, domain-randomized training and ensemble analysis"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  std::string config_file;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
  app.add_option("--config", config_file, "JSON config file")->capture_default_str();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "parallel trial workers")->capture_default_str();

  // collect
  auto* collect = app.add_subcommand("collect", "run repeated reference-policy trials");
  int trials = 0;
  std::string ts_variant;
  double jitter_cv = -1.0;
  double duration = -1.0;
  double rate = -1.0;
  std::string provider = "synthetic";
  double inject_load = 0.0;
  collect->add_option("--trials", trials, "number of trials (default from config)");
  collect->add_option("--timestep", ts_variant, "fixed | wall_clock | jitter");
  collect->add_option("--jitter-cv", jitter_cv, "jitter coefficient of variation");
  collect->add_option("--duration", duration, "trial duration [s]");
  collect->add_option("--rate", rate, "command rate [Hz]");
  collect->add_option("--provider", provider, "host | synthetic | null")->capture_default_str();
  collect->add_option("--inject-load", inject_load,
                      "peak CPU duty fraction, ramped across trials");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "ensemble statistics and correlation study");
  std::string run_dir;
  std::vector<std::string> channels, resources;
  bool plots = false;
  analyze->add_option("--run", run_dir, "collect output directory")->required();
  analyze->add_option("--channels", channels, "signal channels (default: all)")->delimiter(',');
  analyze->add_option("--resources", resources, "resource channels (default: all)")
      ->delimiter(',');
  app.add_flag("--plots", plots, "also write SVG plots");

  // train
  auto* train = app.add_subcommand("train", "train one agent variant");
  std::string variant = "na_p";
  int epochs = 0;
  double train_jitter_cv = 0.1;
  double baseline_time = 0.0;
  int checkpoint_every = 0;
  bool resume = false;
  train->add_option("--variant", variant, "na_p | na_i | kra | kra_is | kora")
      ->capture_default_str();
  train->add_option("--epochs", epochs, "override epoch count");
  train->add_option("--jitter-cv", train_jitter_cv, "timestep CV for the stochastic variant")
      ->capture_default_str();
  train->add_option("--baseline-time", baseline_time,
                    "baseline wall time [s] for the time ratio (default: this run)");
  train->add_option("--checkpoint-every", checkpoint_every, "save a checkpoint every N epochs");
  train->add_flag("--resume", resume, "continue from the latest checkpoint in --out");
  bool real_time = false;
  train->add_flag("--real-time", real_time,
                  "pace episodes on the wall clock (measured-interval stepping)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with the deterministic policy");
  std::string checkpoint;
  int eval_trials = 500;
  std::string preset = "matched";
  double eval_jitter_cv = 0.1;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--trials", eval_trials, "number of test episodes")->capture_default_str();
  eval->add_option("--preset", preset, "matched | sim2real")->capture_default_str();
  eval->add_option("--jitter-cv", eval_jitter_cv, "timestep CV for the sim2real preset")
      ->capture_default_str();

  // report
  auto* report = app.add_subcommand("report", "merge training/eval metrics across runs");
  std::vector<std::string> report_runs;
  report->add_option("runs", report_runs, "run directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const rtsim::Config cfg = [&] {
      rtsim::Config c = load_or_default(config_file);
      if (collect->parsed()) {
        if (duration > 0.0) c.collect.duration_s = duration;
        if (rate > 0.0) c.collect.rate_hz = rate;
        if (!ts_variant.empty())
          c.timestep.variant = rtsim::timestep_variant_from_string(ts_variant);
        if (jitter_cv >= 0.0) c.timestep.jitter_cv = jitter_cv;
      }
      return c;
    }();

    if (collect->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("collect: --out is required");
      rtsim::CollectOptions opt;
      opt.n_trials = trials;
      opt.provider = rtsim::provider_kind_from_string(provider);
      opt.inject_load = inject_load;
      opt.seed = seed;
      opt.workers = workers;
      const int written = rtsim::run_collect(cfg, opt, out_dir);
      std::cout << "collect: wrote " << written << " trial(s) under " << out_dir << "\n";
    } else if (analyze->parsed()) {
      rtsim::AnalyzeOptions opt;
      opt.channels = channels;
      opt.resource_channels = resources;
      opt.plots = plots;
      const rtsim::AnalyzeOutput out = rtsim::run_analyze(run_dir, opt);
      std::cout << "analyze: " << out.reports.size() << " channel(s), " << out.correlations.size()
                << " correlation pair(s) -> " << run_dir << "\n";
    } else if (train->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("train: --out is required");
      rtsim::TrainOptions opt;
      opt.variant = rtsim::agent_tag_from_string(variant);
      opt.jitter_cv = train_jitter_cv;
      if (app.count("--seed") > 0) opt.seed = seed;
      if (epochs > 0) opt.epochs = epochs;
      opt.baseline_time_s = baseline_time;
      opt.checkpoint_every = checkpoint_every;
      opt.resume = resume;
      opt.real_time = real_time;
      opt.plots = plots;
      const rtsim::TrainingMetrics m = rtsim::run_train(cfg, opt, out_dir);
      std::printf("train: %s r_ini=%.6g r_ult=%.6g t_hlf=%.1f%% r_time=%.2f\n", variant.c_str(),
                  m.r_ini, m.r_ult, m.t_hlf, m.r_time);
    } else if (eval->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("eval: --out is required");
      rtsim::EvalOptions opt;
      opt.n_trials = eval_trials;
      opt.preset = preset;
      opt.jitter_cv = eval_jitter_cv;
      opt.seed = seed;
      opt.workers = workers;
      opt.plots = plots;
      const rtsim::EvalReport r = rtsim::run_eval(cfg, checkpoint, opt, out_dir);
      std::printf("eval: success_rate=%.1f%% (%d/%d)\n", r.success_rate, r.n_success, r.n_total);
    } else if (report->parsed()) {
      if (out_dir.empty()) throw std::runtime_error("report: --out is required");
      std::vector<std::filesystem::path> dirs(report_runs.begin(), report_runs.end());
      rtsim::run_report(dirs, out_dir, plots);
      std::cout << "report: wrote " << (std::filesystem::path(out_dir) / "comparison.csv").string()
                << "\n";
    }
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
