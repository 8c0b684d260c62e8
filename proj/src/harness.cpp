#include "rtsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rtsim/checkpoint.hpp"
#include "rtsim/svg.hpp"

namespace rtsim {

using nlohmann::json;

namespace {

constexpr char kToolVersion[] = "0.1.0";
const std::vector<std::string> kResourceChannelNames = {"cpu_pct", "mem_pct", "gpu_pct"};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + 0x51a299b9be821a01ull * (index + 1));
}

bool is_resource_channel(const std::string& name) {
  return std::find(kResourceChannelNames.begin(), kResourceChannelNames.end(), name) !=
         kResourceChannelNames.end();
}

std::vector<double> stretch_to(const std::vector<double>& src, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (src.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i * src.size() / n];
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_manifest(const std::filesystem::path& run_dir, const std::string& command,
                    const Config& cfg, std::uint64_t seed, const json& extra) {
  const std::string cfg_text = config_to_json_text(cfg);
  json m;
  m["tool"] = "rtsim";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = json::parse(cfg_text);
  m["config_hash"] = config_hash(cfg_text);
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::filesystem::create_directories(run_dir);
  std::ofstream out(manifest_path(run_dir));
  if (!out) throw std::runtime_error("cannot write " + manifest_path(run_dir).string());
  out << m.dump(2) << '\n';
}

void run_parallel(int n_items, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n_items));
  if (workers == 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n_items; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ProviderKind provider_kind_from_string(const std::string& s) {
  if (s == "host") return ProviderKind::kHost;
  if (s == "synthetic") return ProviderKind::kSynthetic;
  if (s == "null" || s == "none") return ProviderKind::kNull;
  throw std::invalid_argument("unknown provider '" + s + "'");
}

std::string to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kHost: return "host";
    case ProviderKind::kSynthetic: return "synthetic";
    case ProviderKind::kNull: return "null";
  }
  return "null";
}

LoadInjector::LoadInjector(double duty_fraction) {
  const double duty = std::clamp(duty_fraction, 0.0, 1.0);
  if (duty <= 0.0) return;
  worker_ = std::thread([this, duty] {
    using clock = std::chrono::steady_clock;
    const auto window = std::chrono::milliseconds(10);
    const auto busy_span = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double, std::milli>(10.0 * duty));
    while (!stop_.load(std::memory_order_relaxed)) {
      const auto start = clock::now();
      const auto busy_until = start + busy_span;
      volatile double sink = 0.0;
      while (clock::now() < busy_until) sink = sink + 1.0;
      std::this_thread::sleep_until(start + window);
    }
  });
}

LoadInjector::~LoadInjector() {
  stop_.store(true);
  if (worker_.joinable()) worker_.join();
}

// ---------------------------------------------------------------------------
// collect

TrialRecord run_reference_trial(const Config& cfg, const TimestepModel& timestep, int steps,
                                const std::string& trial_id, std::uint64_t seed, double load_duty,
                                ResourceProvider* provider, double sampling_period_s) {
  if (steps < 1) throw std::invalid_argument("run_reference_trial: steps must be >= 1");

  // The reference run is a rigid command script: disable the task's own
  // termination so every trial has exactly `steps` aligned samples.
  EnvConfig env_cfg = cfg.env;
  env_cfg.epsilon = 1e-300;
  env_cfg.max_steps = steps + 1;
  env_cfg.obs_noise_fraction = 0.0;

  ReachEnv env(cfg.arm, timestep, env_cfg, seed);
  if (load_duty > 0.0) env.set_load(load_duty);
  const bool paced = timestep.variant == TimestepVariant::kWallClock;
  const auto pace = std::chrono::duration<double>(timestep.nominal_dt);

  std::optional<SamplingHandle> sampler;
  if (provider)
    sampler = start_sampling(std::shared_ptr<ResourceProvider>(provider, [](ResourceProvider*) {}),
                             sampling_period_s);

  const std::size_t n = static_cast<std::size_t>(steps);
  std::vector<std::vector<double>> traj(10);
  for (auto& c : traj) c.reserve(n);

  env.reset();
  for (int t = 0; t < steps; ++t) {
    const StepResult sr = env.step(heuristic_p2p_policy(t));
    const Observation& o = sr.obs;
    traj[0].push_back(env.last_dt());
    traj[1].push_back(o.theta[0]);
    traj[2].push_back(o.theta[1]);
    traj[3].push_back(o.theta[2]);
    traj[4].push_back(o.velocity[0]);
    traj[5].push_back(o.velocity[1]);
    traj[6].push_back(o.velocity[2]);
    traj[7].push_back(o.effector.x);
    traj[8].push_back(o.effector.y);
    traj[9].push_back(o.effector.z);
    if (paced) std::this_thread::sleep_for(pace);
  }

  const double rate = 1.0 / timestep.nominal_dt;
  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.tag = "p2p/" + to_string(timestep.variant);
  rec.seed = seed;
  rec.config_hash = config_hash(config_to_json_text(cfg));
  const char* names[10] = {"dt", "q1", "q2", "q3", "v1", "v2", "v3", "ee_x", "ee_y", "ee_z"};
  for (int c = 0; c < 10; ++c)
    rec.channels.emplace(names[c], TrialSeries{names[c], std::move(traj[c]), rate});

  if (sampler) {
    auto channels = sampler->stop();
    // Scripted providers are drained so traces never depend on how fast the
    // trial happened to run.
    if (auto* synth = dynamic_cast<SyntheticProvider*>(provider)) {
      std::vector<ResourceSample> rest;
      drain_provider(*synth, rest);
      for (const auto& s : rest) {
        channels["cpu_pct"].values.push_back(s.cpu);
        channels["mem_pct"].values.push_back(s.memory);
      }
    }
    for (auto& [name, series] : channels) {
      if (series.values.empty() && provider) {
        if (auto s = provider->sample())
          series.values.push_back(name == "mem_pct" ? s->memory : s->cpu);
      }
      if (series.values.empty()) continue;
      // Hold-resample onto the step timeline so every channel shares it.
      TrialSeries aligned{name, stretch_to(series.values, n), rate};
      rec.channels.emplace(name, std::move(aligned));
    }
  }
  return rec;
}

int run_collect(const Config& cfg, const CollectOptions& opt,
                const std::filesystem::path& out_dir) {
  cfg.validate();
  const int n_trials = opt.n_trials > 0 ? opt.n_trials : cfg.collect.trials;
  const int steps = cfg.collect.steps();

  TimestepModel ts = cfg.timestep;
  ts.nominal_dt = 1.0 / cfg.collect.rate_hz;
  ts.validate();

  std::filesystem::create_directories(trials_dir(out_dir));
  json extra;
  extra["n_trials"] = n_trials;
  extra["steps"] = steps;
  extra["provider"] = to_string(opt.provider);
  extra["inject_load"] = opt.inject_load;
  extra["timestep_variant"] = to_string(ts.variant);
  write_manifest(out_dir, "collect", cfg, opt.seed, extra);

  std::atomic<int> written{0};
  run_parallel(n_trials, opt.workers, [&](int j) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%04d", j);
    const std::filesystem::path path = trials_dir(out_dir) / (std::string(name) + ".log");
    if (std::filesystem::exists(path)) return;  // resume: skip finished trials

    const double duty =
        opt.inject_load > 0.0 && n_trials > 1
            ? opt.inject_load * static_cast<double>(j) / static_cast<double>(n_trials - 1)
            : (opt.inject_load > 0.0 ? opt.inject_load : 0.0);

    std::unique_ptr<ResourceProvider> provider;
    std::unique_ptr<LoadInjector> load;
    switch (opt.provider) {
      case ProviderKind::kSynthetic: {
        // Constant per-trial script; the level tracks the injected load so
        // hermetic studies still see utilization variance across trials.
        const double level = opt.inject_load > 0.0 ? 100.0 * duty : 50.0;
        provider = std::make_unique<SyntheticProvider>(std::vector<double>(8, level));
        break;
      }
      case ProviderKind::kHost:
        provider = std::make_unique<HostProvider>();
        if (duty > 0.0) load = std::make_unique<LoadInjector>(duty);
        break;
      case ProviderKind::kNull:
        break;
    }

    TrialRecord rec = run_reference_trial(cfg, ts, steps, name, trial_seed(opt.seed, j), duty,
                                          provider.get(), opt.sampling_period_s);
    write_trial(rec, path);
    ++written;
  });
  return written.load();
}

// ---------------------------------------------------------------------------
// analyze

namespace {

CorrelationRow correlate_pair(const std::string& sig, const std::string& res,
                              const std::vector<double>& x, const std::vector<double>& y) {
  CorrelationRow row;
  row.signal_channel = sig;
  row.resource_channel = res;
  row.result.n_df = static_cast<int>(x.size()) - 2;
  try {
    row.result = correlate(x, y);
    row.significant = row.result.p_value < 0.05;
  } catch (const std::invalid_argument&) {
    // Constant input (e.g. deterministic trials): correlation undefined.
    row.result.r = std::nan("");
    row.result.t_score = std::nan("");
    row.result.p_value = std::nan("");
    row.significant = false;
  }
  return row;
}

}  // namespace

AnalyzeOutput run_analyze(const std::filesystem::path& run_dir, const AnalyzeOptions& opt) {
  const std::filesystem::path tdir = trials_dir(run_dir);
  if (!std::filesystem::is_directory(tdir))
    throw std::runtime_error("analyze: no trials directory under " + run_dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(tdir))
    if (entry.is_regular_file() && entry.path().extension() == ".log")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("analyze: no trial logs in " + tdir.string());

  std::vector<TrialRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_trial(f));

  std::vector<std::string> signal_channels = opt.channels;
  std::vector<std::string> resource_channels = opt.resource_channels;
  if (signal_channels.empty())
    for (const auto& [name, s] : records.front().channels)
      if (!is_resource_channel(name)) signal_channels.push_back(name);
  if (resource_channels.empty())
    for (const auto& [name, s] : records.front().channels)
      if (is_resource_channel(name)) resource_channels.push_back(name);

  AnalyzeOutput out;
  std::map<std::string, std::vector<double>> delta_table;

  std::ofstream delta_csv(run_dir / "delta_summary.csv");
  delta_csv << "channel,mean_delta\n";

  for (const std::string& ch : signal_channels) {
    std::vector<TrialSeries> trials;
    trials.reserve(records.size());
    for (const TrialRecord& rec : records) {
      auto it = rec.channels.find(ch);
      if (it == rec.channels.end())
        throw std::runtime_error("analyze: trial '" + rec.trial_id + "' lacks channel '" + ch +
                                 "'");
      trials.push_back(it->second);
    }
    Ensemble ensemble(std::move(trials));
    StochasticityReport rep = stochasticity_report(ensemble);

    std::ofstream band(run_dir / ("band_" + ch + ".csv"));
    band << "step,time_s,mean,sigma\n";
    const double dt = 1.0 / ensemble.sample_rate();
    for (std::size_t i = 0; i < rep.mean_signal.size(); ++i)
      band << i << ',' << fmt17(static_cast<double>(i) * dt) << ',' << fmt17(rep.mean_signal[i])
           << ',' << fmt17(rep.sigma_band[i]) << '\n';

    // Welch PSD averaged over trials.
    PsdResult avg;
    for (std::size_t j = 0; j < ensemble.trial_count(); ++j) {
      PsdResult p = psd(ensemble.trials()[j]);
      if (j == 0) {
        avg = std::move(p);
      } else {
        for (std::size_t k = 0; k < avg.power.size(); ++k) avg.power[k] += p.power[k];
      }
    }
    for (double& p : avg.power) p /= static_cast<double>(ensemble.trial_count());
    std::ofstream psd_csv(run_dir / ("psd_" + ch + ".csv"));
    psd_csv << "freq_hz,power\n";
    for (std::size_t k = 0; k < avg.freqs.size(); ++k)
      psd_csv << fmt17(avg.freqs[k]) << ',' << fmt17(avg.power[k]) << '\n';

    if (opt.plots) {
      std::vector<double> steps(rep.mean_signal.size());
      std::iota(steps.begin(), steps.end(), 0.0);
      std::vector<double> lo(rep.mean_signal.size()), hi(rep.mean_signal.size());
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = rep.mean_signal[i] - rep.sigma_band[i];
        hi[i] = rep.mean_signal[i] + rep.sigma_band[i];
      }
      write_line_chart(run_dir / ("band_" + ch + ".svg"), ch + " mean and deviation band", "step",
                       ch,
                       {{"mean", steps, rep.mean_signal},
                        {"mean-sigma", steps, lo},
                        {"mean+sigma", steps, hi}});
      write_line_chart(run_dir / ("psd_" + ch + ".svg"), ch + " power spectral density",
                       "frequency [Hz]", "power", {{"psd", avg.freqs, avg.power}});
    }

    delta_csv << ch << ',' << fmt17(rep.mean_delta) << '\n';
    delta_table.emplace(ch, rep.per_trial_delta);
    out.reports.emplace(ch, std::move(rep));
  }

  // Per-trial resource means.
  std::map<std::string, std::vector<double>> resource_table;
  for (const std::string& rch : resource_channels) {
    std::vector<double> means;
    means.reserve(records.size());
    for (const TrialRecord& rec : records) {
      auto it = rec.channels.find(rch);
      if (it == rec.channels.end())
        throw std::runtime_error("analyze: trial '" + rec.trial_id + "' lacks resource channel '" +
                                 rch + "'");
      means.push_back(resource_mean(it->second));
    }
    resource_table.emplace(rch, std::move(means));
  }

  if (!resource_table.empty()) {
    const int n_df = static_cast<int>(records.size()) - 2;
    std::ofstream corr(run_dir / "correlation.csv");
    std::ofstream corr_long(run_dir / "correlation_long.csv");
    corr << "channel";
    for (const auto& [rch, v] : resource_table) corr << ',' << rch;
    corr << ",n_df\n";
    corr_long << "channel,resource,r,t_score,p_value,n_df,significant\n";

    for (const auto& [ch, deltas] : delta_table) {
      corr << ch;
      for (const auto& [rch, means] : resource_table) {
        CorrelationRow row = correlate_pair(ch, rch, deltas, means);
        corr << ',' << fmt3(row.result.r) << " (" << fmt3(row.result.p_value) << ")"
             << (row.significant ? "*" : "");
        corr_long << ch << ',' << rch << ',' << fmt17(row.result.r) << ','
                  << fmt17(row.result.t_score) << ',' << fmt17(row.result.p_value) << ','
                  << row.result.n_df << ',' << (row.significant ? 1 : 0) << '\n';
        out.correlations.push_back(std::move(row));
      }
      corr << ',' << n_df << '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// train

namespace {

std::vector<double> read_curve_rewards(const std::filesystem::path& path, int max_rows) {
  std::vector<double> curve;
  std::ifstream in(path);
  if (!in) return curve;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line) && static_cast<int>(curve.size()) < max_rows) {
    std::istringstream ss(line);
    std::string epoch, reward;
    if (!std::getline(ss, epoch, ',') || !std::getline(ss, reward, ',')) break;
    curve.push_back(std::stod(reward));
  }
  return curve;
}

}  // namespace

TrainingMetrics run_train(const Config& cfg, const TrainOptions& opt,
                          const std::filesystem::path& out_dir) {
  cfg.validate();
  PPOConfig pc = cfg.ppo;
  if (opt.epochs) pc.epochs = *opt.epochs;
  if (opt.seed) pc.seed = *opt.seed;
  pc.validate();

  AgentVariant variant = agent_variant(opt.variant, opt.jitter_cv, cfg.timestep.nominal_dt);
  if (opt.real_time) variant.timestep = wall_clock_timestep(cfg.timestep.nominal_dt);

  std::filesystem::create_directories(checkpoints_dir(out_dir));
  json extra;
  extra["variant"] = to_string(opt.variant);
  extra["jitter_cv"] = opt.jitter_cv;
  extra["epochs"] = pc.epochs;
  write_manifest(out_dir, "train", cfg, pc.seed, extra);

  TrainStart start;
  const TrainStart* resume = nullptr;
  const std::filesystem::path latest = checkpoints_dir(out_dir) / "latest.json";
  if (opt.resume && std::filesystem::exists(latest)) {
    Checkpoint ckpt = load_checkpoint(latest);
    start.policy = std::move(ckpt.policy);
    start.value_net = std::move(ckpt.value_net);
    start.completed_epochs = ckpt.epoch;
    start.prior_curve = read_curve_rewards(curve_path(out_dir), ckpt.epoch);
    start.reward_scale = ckpt.reward_scale;
    if (static_cast<int>(start.prior_curve.size()) != ckpt.epoch)
      throw std::runtime_error("train: curve.csv does not cover the checkpointed epochs");
    resume = &start;
  }

  std::ofstream curve_csv;
  if (resume) {
    // Rewrite the retained prefix, then append.
    std::ofstream rewrite(curve_path(out_dir));
    rewrite << "epoch,mean_reward,wall_time_s\n";
    for (std::size_t i = 0; i < start.prior_curve.size(); ++i)
      rewrite << (i + 1) << ',' << fmt17(start.prior_curve[i]) << ",0\n";
    curve_csv.open(curve_path(out_dir), std::ios::app);
  } else {
    curve_csv.open(curve_path(out_dir));
    curve_csv << "epoch,mean_reward,wall_time_s\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  TrainHooks hooks;
  hooks.on_epoch = [&](int epoch, double mean_reward, const TrainResult& state) {
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
    curve_csv << epoch << ',' << fmt17(mean_reward) << ',' << fmt3(el.count()) << '\n';
    curve_csv.flush();
    if (opt.checkpoint_every > 0 && epoch % opt.checkpoint_every == 0 && epoch < pc.epochs) {
      Checkpoint snap{state.policy, state.value_net, epoch, state.reward_scale};
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%06d.json", epoch);
      save_checkpoint(snap, checkpoints_dir(out_dir) / name);
      save_checkpoint(snap, latest);
    }
  };

  TrainResult result = train(variant, pc, cfg.arm, cfg.env, hooks, resume);

  Checkpoint final_ckpt{result.policy, result.value_net, pc.epochs, result.reward_scale};
  save_checkpoint(final_ckpt, checkpoints_dir(out_dir) / "final.json");
  save_checkpoint(final_ckpt, latest);

  const double baseline =
      opt.baseline_time_s > 0.0 ? opt.baseline_time_s : result.wall_time_seconds;
  TrainingMetrics metrics = training_metrics(result.curve, result.wall_time_seconds, baseline);

  std::ofstream mcsv(out_dir / "metrics.csv");
  mcsv << "variant,r_ini,r_ult,t_hlf,r_time,wall_time_s\n";
  mcsv << to_string(opt.variant) << ',' << fmt17(metrics.r_ini) << ',' << fmt17(metrics.r_ult)
       << ',' << fmt17(metrics.t_hlf) << ',' << fmt3(metrics.r_time) << ','
       << fmt3(result.wall_time_seconds) << '\n';

  if (opt.plots) {
    std::vector<double> epochs_axis(result.curve.size());
    std::iota(epochs_axis.begin(), epochs_axis.end(), 1.0);
    write_line_chart(out_dir / "curve.svg",
                     "training curve (" + to_string(opt.variant) + ")", "epoch",
                     "mean episode reward", {{"reward", epochs_axis, result.curve}});
  }
  return metrics;
}

// ---------------------------------------------------------------------------
// eval

EvalReport evaluate_policy(const GaussianPolicy& policy, const ArmModel& arm,
                           const TimestepModel& timestep, const EnvConfig& env_cfg, int n_trials,
                           std::uint64_t seed, int workers) {
  if (n_trials < 1) throw std::invalid_argument("evaluate_policy: n_trials must be >= 1");
  const int horizon = env_cfg.max_steps;

  std::vector<double> ultimate(n_trials, 0.0);
  std::vector<std::vector<double>> error_rows(n_trials);

  run_parallel(n_trials, workers, [&](int j) {
    ReachEnv env(arm, timestep, env_cfg, trial_seed(seed, j));
    Observation obs = env.reset();
    std::vector<double> errors;
    errors.reserve(horizon);
    Eigen::VectorXd x(Observation::kDim);
    bool done = false;
    while (!done && env.step_count() < horizon) {
      const auto flat = obs.flatten();
      x = Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
      const StepResult sr = env.step(Action{policy.mean_action(x)});
      errors.push_back(env.distance_to_goal());
      obs = sr.obs;
      done = sr.done;
    }
    ultimate[j] = errors.back();
    // Hold the last error so the per-step band covers early terminations.
    errors.resize(horizon, errors.back());
    error_rows[j] = std::move(errors);
  });

  EvalReport report;
  report.n_total = n_trials;
  report.ultimate_errors = ultimate;
  for (double e : ultimate)
    if (e < env_cfg.epsilon) ++report.n_success;
  report.success_rate = 100.0 * static_cast<double>(report.n_success) / n_trials;

  report.error_mean_per_step.resize(horizon, 0.0);
  report.error_sigma_per_step.resize(horizon, 0.0);
  for (int i = 0; i < horizon; ++i) {
    double m = 0.0;
    for (int j = 0; j < n_trials; ++j) m += error_rows[j][i];
    m /= n_trials;
    double var = 0.0;
    for (int j = 0; j < n_trials; ++j) {
      const double d = error_rows[j][i] - m;
      var += d * d;
    }
    report.error_mean_per_step[i] = m;
    report.error_sigma_per_step[i] = std::sqrt(var / n_trials);
  }
  return report;
}

EvalReport run_eval(const Config& cfg, const std::filesystem::path& checkpoint_file,
                    const EvalOptions& opt, const std::filesystem::path& out_dir) {
  cfg.validate();
  const Checkpoint ckpt = load_checkpoint(checkpoint_file);

  ArmModel arm = cfg.arm;
  TimestepModel ts = fixed_timestep(cfg.timestep.nominal_dt);
  if (opt.preset == "sim2real") {
    // Hardware-deployment proxy: offset kinematics plus stochastic stepping.
    arm = mismatched_model(cfg.arm);
    ts = jitter_timestep(cfg.timestep.nominal_dt, opt.jitter_cv);
  } else if (opt.preset != "matched") {
    throw std::invalid_argument("eval: unknown preset '" + opt.preset + "'");
  }
  EnvConfig env_cfg = cfg.env;
  env_cfg.obs_noise_fraction = 0.0;

  EvalReport report = evaluate_policy(ckpt.policy, arm, ts, env_cfg, opt.n_trials, opt.seed,
                                      opt.workers);

  std::filesystem::create_directories(out_dir);
  json extra;
  extra["checkpoint"] = checkpoint_file.string();
  extra["preset"] = opt.preset;
  extra["n_trials"] = opt.n_trials;
  if (opt.preset == "sim2real") extra["jitter_cv"] = opt.jitter_cv;
  write_manifest(out_dir, "eval", cfg, opt.seed, extra);

  std::ofstream summary(out_dir / "eval.csv");
  summary << "success_rate,n_success,n_total,median_ult_err,mean_ult_err\n";
  const double mean_err =
      std::accumulate(report.ultimate_errors.begin(), report.ultimate_errors.end(), 0.0) /
      report.n_total;
  summary << fmt3(report.success_rate) << ',' << report.n_success << ',' << report.n_total << ','
          << fmt17(median(report.ultimate_errors)) << ',' << fmt17(mean_err) << '\n';

  std::ofstream errors_csv(out_dir / "eval_errors.csv");
  errors_csv << "trial,ultimate_error,success\n";
  for (int j = 0; j < report.n_total; ++j)
    errors_csv << j << ',' << fmt17(report.ultimate_errors[j]) << ','
               << (report.ultimate_errors[j] < env_cfg.epsilon ? 1 : 0) << '\n';

  std::ofstream band(out_dir / "error_band.csv");
  band << "step,mean,sigma\n";
  for (std::size_t i = 0; i < report.error_mean_per_step.size(); ++i)
    band << (i + 1) << ',' << fmt17(report.error_mean_per_step[i]) << ','
         << fmt17(report.error_sigma_per_step[i]) << '\n';

  if (opt.plots) {
    std::vector<double> steps(report.error_mean_per_step.size());
    std::iota(steps.begin(), steps.end(), 1.0);
    std::vector<double> lo(steps.size()), hi(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
      lo[i] = report.error_mean_per_step[i] - report.error_sigma_per_step[i];
      hi[i] = report.error_mean_per_step[i] + report.error_sigma_per_step[i];
    }
    write_line_chart(out_dir / "error_band.svg", "reaching error over trials", "step",
                     "error [m]",
                     {{"mean", steps, report.error_mean_per_step},
                      {"mean-sigma", steps, lo},
                      {"mean+sigma", steps, hi}});
  }
  return report;
}

// ---------------------------------------------------------------------------
// report

void run_report(const std::vector<std::filesystem::path>& run_dirs,
                const std::filesystem::path& out_dir, bool plots) {
  struct Row {
    std::string variant;
    double r_ini = std::nan(""), r_ult = std::nan(""), t_hlf = std::nan("");
    double wall_time_s = std::nan("");
    double r_time = std::nan("");
    double success_rate = std::nan("");
    double median_err = std::nan("");
  };

  std::vector<std::string> missing;
  std::vector<Row> rows;
  for (const auto& dir : run_dirs) {
    const std::filesystem::path metrics = dir / "metrics.csv";
    if (!std::filesystem::exists(metrics)) {
      missing.push_back(metrics.string());
      continue;
    }
    Row row;
    {
      std::ifstream in(metrics);
      std::string line;
      std::getline(in, line);  // header
      if (!std::getline(in, line)) {
        missing.push_back(metrics.string());
        continue;
      }
      std::istringstream ss(line);
      std::string cell;
      std::getline(ss, row.variant, ',');
      std::getline(ss, cell, ',');
      row.r_ini = std::stod(cell);
      std::getline(ss, cell, ',');
      row.r_ult = std::stod(cell);
      std::getline(ss, cell, ',');
      row.t_hlf = std::stod(cell);
      std::getline(ss, cell, ',');
      row.r_time = std::stod(cell);
      if (std::getline(ss, cell, ',')) row.wall_time_s = std::stod(cell);
    }
    for (const auto& eval_csv : {dir / "eval.csv", dir / "eval" / "eval.csv"}) {
      if (!std::filesystem::exists(eval_csv)) continue;
      std::ifstream in(eval_csv);
      std::string line;
      std::getline(in, line);
      if (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        row.success_rate = std::stod(cell);
        std::getline(ss, cell, ',');  // n_success
        std::getline(ss, cell, ',');  // n_total
        std::getline(ss, cell, ',');
        row.median_err = std::stod(cell);
      }
      break;
    }
    rows.push_back(std::move(row));
  }
  if (!missing.empty()) {
    std::string msg = "report: missing run outputs:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }

  // Recompute the wall-time ratio against the precise-model baseline run
  // when it is part of the report.
  for (const Row& r : rows) {
    if (r.variant == "na_p" && std::isfinite(r.wall_time_s) && r.wall_time_s > 0.0) {
      for (Row& other : rows)
        if (std::isfinite(other.wall_time_s)) other.r_time = other.wall_time_s / r.wall_time_s;
      break;
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const double sa = std::isfinite(a.success_rate) ? a.success_rate : -1.0;
    const double sb = std::isfinite(b.success_rate) ? b.success_rate : -1.0;
    return sa > sb;
  });

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "comparison.csv");
  out << "variant,r_ini,r_ult,t_hlf,r_time,success_rate,median_ult_err\n";
  for (const Row& r : rows)
    out << r.variant << ',' << fmt17(r.r_ini) << ',' << fmt17(r.r_ult) << ',' << fmt3(r.t_hlf)
        << ',' << fmt3(r.r_time) << ',' << fmt3(r.success_rate) << ',' << fmt17(r.median_err)
        << '\n';

  if (plots) {
    std::vector<std::string> labels;
    std::vector<double> rates, errs;
    for (const Row& r : rows) {
      labels.push_back(r.variant);
      rates.push_back(std::isfinite(r.success_rate) ? r.success_rate : 0.0);
      errs.push_back(std::isfinite(r.median_err) ? r.median_err : 0.0);
    }
    write_bar_chart(out_dir / "success_rate.svg", "success rate [%]", labels, rates);
    write_bar_chart(out_dir / "ultimate_error.svg", "median ultimate error [m]", labels, errs);
  }
}

}  // namespace rtsim
