#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rtsim/config.hpp"
#include "rtsim/ppo.hpp"
#include "rtsim/resource_monitor.hpp"
#include "rtsim/trial_store.hpp"

namespace rtsim {

enum class ProviderKind { kHost, kSynthetic, kNull };

ProviderKind provider_kind_from_string(const std::string& s);
std::string to_string(ProviderKind kind);

/// Busy-loop CPU load at a duty cycle, for correlation studies that need
/// utilization variance on the host. RAII: stops on destruction.
class LoadInjector {
 public:
  explicit LoadInjector(double duty_fraction);
  ~LoadInjector();
  LoadInjector(const LoadInjector&) = delete;
  LoadInjector& operator=(const LoadInjector&) = delete;

 private:
  std::atomic<bool> stop_{false};
  std::thread worker_;
};

// ---------------------------------------------------------------------------
// collect

struct CollectOptions {
  int n_trials = 0;  // 0 = config default
  ProviderKind provider = ProviderKind::kSynthetic;
  double inject_load = 0.0;  // peak duty fraction, ramped linearly across trials
  std::uint64_t seed = 0;
  int workers = 1;
  double sampling_period_s = 0.1;
};

/// One repeated trial under the constant reference policy. Exposed so tests
/// and studies can build ensembles without going through the filesystem.
TrialRecord run_reference_trial(const Config& cfg, const TimestepModel& timestep, int steps,
                                const std::string& trial_id, std::uint64_t seed, double load_duty,
                                ResourceProvider* provider, double sampling_period_s);

/// Runs the reference policy n_trials times and writes one trial log each
/// under out_dir/trials. Existing trial ids are skipped, so partial runs
/// resume. Returns the number of freshly written trials.
int run_collect(const Config& cfg, const CollectOptions& opt,
                const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::vector<std::string> channels;           // empty = every trajectory channel
  std::vector<std::string> resource_channels;  // empty = every resource channel present
  bool plots = false;
};

struct AnalyzeOutput {
  std::map<std::string, StochasticityReport> reports;  // per signal channel
  std::vector<CorrelationRow> correlations;
};

AnalyzeOutput run_analyze(const std::filesystem::path& run_dir, const AnalyzeOptions& opt);

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  AgentTag variant = AgentTag::kNaP;
  double jitter_cv = 0.1;           // stochastic-timestep variants only
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  double baseline_time_s = 0.0;     // 0 = this run is its own baseline
  int checkpoint_every = 0;         // 0 = final checkpoint only
  bool resume = false;
  bool real_time = false;           // pace episodes on the wall clock
  bool plots = false;
};

TrainingMetrics run_train(const Config& cfg, const TrainOptions& opt,
                          const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  int n_trials = 500;
  std::string preset = "matched";  // "matched" or "sim2real"
  double jitter_cv = 0.1;          // sim2real preset
  std::uint64_t seed = 0;
  int workers = 1;
  bool plots = false;
};

struct EvalReport {
  double success_rate = 0.0;  // percent
  int n_success = 0;
  int n_total = 0;
  std::vector<double> ultimate_errors;          // per trial
  std::vector<double> error_mean_per_step;      // over trials, short runs padded
  std::vector<double> error_sigma_per_step;
};

EvalReport evaluate_policy(const GaussianPolicy& policy, const ArmModel& arm,
                           const TimestepModel& timestep, const EnvConfig& env_cfg, int n_trials,
                           std::uint64_t seed, int workers = 1);

EvalReport run_eval(const Config& cfg, const std::filesystem::path& checkpoint_file,
                    const EvalOptions& opt, const std::filesystem::path& out_dir);

// ---------------------------------------------------------------------------
// report

/// Merges training metrics and eval summaries of several runs into one
/// comparison table, sorted by success rate (descending). Missing inputs are
/// reported by path.
void run_report(const std::vector<std::filesystem::path>& run_dirs,
                const std::filesystem::path& out_dir, bool plots = false);

}  // namespace rtsim
