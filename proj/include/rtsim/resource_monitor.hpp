#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rtsim/stats.hpp"

namespace rtsim {

struct ResourceSample {
  double timestamp = 0.0;  // seconds, monotonic
  double cpu = 0.0;        // percent [0, 100]
  double memory = 0.0;     // percent [0, 100]
  std::optional<double> gpu;  // absent when no device telemetry exists
};

/// Source of utilization readings. Implementations must tolerate being
/// polled from the sampler thread.
class ResourceProvider {
 public:
  virtual ~ResourceProvider() = default;
  /// One reading, or nullopt when the provider has nothing (more) to say.
  virtual std::optional<ResourceSample> sample() = 0;
};

/// Replays a fixed script, one sample per poll, then runs dry. Deterministic;
/// all statistics tests use it.
class SyntheticProvider : public ResourceProvider {
 public:
  SyntheticProvider(std::vector<double> cpu_script, std::vector<double> memory_script = {});
  std::optional<ResourceSample> sample() override;
  std::size_t script_length() const { return cpu_script_.size(); }
  void rewind() { index_ = 0; }

 private:
  std::vector<double> cpu_script_;
  std::vector<double> memory_script_;
  std::size_t index_ = 0;
};

/// Never produces a sample.
class NullProvider : public ResourceProvider {
 public:
  std::optional<ResourceSample> sample() override { return std::nullopt; }
};

/// Live host readings from /proc/stat and /proc/meminfo.
class HostProvider : public ResourceProvider {
 public:
  HostProvider();  // throws std::runtime_error when host metrics are unreadable
  std::optional<ResourceSample> sample() override;

 private:
  unsigned long long last_busy_ = 0;
  unsigned long long last_total_ = 0;
};

/// Background sampler. start() launches a thread polling the provider on the
/// given cadence; stop() joins it and hands the trace over. Single producer,
/// post-hoc single consumer; the handle is consumed by stop().
class SamplingHandle {
 public:
  SamplingHandle(SamplingHandle&&) = default;
  SamplingHandle& operator=(SamplingHandle&&) = default;
  ~SamplingHandle();

  /// One TrialSeries per available channel (cpu_pct, mem_pct, gpu_pct).
  /// A provider that never produced samples yields empty series.
  std::map<std::string, TrialSeries> stop();

  bool active() const { return state_ != nullptr; }

 private:
  friend SamplingHandle start_sampling(std::shared_ptr<ResourceProvider>, double);
  struct State {
    std::shared_ptr<ResourceProvider> provider;
    double period = 0.0;
    std::thread worker;
    std::atomic<bool> stop_flag{false};
    std::mutex mutex;
    std::vector<ResourceSample> samples;
  };
  explicit SamplingHandle(std::unique_ptr<State> state) : state_(std::move(state)) {}
  std::unique_ptr<State> state_;
};

SamplingHandle start_sampling(std::shared_ptr<ResourceProvider> provider, double period_s);

/// Drains whatever the provider will still emit, without pacing. Used to
/// flush scripted providers so their traces stay duration-independent.
void drain_provider(ResourceProvider& provider, std::vector<ResourceSample>& into,
                    std::size_t max_samples = 1 << 20);

}  // namespace rtsim
