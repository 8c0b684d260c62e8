#include "rtsim/resource_monitor.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rtsim {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SyntheticProvider::SyntheticProvider(std::vector<double> cpu_script,
                                     std::vector<double> memory_script)
    : cpu_script_(std::move(cpu_script)), memory_script_(std::move(memory_script)) {
  if (memory_script_.empty()) memory_script_.assign(cpu_script_.size(), 50.0);
  if (memory_script_.size() != cpu_script_.size())
    throw std::invalid_argument("synthetic provider: script lengths differ");
}

std::optional<ResourceSample> SyntheticProvider::sample() {
  if (index_ >= cpu_script_.size()) return std::nullopt;
  ResourceSample s;
  s.timestamp = static_cast<double>(index_);
  s.cpu = cpu_script_[index_];
  s.memory = memory_script_[index_];
  ++index_;
  return s;
}

HostProvider::HostProvider() {
  std::ifstream stat("/proc/stat");
  std::ifstream mem("/proc/meminfo");
  if (!stat || !mem)
    throw std::runtime_error("host provider: /proc/stat or /proc/meminfo unreadable");
  sample();  // prime the cpu delta baseline
}

std::optional<ResourceSample> HostProvider::sample() {
  std::ifstream stat("/proc/stat");
  std::string line;
  if (!stat || !std::getline(stat, line)) return std::nullopt;
  std::istringstream ss(line);
  std::string tag;
  ss >> tag;
  if (tag != "cpu") return std::nullopt;
  unsigned long long v = 0, total = 0, idle_all = 0;
  for (int field = 0; ss >> v; ++field) {
    total += v;
    if (field == 3 || field == 4) idle_all += v;  // idle + iowait
  }
  const unsigned long long busy = total - idle_all;

  ResourceSample s;
  s.timestamp = now_seconds();
  const unsigned long long d_total = total - last_total_;
  const unsigned long long d_busy = busy - last_busy_;
  s.cpu = d_total > 0 ? 100.0 * static_cast<double>(d_busy) / static_cast<double>(d_total) : 0.0;
  last_total_ = total;
  last_busy_ = busy;

  std::ifstream mem("/proc/meminfo");
  unsigned long long mem_total = 0, mem_avail = 0;
  while (mem && std::getline(mem, line)) {
    std::istringstream ms(line);
    std::string key;
    unsigned long long kb = 0;
    ms >> key >> kb;
    if (key == "MemTotal:") mem_total = kb;
    if (key == "MemAvailable:") mem_avail = kb;
  }
  s.memory = mem_total > 0
                 ? 100.0 * static_cast<double>(mem_total - mem_avail) /
                       static_cast<double>(mem_total)
                 : 0.0;
  s.cpu = std::min(std::max(s.cpu, 0.0), 100.0);
  s.memory = std::min(std::max(s.memory, 0.0), 100.0);
  return s;
}

SamplingHandle start_sampling(std::shared_ptr<ResourceProvider> provider, double period_s) {
  if (!provider) throw std::invalid_argument("start_sampling: null provider");
  if (!(period_s > 0.0)) throw std::invalid_argument("start_sampling: period must be > 0");

  auto state = std::make_unique<SamplingHandle::State>();
  state->provider = std::move(provider);
  state->period = period_s;
  SamplingHandle::State* raw = state.get();
  state->worker = std::thread([raw] {
    const auto period = std::chrono::duration<double>(raw->period);
    auto next = std::chrono::steady_clock::now();
    while (!raw->stop_flag.load(std::memory_order_relaxed)) {
      if (auto s = raw->provider->sample()) {
        std::lock_guard<std::mutex> lock(raw->mutex);
        raw->samples.push_back(*s);
      }
      next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
      std::this_thread::sleep_until(next);
    }
  });
  return SamplingHandle(std::move(state));
}

SamplingHandle::~SamplingHandle() {
  if (state_ && state_->worker.joinable()) {
    state_->stop_flag.store(true);
    state_->worker.join();
  }
}

std::map<std::string, TrialSeries> SamplingHandle::stop() {
  if (!state_) throw std::runtime_error("stop_sampling: handle already consumed");
  state_->stop_flag.store(true);
  if (state_->worker.joinable()) state_->worker.join();

  std::vector<ResourceSample> samples = std::move(state_->samples);
  const double rate = 1.0 / state_->period;
  state_.reset();

  std::map<std::string, TrialSeries> out;
  TrialSeries cpu{"cpu_pct", {}, rate};
  TrialSeries mem{"mem_pct", {}, rate};
  TrialSeries gpu{"gpu_pct", {}, rate};
  bool any_gpu = false;
  for (const ResourceSample& s : samples) {
    cpu.values.push_back(s.cpu);
    mem.values.push_back(s.memory);
    if (s.gpu) {
      gpu.values.push_back(*s.gpu);
      any_gpu = true;
    }
  }
  out.emplace("cpu_pct", std::move(cpu));
  out.emplace("mem_pct", std::move(mem));
  if (any_gpu) out.emplace("gpu_pct", std::move(gpu));
  return out;
}

void drain_provider(ResourceProvider& provider, std::vector<ResourceSample>& into,
                    std::size_t max_samples) {
  for (std::size_t i = 0; i < max_samples; ++i) {
    auto s = provider.sample();
    if (!s) return;
    into.push_back(*s);
  }
}

}  // namespace rtsim
