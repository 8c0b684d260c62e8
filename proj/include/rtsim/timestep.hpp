#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "rtsim/rng.hpp"

namespace rtsim {

enum class TimestepVariant { kFixed, kWallClock, kJitter };

std::string to_string(TimestepVariant v);
TimestepVariant timestep_variant_from_string(const std::string& s);

struct TimestepModel {
  TimestepVariant variant = TimestepVariant::kFixed;
  double nominal_dt = 0.025;   // s
  double jitter_cv = 0.0;      // coefficient of variation, Jitter only
  double load_coupling = 0.0;  // widens the CV by (1 + load_coupling * load)

  void validate() const;
};

inline TimestepModel fixed_timestep(double dt) {
  return TimestepModel{TimestepVariant::kFixed, dt, 0.0, 0.0};
}
inline TimestepModel jitter_timestep(double dt, double cv, double load_coupling = 0.0) {
  return TimestepModel{TimestepVariant::kJitter, dt, cv, load_coupling};
}
inline TimestepModel wall_clock_timestep(double dt) {
  return TimestepModel{TimestepVariant::kWallClock, dt, 0.0, 0.0};
}

/// Per-step integration interval source.
///
/// Fixed always returns nominal_dt. Jitter draws from a lognormal with
/// median nominal_dt and coefficient of variation jitter_cv, optionally
/// widened by host load. WallClock returns the real elapsed time since the
/// previous call (first call returns nominal_dt) and is single-owner: one
/// stepping loop per sampler instance.
class TimestepSampler {
 public:
  TimestepSampler() = default;
  explicit TimestepSampler(TimestepModel model);

  double next_dt(Rng& rng, std::optional<double> load = std::nullopt);

  /// WallClock only: the next call returns nominal_dt again.
  void reset_clock();

  const TimestepModel& model() const { return model_; }

 private:
  TimestepModel model_{};
  std::optional<std::chrono::steady_clock::time_point> last_tick_;
};

}  // namespace rtsim
