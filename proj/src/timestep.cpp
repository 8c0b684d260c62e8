#include "rtsim/timestep.hpp"

#include <cmath>
#include <stdexcept>

namespace rtsim {

std::string to_string(TimestepVariant v) {
  switch (v) {
    case TimestepVariant::kFixed: return "fixed";
    case TimestepVariant::kWallClock: return "wall_clock";
    case TimestepVariant::kJitter: return "jitter";
  }
  return "fixed";
}

TimestepVariant timestep_variant_from_string(const std::string& s) {
  if (s == "fixed") return TimestepVariant::kFixed;
  if (s == "wall_clock" || s == "wallclock") return TimestepVariant::kWallClock;
  if (s == "jitter") return TimestepVariant::kJitter;
  throw std::invalid_argument("unknown timestep variant '" + s + "'");
}

void TimestepModel::validate() const {
  if (!(nominal_dt > 0.0)) throw std::invalid_argument("timestep: nominal_dt must be > 0");
  if (jitter_cv < 0.0) throw std::invalid_argument("timestep: jitter_cv must be >= 0");
  if (load_coupling < 0.0) throw std::invalid_argument("timestep: load_coupling must be >= 0");
}

TimestepSampler::TimestepSampler(TimestepModel model) : model_(model) { model_.validate(); }

double TimestepSampler::next_dt(Rng& rng, std::optional<double> load) {
  if (load && !(*load >= 0.0 && *load <= 1.0))
    throw std::invalid_argument("next_dt: load must be in [0, 1]");
  switch (model_.variant) {
    case TimestepVariant::kFixed:
      return model_.nominal_dt;
    case TimestepVariant::kJitter: {
      double cv = model_.jitter_cv;
      if (load) cv *= 1.0 + model_.load_coupling * *load;
      if (cv == 0.0) return model_.nominal_dt;
      // Lognormal with median nominal_dt: mu = ln(median),
      // sigma^2 = ln(1 + cv^2) so the distribution CV equals cv.
      const double sigma = std::sqrt(std::log1p(cv * cv));
      std::normal_distribution<double> normal(0.0, 1.0);
      return model_.nominal_dt * std::exp(sigma * normal(rng));
    }
    case TimestepVariant::kWallClock: {
      const auto now = std::chrono::steady_clock::now();
      if (!last_tick_) {
        last_tick_ = now;
        return model_.nominal_dt;
      }
      const std::chrono::duration<double> elapsed = now - *last_tick_;
      last_tick_ = now;
      // A zero reading (timer granularity) still has to advance the sim.
      return std::max(elapsed.count(), 1e-9);
    }
  }
  return model_.nominal_dt;
}

void TimestepSampler::reset_clock() {
  if (model_.variant != TimestepVariant::kWallClock)
    throw std::runtime_error("reset_clock: only valid for the wall-clock variant");
  last_tick_.reset();
}

}  // namespace rtsim
