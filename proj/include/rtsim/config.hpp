#pragma once

#include <filesystem>
#include <string>

#include "rtsim/arm_model.hpp"
#include "rtsim/ppo.hpp"
#include "rtsim/reach_env.hpp"
#include "rtsim/timestep.hpp"

namespace rtsim {

/// Data-collection settings (repeated-trial runs of the reference policy).
struct CollectConfig {
  int trials = 50;
  double duration_s = 10.0;
  double rate_hz = 1000.0;  // command rate; nominal_dt = 1/rate_hz

  int steps() const { return static_cast<int>(duration_s * rate_hz + 0.5); }
};

/// Whole-toolkit configuration. Every key is optional in the file; missing
/// keys keep the defaults below.
struct Config {
  ArmModel arm;
  TimestepModel timestep;
  EnvConfig env;
  PPOConfig ppo;
  CollectConfig collect;

  void validate() const;
};

Config config_from_json_text(const std::string& text);
Config load_config(const std::filesystem::path& path);
std::string config_to_json_text(const Config& cfg);

}  // namespace rtsim
