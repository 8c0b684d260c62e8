#include "rtsim/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rtsim {

using nlohmann::json;

namespace {

JointVector joint_vector(const json& j, const JointVector& fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("config: joint vectors need exactly 3 entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

CartesianPoint point(const json& j, const CartesianPoint& fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("config: points need exactly 3 entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

void Config::validate() const {
  arm.validate();
  timestep.validate();
  env.validate();
  ppo.validate();
  if (collect.trials < 1) throw std::invalid_argument("config: collect.trials must be >= 1");
  if (!(collect.duration_s > 0.0) || !(collect.rate_hz > 0.0))
    throw std::invalid_argument("config: collect duration and rate must be > 0");
}

Config config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  Config cfg;
  if (j.contains("arm")) {
    const json& a = j["arm"];
    cfg.arm.link1_length = get_or(a, "link1_length", cfg.arm.link1_length);
    cfg.arm.link2_length = get_or(a, "link2_length", cfg.arm.link2_length);
    cfg.arm.base_height = get_or(a, "base_height", cfg.arm.base_height);
    cfg.arm.joint_lower = joint_vector(a.value("joint_lower", json()), cfg.arm.joint_lower);
    cfg.arm.joint_upper = joint_vector(a.value("joint_upper", json()), cfg.arm.joint_upper);
  }
  if (j.contains("timestep")) {
    const json& t = j["timestep"];
    if (t.contains("variant"))
      cfg.timestep.variant = timestep_variant_from_string(t["variant"].get<std::string>());
    cfg.timestep.nominal_dt = get_or(t, "nominal_dt", cfg.timestep.nominal_dt);
    cfg.timestep.jitter_cv = get_or(t, "jitter_cv", cfg.timestep.jitter_cv);
    cfg.timestep.load_coupling = get_or(t, "load_coupling", cfg.timestep.load_coupling);
  }
  if (j.contains("env")) {
    const json& e = j["env"];
    cfg.env.r1_gain = get_or(e, "r1_gain", cfg.env.r1_gain);
    cfg.env.r2_gain = get_or(e, "r2_gain", cfg.env.r2_gain);
    cfg.env.epsilon = get_or(e, "epsilon", cfg.env.epsilon);
    cfg.env.max_steps = get_or(e, "max_steps", cfg.env.max_steps);
    cfg.env.goal = point(e.value("goal", json()), cfg.env.goal);
    cfg.env.v_max = get_or(e, "v_max", cfg.env.v_max);
    cfg.env.obs_noise_fraction = get_or(e, "obs_noise_fraction", cfg.env.obs_noise_fraction);
    cfg.env.initial_theta = joint_vector(e.value("initial_theta", json()), cfg.env.initial_theta);
  }
  if (j.contains("ppo")) {
    const json& p = j["ppo"];
    cfg.ppo.gamma = get_or(p, "gamma", cfg.ppo.gamma);
    cfg.ppo.gae_lambda = get_or(p, "gae_lambda", cfg.ppo.gae_lambda);
    cfg.ppo.clip_ratio = get_or(p, "clip_ratio", cfg.ppo.clip_ratio);
    cfg.ppo.epochs = get_or(p, "epochs", cfg.ppo.epochs);
    cfg.ppo.episodes_per_epoch = get_or(p, "episodes_per_epoch", cfg.ppo.episodes_per_epoch);
    cfg.ppo.steps_per_episode = get_or(p, "steps_per_episode", cfg.ppo.steps_per_episode);
    cfg.ppo.update_iters = get_or(p, "update_iters", cfg.ppo.update_iters);
    cfg.ppo.minibatch = get_or(p, "minibatch", cfg.ppo.minibatch);
    cfg.ppo.lr = get_or(p, "lr", cfg.ppo.lr);
    cfg.ppo.value_coeff = get_or(p, "value_coeff", cfg.ppo.value_coeff);
    cfg.ppo.entropy_coeff = get_or(p, "entropy_coeff", cfg.ppo.entropy_coeff);
    cfg.ppo.seed = get_or(p, "seed", cfg.ppo.seed);
  }
  if (j.contains("collect")) {
    const json& c = j["collect"];
    cfg.collect.trials = get_or(c, "trials", cfg.collect.trials);
    cfg.collect.duration_s = get_or(c, "duration_s", cfg.collect.duration_s);
    cfg.collect.rate_hz = get_or(c, "rate_hz", cfg.collect.rate_hz);
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

std::string config_to_json_text(const Config& cfg) {
  json j;
  j["arm"] = {{"link1_length", cfg.arm.link1_length},
              {"link2_length", cfg.arm.link2_length},
              {"base_height", cfg.arm.base_height},
              {"joint_lower", cfg.arm.joint_lower},
              {"joint_upper", cfg.arm.joint_upper}};
  j["timestep"] = {{"variant", to_string(cfg.timestep.variant)},
                   {"nominal_dt", cfg.timestep.nominal_dt},
                   {"jitter_cv", cfg.timestep.jitter_cv},
                   {"load_coupling", cfg.timestep.load_coupling}};
  j["env"] = {{"r1_gain", cfg.env.r1_gain},
              {"r2_gain", cfg.env.r2_gain},
              {"epsilon", cfg.env.epsilon},
              {"max_steps", cfg.env.max_steps},
              {"goal", {cfg.env.goal.x, cfg.env.goal.y, cfg.env.goal.z}},
              {"v_max", cfg.env.v_max},
              {"obs_noise_fraction", cfg.env.obs_noise_fraction},
              {"initial_theta", cfg.env.initial_theta}};
  j["ppo"] = {{"gamma", cfg.ppo.gamma},
              {"gae_lambda", cfg.ppo.gae_lambda},
              {"clip_ratio", cfg.ppo.clip_ratio},
              {"epochs", cfg.ppo.epochs},
              {"episodes_per_epoch", cfg.ppo.episodes_per_epoch},
              {"steps_per_episode", cfg.ppo.steps_per_episode},
              {"update_iters", cfg.ppo.update_iters},
              {"minibatch", cfg.ppo.minibatch},
              {"lr", cfg.ppo.lr},
              {"value_coeff", cfg.ppo.value_coeff},
              {"entropy_coeff", cfg.ppo.entropy_coeff},
              {"seed", cfg.ppo.seed}};
  j["collect"] = {{"trials", cfg.collect.trials},
                  {"duration_s", cfg.collect.duration_s},
                  {"rate_hz", cfg.collect.rate_hz}};
  return j.dump(2);
}

}  // namespace rtsim
