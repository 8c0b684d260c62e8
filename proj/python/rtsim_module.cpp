#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rtsim/arm_model.hpp"
#include "rtsim/harness.hpp"
#include "rtsim/ppo.hpp"
#include "rtsim/reach_env.hpp"
#include "rtsim/stats.hpp"
#include "rtsim/timestep.hpp"

namespace py = pybind11;
using namespace rtsim;

namespace {

Ensemble make_ensemble(const std::vector<std::vector<double>>& trials, const std::string& channel,
                       double sample_rate) {
  std::vector<TrialSeries> series;
  series.reserve(trials.size());
  for (const auto& values : trials) series.push_back({channel, values, sample_rate});
  return Ensemble(std::move(series));
}

}  // namespace

PYBIND11_MODULE(rtsim, m) {
  m.doc() = "stochastic-timestep arm simulation, PPO training and ensemble statistics";

  py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

  py::class_<CartesianPoint>(m, "CartesianPoint")
      .def(py::init<>())
      .def(py::init([](double x, double y, double z) { return CartesianPoint{x, y, z}; }))
      .def_readwrite("x", &CartesianPoint::x)
      .def_readwrite("y", &CartesianPoint::y)
      .def_readwrite("z", &CartesianPoint::z)
      .def("__repr__", [](const CartesianPoint& p) {
        return "CartesianPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
               std::to_string(p.z) + ")";
      });

  py::class_<ArmModel>(m, "ArmModel")
      .def(py::init<>())
      .def_readwrite("link1_length", &ArmModel::link1_length)
      .def_readwrite("link2_length", &ArmModel::link2_length)
      .def_readwrite("base_height", &ArmModel::base_height)
      .def_readwrite("joint_lower", &ArmModel::joint_lower)
      .def_readwrite("joint_upper", &ArmModel::joint_upper)
      .def("validate", &ArmModel::validate);

  m.def("forward_kinematics", &forward_kinematics, py::arg("model"), py::arg("q"));
  m.def("sample_randomized_model", &sample_randomized_model, py::arg("base"), py::arg("fraction"),
        py::arg("rng"));
  m.def("mismatched_model", &mismatched_model, py::arg("base"));

  py::enum_<TimestepVariant>(m, "TimestepVariant")
      .value("FIXED", TimestepVariant::kFixed)
      .value("WALL_CLOCK", TimestepVariant::kWallClock)
      .value("JITTER", TimestepVariant::kJitter);

  py::class_<TimestepModel>(m, "TimestepModel")
      .def(py::init<>())
      .def_readwrite("variant", &TimestepModel::variant)
      .def_readwrite("nominal_dt", &TimestepModel::nominal_dt)
      .def_readwrite("jitter_cv", &TimestepModel::jitter_cv)
      .def_readwrite("load_coupling", &TimestepModel::load_coupling);
  m.def("fixed_timestep", &fixed_timestep, py::arg("dt"));
  m.def("jitter_timestep", &jitter_timestep, py::arg("dt"), py::arg("cv"),
        py::arg("load_coupling") = 0.0);

  py::class_<TimestepSampler>(m, "TimestepSampler")
      .def(py::init<TimestepModel>())
      .def(
          "next_dt",
          [](TimestepSampler& s, Rng& rng, std::optional<double> load) {
            return s.next_dt(rng, load);
          },
          py::arg("rng"), py::arg("load") = std::nullopt)
      .def("reset_clock", &TimestepSampler::reset_clock);

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init<>())
      .def_readwrite("r1_gain", &EnvConfig::r1_gain)
      .def_readwrite("r2_gain", &EnvConfig::r2_gain)
      .def_readwrite("epsilon", &EnvConfig::epsilon)
      .def_readwrite("max_steps", &EnvConfig::max_steps)
      .def_readwrite("goal", &EnvConfig::goal)
      .def_readwrite("v_max", &EnvConfig::v_max)
      .def_readwrite("obs_noise_fraction", &EnvConfig::obs_noise_fraction)
      .def_readwrite("initial_theta", &EnvConfig::initial_theta);

  m.def("is_done", &is_done, py::arg("distance"), py::arg("step"), py::arg("cfg"));
  m.def(
      "heuristic_p2p_policy",
      [](int t) { return heuristic_p2p_policy(t).v_desired; }, py::arg("step_index") = 0);

  py::class_<ReachEnv>(m, "ReachEnv")
      .def(py::init<ArmModel, TimestepModel, EnvConfig, std::uint64_t>(), py::arg("arm"),
           py::arg("timestep"), py::arg("config"), py::arg("seed"))
      .def("reset", [](ReachEnv& env) { return env.reset().flatten(); })
      .def(
          "step",
          [](ReachEnv& env, const JointVector& v_desired) {
            const StepResult r = env.step(Action{v_desired});
            return py::make_tuple(r.obs.flatten(), r.reward, r.done);
          },
          py::arg("v_desired"))
      .def("set_arm_model", &ReachEnv::set_arm_model)
      .def("reseed", &ReachEnv::reseed)
      .def_property_readonly("step_count", &ReachEnv::step_count)
      .def_property_readonly("last_dt", &ReachEnv::last_dt)
      .def_property_readonly("theta", &ReachEnv::theta)
      .def("distance_to_goal", &ReachEnv::distance_to_goal);

  // ensemble statistics
  m.def(
      "mean_signal",
      [](const std::vector<std::vector<double>>& trials) {
        return mean_signal(make_ensemble(trials, "s", 1.0));
      },
      py::arg("trials"));
  m.def(
      "sigma_band",
      [](const std::vector<std::vector<double>>& trials) {
        return sigma_band(make_ensemble(trials, "s", 1.0));
      },
      py::arg("trials"));
  m.def(
      "rms_delta",
      [](const std::vector<double>& trial, const std::vector<double>& mean) {
        return rms_delta(TrialSeries{"s", trial, 1.0}, mean);
      },
      py::arg("trial"), py::arg("mean"));
  m.def(
      "resource_mean",
      [](const std::vector<double>& trace) { return resource_mean(TrialSeries{"r", trace, 1.0}); },
      py::arg("trace"));
  m.def("pearson", &pearson, py::arg("x"), py::arg("y"));
  m.def("t_score", &t_score, py::arg("r"), py::arg("n_df"));
  m.def("p_value", &p_value, py::arg("t"), py::arg("n_df"));
  m.def(
      "psd",
      [](const std::vector<double>& values, double sample_rate, std::size_t segment_len) {
        const PsdResult r = psd(TrialSeries{"s", values, sample_rate}, segment_len);
        return py::make_tuple(r.freqs, r.power);
      },
      py::arg("values"), py::arg("sample_rate"), py::arg("segment_len") = 0);

  m.def(
      "compute_gae",
      [](const std::vector<double>& rewards, const std::vector<double>& values, bool terminal,
         double gamma, double lambda) {
        const GaeResult r = compute_gae(rewards, values, terminal, gamma, lambda);
        return py::make_tuple(r.advantages, r.returns);
      },
      py::arg("rewards"), py::arg("values"), py::arg("terminal"), py::arg("gamma"),
      py::arg("lambda_") = 0.95);

  py::class_<PPOConfig>(m, "PPOConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &PPOConfig::gamma)
      .def_readwrite("gae_lambda", &PPOConfig::gae_lambda)
      .def_readwrite("clip_ratio", &PPOConfig::clip_ratio)
      .def_readwrite("epochs", &PPOConfig::epochs)
      .def_readwrite("episodes_per_epoch", &PPOConfig::episodes_per_epoch)
      .def_readwrite("steps_per_episode", &PPOConfig::steps_per_episode)
      .def_readwrite("update_iters", &PPOConfig::update_iters)
      .def_readwrite("minibatch", &PPOConfig::minibatch)
      .def_readwrite("lr", &PPOConfig::lr)
      .def_readwrite("value_coeff", &PPOConfig::value_coeff)
      .def_readwrite("entropy_coeff", &PPOConfig::entropy_coeff)
      .def_readwrite("seed", &PPOConfig::seed);

  m.def(
      "train",
      [](const std::string& variant, const PPOConfig& cfg, const ArmModel& arm,
         const EnvConfig& env_cfg, double jitter_cv) {
        const AgentVariant v =
            agent_variant(agent_tag_from_string(variant), jitter_cv);
        const TrainResult r = train(v, cfg, arm, env_cfg);
        py::dict out;
        out["curve"] = r.curve;
        out["wall_time_seconds"] = r.wall_time_seconds;
        const TrainingMetrics metrics =
            training_metrics(r.curve, r.wall_time_seconds, r.wall_time_seconds);
        out["r_ini"] = metrics.r_ini;
        out["r_ult"] = metrics.r_ult;
        out["t_hlf"] = metrics.t_hlf;
        return out;
      },
      py::arg("variant"), py::arg("cfg"), py::arg("arm") = ArmModel{},
      py::arg("env_cfg") = EnvConfig{}, py::arg("jitter_cv") = 0.1,
      "Train one agent variant; returns the learning curve and summary metrics.");

  m.def(
      "training_metrics",
      [](const std::vector<double>& curve, double wall, double baseline) {
        const TrainingMetrics metrics = training_metrics(curve, wall, baseline);
        py::dict out;
        out["r_ini"] = metrics.r_ini;
        out["r_ult"] = metrics.r_ult;
        out["t_hlf"] = metrics.t_hlf;
        out["r_time"] = metrics.r_time;
        return out;
      },
      py::arg("curve"), py::arg("wall_time_seconds") = 1.0,
      py::arg("baseline_time_seconds") = 1.0);
}
