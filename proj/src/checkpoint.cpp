#include "rtsim/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rtsim {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

json net_to_json(const Mlp& net) {
  json j;
  j["dims"] = net.dims();
  json layers = json::array();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    json layer;
    layer["weight"] = matrix_to_json(net.weights()[l]);
    layer["bias"] = std::vector<double>(net.biases()[l].data(),
                                        net.biases()[l].data() + net.biases()[l].size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp net_from_json(const json& j) {
  const std::vector<int> dims = j.at("dims").get<std::vector<int>>();
  Rng scratch = make_rng(0);
  Mlp net(dims, scratch);
  const json& layers = j.at("layers");
  if (layers.size() != net.layer_count())
    throw std::runtime_error("checkpoint: layer count does not match dims");
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd w = matrix_from_json(layers[l].at("weight"));
    if (w.rows() != dims[l + 1] || w.cols() != dims[l])
      throw std::runtime_error("checkpoint: weight shape mismatch in layer " + std::to_string(l));
    const std::vector<double> b = layers[l].at("bias").get<std::vector<double>>();
    if (static_cast<int>(b.size()) != dims[l + 1])
      throw std::runtime_error("checkpoint: bias shape mismatch in layer " + std::to_string(l));
    net.mutable_weights()[l] = std::move(w);
    net.mutable_biases()[l] = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  }
  return net;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "rtsim-checkpoint";
  j["epoch"] = ckpt.epoch;
  j["reward_scale"] = ckpt.reward_scale;
  j["policy"]["mean_net"] = net_to_json(ckpt.policy.mean_net());
  j["policy"]["log_std"] = std::vector<double>{ckpt.policy.log_std()[0], ckpt.policy.log_std()[1],
                                               ckpt.policy.log_std()[2]};
  j["policy"]["action_bound"] = ckpt.policy.action_bound();
  j["value_net"] = net_to_json(ckpt.value_net);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + tmp.string());
    out << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path.string());
  json j;
  in >> j;
  if (j.value("format_version", 0) != 1)
    throw std::runtime_error("checkpoint: unsupported format version in " + path.string());

  Checkpoint ckpt;
  const std::vector<double> ls = j.at("policy").at("log_std").get<std::vector<double>>();
  if (ls.size() != 3) throw std::runtime_error("checkpoint: log_std must have 3 entries");
  ckpt.policy = GaussianPolicy(net_from_json(j.at("policy").at("mean_net")),
                               Eigen::Vector3d(ls[0], ls[1], ls[2]),
                               j.at("policy").at("action_bound").get<double>());
  ckpt.value_net = net_from_json(j.at("value_net"));
  ckpt.epoch = j.value("epoch", 0);
  ckpt.reward_scale = j.value("reward_scale", 0.0);
  return ckpt;
}

}  // namespace rtsim
