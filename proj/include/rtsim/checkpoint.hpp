#pragma once

#include <filesystem>

#include "rtsim/mlp.hpp"
#include "rtsim/policy.hpp"

namespace rtsim {

struct Checkpoint {
  GaussianPolicy policy;
  Mlp value_net;
  int epoch = 0;             // epochs completed when the snapshot was taken
  double reward_scale = 0.0; // critic conditioning factor of the run
};

/// JSON container with a format-version field and explicit shape headers.
/// Parameter values round-trip losslessly, so resumed training continues
/// from bit-identical weights.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rtsim
