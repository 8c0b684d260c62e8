#include "rtsim/arm_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rtsim {

double distance(const CartesianPoint& a, const CartesianPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void ArmModel::validate() const {
  if (!(link1_length > 0.0) || !(link2_length > 0.0))
    throw std::invalid_argument("arm model: link lengths must be strictly positive");
  if (!(base_height >= 0.0))
    throw std::invalid_argument("arm model: base height must be nonnegative");
  for (int i = 0; i < 3; ++i) {
    if (!(joint_lower[i] < joint_upper[i]))
      throw std::invalid_argument("arm model: joint_lower[" + std::to_string(i) +
                                  "] must be below joint_upper");
  }
}

bool ArmModel::within_limits(const JointVector& q) const {
  for (int i = 0; i < 3; ++i)
    if (!(q[i] >= joint_lower[i] && q[i] <= joint_upper[i])) return false;
  return true;
}

CartesianPoint forward_kinematics(const ArmModel& model, const JointVector& q) {
  if (!model.within_limits(q))
    throw std::invalid_argument("forward_kinematics: joint angles outside limits");
  const double reach = model.link1_length * std::cos(q[1]) +
                       model.link2_length * std::cos(q[1] + q[2]);
  CartesianPoint p;
  p.x = std::cos(q[0]) * reach;
  p.y = std::sin(q[0]) * reach;
  p.z = model.base_height + model.link1_length * std::sin(q[1]) +
        model.link2_length * std::sin(q[1] + q[2]);
  return p;
}

ArmModel sample_randomized_model(const ArmModel& base, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("sample_randomized_model: fraction must be in [0, 1)");
  ArmModel out = base;
  std::uniform_real_distribution<double> scale(1.0 - fraction, 1.0 + fraction);
  out.link1_length = base.link1_length * scale(rng);
  out.link2_length = base.link2_length * scale(rng);
  return out;
}

ArmModel mismatched_model(const ArmModel& base) {
  constexpr double kOffset = 0.0004;  // 0.04%
  ArmModel out = base;
  out.link1_length = base.link1_length * (1.0 - kOffset);
  out.link2_length = base.link2_length * (1.0 + kOffset);
  return out;
}

}  // namespace rtsim
