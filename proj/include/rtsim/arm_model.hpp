#pragma once

#include <array>

#include "rtsim/rng.hpp"

namespace rtsim {

using JointVector = std::array<double, 3>;

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const CartesianPoint& a, const CartesianPoint& b);

/// Parametric three-link arm: a yaw joint at the base followed by shoulder
/// and elbow pitch joints. Link lengths are the randomization target.
struct ArmModel {
  double link1_length = 0.3;  // m
  double link2_length = 0.3;  // m
  double base_height = 0.2;   // m
  JointVector joint_lower{-3.14159265358979323846, -3.14159265358979323846,
                          -3.14159265358979323846};
  JointVector joint_upper{3.14159265358979323846, 3.14159265358979323846,
                          3.14159265358979323846};

  void validate() const;  // throws std::invalid_argument
  bool within_limits(const JointVector& q) const;
};

/// Closed-form end-effector position. q must lie within the joint limits.
CartesianPoint forward_kinematics(const ArmModel& model, const JointVector& q);

/// Scales each link length by an independent factor drawn uniformly from
/// [1-fraction, 1+fraction]. fraction must lie in [0, 1).
ArmModel sample_randomized_model(const ArmModel& base, double fraction, Rng& rng);

/// Deliberately offset model: first link 0.04% shorter, second 0.04% longer.
/// Multiplicative, so applying it twice compounds the offsets.
ArmModel mismatched_model(const ArmModel& base);

}  // namespace rtsim
