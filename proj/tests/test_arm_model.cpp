#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rtsim/arm_model.hpp"

using namespace rtsim;

namespace {
constexpr double kPi = 3.14159265358979323846;

ArmModel default_arm() { return ArmModel{}; }
}  // namespace

TEST_CASE("forward kinematics at reference poses") {
  const ArmModel arm = default_arm();

  const CartesianPoint extended = forward_kinematics(arm, {0.0, 0.0, 0.0});
  CHECK(extended.x == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(extended.y == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(extended.z == doctest::Approx(0.2).epsilon(1e-15));

  const CartesianPoint yawed = forward_kinematics(arm, {kPi / 2.0, 0.0, 0.0});
  CHECK(yawed.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(yawed.y == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(yawed.z == doctest::Approx(0.2).epsilon(1e-12));

  const CartesianPoint up = forward_kinematics(arm, {0.0, kPi / 2.0, 0.0});
  CHECK(up.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(up.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(up.z == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("forward kinematics rejects out-of-limit angles") {
  ArmModel arm = default_arm();
  arm.joint_upper = {1.0, 1.0, 1.0};
  arm.joint_lower = {-1.0, -1.0, -1.0};
  CHECK_THROWS_AS(forward_kinematics(arm, {1.5, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("forward kinematics is deterministic and stays inside the reach sphere") {
  const ArmModel arm = default_arm();
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    const JointVector q{angle(rng), angle(rng), angle(rng)};
    const CartesianPoint a = forward_kinematics(arm, q);
    const CartesianPoint b = forward_kinematics(arm, q);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.z == b.z);
    const double r = distance(a, {0.0, 0.0, arm.base_height});
    CHECK(r <= arm.link1_length + arm.link2_length + 1e-12);
  }
}

TEST_CASE("randomized model sampling") {
  const ArmModel base = default_arm();
  Rng rng = make_rng(42);

  SUBCASE("zero fraction is the identity") {
    const ArmModel same = sample_randomized_model(base, 0.0, rng);
    CHECK(same.link1_length == base.link1_length);
    CHECK(same.link2_length == base.link2_length);
  }

  SUBCASE("one-percent range stays inside [0.297, 0.303]") {
    for (int i = 0; i < 20000; ++i) {
      const ArmModel s = sample_randomized_model(base, 0.01, rng);
      CHECK(s.link1_length >= 0.297);
      CHECK(s.link1_length <= 0.303);
      CHECK(s.link2_length >= 0.297);
      CHECK(s.link2_length <= 0.303);
      s.validate();
    }
  }

  SUBCASE("empirical mean scale matches the uniform oracle") {
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      sum += sample_randomized_model(base, 0.01, rng).link1_length / base.link1_length;
    CHECK(sum / n == doctest::Approx(1.0).epsilon(1e-3));
  }

  SUBCASE("fraction outside [0,1) is rejected") {
    CHECK_THROWS_AS(sample_randomized_model(base, -0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_randomized_model(base, 1.0, rng), std::invalid_argument);
  }
}

TEST_CASE("mismatched model offsets") {
  const ArmModel base = default_arm();
  const ArmModel off = mismatched_model(base);
  CHECK(off.link1_length == doctest::Approx(0.29988).epsilon(1e-15));
  CHECK(off.link2_length == doctest::Approx(0.30012).epsilon(1e-15));

  // Multiplicative, hence not idempotent.
  const ArmModel twice = mismatched_model(off);
  CHECK(twice.link1_length < off.link1_length);
  CHECK(twice.link2_length > off.link2_length);

  // The offsets cancel at full extension: 0.29988 + 0.30012 is exactly 0.6
  // in binary floating point (checked by direct evaluation).
  const CartesianPoint p = forward_kinematics(off, {0.0, 0.0, 0.0});
  CHECK(p.x == off.link1_length + off.link2_length);
  CHECK(p.x == 0.6);
}

TEST_CASE("arm model validation") {
  ArmModel bad = default_arm();
  bad.link1_length = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ArmModel swapped = default_arm();
  swapped.joint_lower[1] = 2.0;
  swapped.joint_upper[1] = -2.0;
  CHECK_THROWS_AS(swapped.validate(), std::invalid_argument);
}
