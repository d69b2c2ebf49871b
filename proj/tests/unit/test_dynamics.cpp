#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "rdv/dynamics.hpp"

using namespace rdv;
using std::numbers::pi;

namespace {

Scenario unit_scenario() {
  Scenario s;
  s.c = 1.0;
  return s;
}

SpacecraftState random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpacecraftState x;
  x.r = 1.0 + 0.3 * u(rng);
  x.theta = 10.0 * u(rng);
  x.phi = 0.5 * u(rng);
  x.v_r = 0.2 * u(rng);
  x.v_t = 1.0 + 0.2 * u(rng);
  x.v_n = 0.2 * u(rng);
  x.m = 0.8 + 0.2 * std::abs(u(rng));
  return x;
}

}  // namespace

TEST_CASE("gravity_accel examples") {
  CHECK((gravity_accel({1, 0, 0}, 1) - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-15);
  CHECK((gravity_accel({2, 0, 0}, 1) - Eigen::Vector3d(-0.25, 0, 0)).norm() < 1e-15);
  CHECK((gravity_accel({0.6, 0.8, 0}, 1) - Eigen::Vector3d(-0.6, -0.8, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(gravity_accel({0, 0, 0}, 1), DomainError);
}

TEST_CASE("eom_rhs examples") {
  const Scenario s = unit_scenario();
  SpacecraftState x;
  StateVec f = eom_rhs(x, {}, s);
  StateVec expect;
  expect << 0, 1, 0, 0, 0, 0, 0;
  CHECK((f - expect).norm() < 1e-15);

  f = eom_rhs(x, {0.1, 0, 0}, s);
  expect << 0, 1, 0, 0.1, 0, 0, -0.1;
  CHECK((f - expect).norm() < 1e-15);

  SpacecraftState xf;
  xf.r = 1.2;
  xf.v_t = 1.0 / std::sqrt(1.2);
  f = eom_rhs(xf, {}, s);
  CHECK(std::abs(f[kVr]) < 1e-15);
  CHECK(std::abs(f[kVt]) < 1e-15);
  CHECK(std::abs(f[kVn]) < 1e-15);
  CHECK(f[kTheta] == doctest::Approx(1.0 / (1.2 * std::sqrt(1.2))).epsilon(1e-14));
}

TEST_CASE("eom_rhs domain errors") {
  const Scenario s = unit_scenario();
  SpacecraftState x;
  x.phi = pi / 2;
  CHECK_THROWS_AS(eom_rhs(x, {}, s), SingularityError);
  x.phi = 0;
  x.m = 0;
  CHECK_THROWS_AS(eom_rhs(x, {}, s), DomainError);
  x.m = 1;
  x.r = 0;
  CHECK_THROWS_AS(eom_rhs(x, {}, s), DomainError);
}

TEST_CASE("affine_rhs examples") {
  const Scenario s = unit_scenario();
  StateVec f = affine_rhs(ConvexState{}, ConvexControl{}, s);
  StateVec expect;
  expect << 0, 1, 0, 0, 0, 0, 0;
  CHECK((f - expect).norm() < 1e-15);

  ConvexState x;
  x.r = 1.1;
  x.phi = 0.2;
  x.z = -0.1;
  f = affine_rhs(x, ConvexControl{0, 0, 0, 0.05}, s);
  CHECK(f[kZ] == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("affine_rhs matches eom_rhs under the variable maps") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  Scenario s = unit_scenario();
  s.c = 2.5;
  for (int k = 0; k < 100; ++k) {
    const SpacecraftState x = random_state(rng);
    const ControlRTN thrust{u(rng), u(rng), u(rng)};
    const StateVec f = eom_rhs(x, thrust, s);
    const StateVec g = affine_rhs(to_convex_state(x), to_convex_control(thrust, x.m), s);
    for (int i = 0; i < kZ; ++i) CHECK(std::abs(f[i] - g[i]) < 1e-12);
    // z' = m'/m
    CHECK(std::abs(f[kZ] / x.m - g[kZ]) < 1e-12);
  }
}

TEST_CASE("mass flow sign") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  const Scenario s = unit_scenario();
  for (int k = 0; k < 50; ++k) {
    const SpacecraftState x = random_state(rng);
    const ControlRTN thrust{u(rng), u(rng), u(rng)};
    CHECK(eom_rhs(x, thrust, s)[kZ] < 0.0);
    CHECK(eom_rhs(x, {}, s)[kZ] == 0.0);
  }
}

TEST_CASE("circular orbits are equilibria of the radial and velocity equations") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Scenario s = unit_scenario();
  for (int k = 0; k < 50; ++k) {
    // Circular orbit through the state: position on the sphere, velocity
    // perpendicular with v^2 = mu/r, in any direction consistent with a
    // great circle, i.e. the heading is arbitrary.
    SpacecraftState x;
    x.r = 0.8 + 0.6 * u(rng);
    x.theta = 6.0 * u(rng);
    x.phi = 1.0 * (u(rng) - 0.5);
    const double heading = 2 * pi * u(rng);
    const double v = std::sqrt(s.mu / x.r);
    x.v_t = v * std::cos(heading);
    x.v_n = v * std::sin(heading);
    const StateVec f = eom_rhs(x, {}, s);
    CHECK(std::abs(f[kR]) < 1e-12);
    CHECK(std::abs(f[kVr]) < 1e-12);
    // Along a great circle |v| is constant.
    const double dv2 = 2 * (x.v_t * f[kVt] + x.v_n * f[kVn]);
    CHECK(std::abs(dv2) < 1e-12);
  }
}

TEST_CASE("convex variable maps") {
  SpacecraftState x;
  CHECK(to_convex_state(x).z == 0.0);
  CHECK(from_convex_state(ConvexState{}).m == 1.0);
  x.m = 0.917;
  CHECK(to_convex_state(x).z == doctest::Approx(-0.08664).epsilon(1e-4));

  std::mt19937 rng(5);
  for (int k = 0; k < 100; ++k) {
    const SpacecraftState y = random_state(rng);
    const SpacecraftState back = from_convex_state(to_convex_state(y));
    CHECK((back.vec() - y.vec()).norm() < 1e-14);
    ConvexState cz = to_convex_state(y);
    CHECK((to_convex_state(from_convex_state(cz)).vec() - cz.vec()).norm() < 1e-14);
  }
  x.m = 0;
  CHECK_THROWS_AS(to_convex_state(x), DomainError);
}

TEST_CASE("to_convex_control examples") {
  ConvexControl u = to_convex_control({0.1, 0, 0}, 1.0);
  CHECK((u.vec() - ControlVec(0.1, 0, 0, 0.1)).norm() < 1e-15);
  u = to_convex_control({0, 0, 0}, 0.9);
  CHECK(u.vec().norm() == 0.0);
  u = to_convex_control({0.06, 0.08, 0}, 0.5);
  CHECK((u.vec() - ControlVec(0.12, 0.16, 0, 0.2)).norm() < 1e-15);
  CHECK_THROWS_AS(to_convex_control({0.1, 0, 0}, 0.0), DomainError);
}

TEST_CASE("coasting_state") {
  Scenario s = unit_scenario();
  SpacecraftState x = coasting_state(s, Sat::II, 0.0);
  StateVec expect;
  expect << 1, 0, 0, 0, 1, 0, 1;
  CHECK((x.vec() - expect).norm() < 1e-15);

  x = coasting_state(s, Sat::II, 2 * pi);
  expect[kTheta] = 2 * pi;
  CHECK((x.vec() - expect).norm() < 1e-12);

  // Inclined: rotate the planar circle about the node line (x axis).
  const double inc = 10.0 * pi / 180.0;
  s.inc = {0.0, inc};
  const double t = pi / 2;
  x = coasting_state(s, Sat::II, t);
  const Eigen::Vector3d pos = Eigen::AngleAxisd(inc, Eigen::Vector3d::UnitX()) *
                              Eigen::Vector3d(std::cos(t), std::sin(t), 0.0);
  const Eigen::Vector3d vel = Eigen::AngleAxisd(inc, Eigen::Vector3d::UnitX()) *
                              Eigen::Vector3d(-std::sin(t), std::cos(t), 0.0);
  CHECK(x.phi == doctest::Approx(inc).epsilon(1e-14));
  CHECK(x.theta == doctest::Approx(pi / 2).epsilon(1e-14));
  const Cartesian cart = to_cartesian(x.vec());
  CHECK((cart.pos - pos).norm() < 1e-14);
  CHECK((cart.vel - vel).norm() < 1e-14);
  CHECK(std::abs(x.v_n) < 1e-14);  // at the apex the motion is horizontal eastward
  CHECK(inclination_of(x.vec()) == doctest::Approx(inc).epsilon(1e-13));

  // Sat I starts at theta0 = pi; its node is there.
  x = coasting_state(s, Sat::I, 0.0);
  CHECK(x.theta == doctest::Approx(pi));
}

TEST_CASE("coasting_state conserves energy and speed") {
  Scenario s = unit_scenario();
  s.inc = {0.3, 0.17};
  for (Sat sat : kBothSats) {
    double prev_theta = coasting_state(s, sat, 0.0).theta;
    for (int k = 0; k <= 200; ++k) {
      const double t = 0.1 * k;
      const SpacecraftState x = coasting_state(s, sat, t);
      const double v2 = x.v_r * x.v_r + x.v_t * x.v_t + x.v_n * x.v_n;
      CHECK(std::abs(v2 - 1.0) < 1e-12);
      CHECK(std::abs(0.5 * v2 - 1.0 / x.r + 0.5) < 1e-12);
      CHECK(x.theta >= prev_theta - 1e-12);  // unwrapped, monotone eastward
      prev_theta = x.theta;
    }
  }
}

TEST_CASE("scenario validation") {
  Scenario s;
  CHECK_NOTHROW(s.validate());
  s.tf = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = Scenario{};
  s.k_rev = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
