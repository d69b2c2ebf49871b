#include "rdv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

namespace rdv {

namespace {

void check_admissible(double r, double phi) {
  if (!(r > 0.0)) {
    throw DomainError("non-positive radius r = " + std::to_string(r));
  }
  if (!(std::abs(phi) < kMaxLatitude)) {
    throw SingularityError("latitude at the polar singularity, phi = " + std::to_string(phi));
  }
}

// Gravity and inertial terms of the velocity equations (thrust excluded).
StateVec coast_rhs(const StateVec& x, double mu) {
  const double r = x[kR];
  const double phi = x[kPhi];
  const double vr = x[kVr];
  const double vt = x[kVt];
  const double vn = x[kVn];
  const double tan_phi = std::tan(phi);

  StateVec f;
  f[kR] = vr;
  f[kTheta] = vt / (r * std::cos(phi));
  f[kPhi] = vn / r;
  f[kVr] = (vt * vt + vn * vn) / r - mu / (r * r);
  f[kVt] = -vr * vt / r + vt * vn * tan_phi / r;
  f[kVn] = -vr * vn / r - vt * vt * tan_phi / r;
  f[kZ] = 0.0;
  return f;
}

}  // namespace

const char* name_of(Sat s) { return s == Sat::I ? "I" : "II"; }

void Scenario::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
  };
  require(mu > 0.0, "mu must be positive");
  require(r0 > 0.0, "r0 must be positive");
  require(rf > 0.0, "rf must be positive");
  require(tf > 0.0, "tf must be positive");
  require(t_max > 0.0, "t_max must be positive");
  require(c > 0.0, "c must be positive");
  require(m0 > 0.0, "m0 must be positive");
  require(k_rev == 0, "k_rev must be 0");
  for (double i : inc) require(std::abs(i) < kMaxLatitude, "inclination too close to polar");
}

double ControlRTN::magnitude() const { return std::sqrt(t_r * t_r + t_t * t_t + t_n * t_n); }

Eigen::Vector3d gravity_accel(const Eigen::Vector3d& r_vec, double mu) {
  const double r = r_vec.norm();
  if (!(r > 0.0)) throw DomainError("gravity_accel: zero radius");
  return -mu / (r * r * r) * r_vec;
}

StateVec eom_rhs(const SpacecraftState& x, const ControlRTN& u, const Scenario& scen) {
  check_admissible(x.r, x.phi);
  if (!(x.m > 0.0)) throw DomainError("non-positive mass m = " + std::to_string(x.m));

  StateVec f = coast_rhs(x.vec(), scen.mu);
  f[kVr] += u.t_r / x.m;
  f[kVt] += u.t_t / x.m;
  f[kVn] += u.t_n / x.m;
  f[kZ] = -u.magnitude() / scen.c;
  return f;
}

StateVec affine_rhs(const StateVec& x, const ControlVec& u, const Scenario& scen) {
  check_admissible(x[kR], x[kPhi]);
  StateVec f = coast_rhs(x, scen.mu);
  f[kVr] += u[kUr];
  f[kVt] += u[kUt];
  f[kVn] += u[kUn];
  f[kZ] = -u[kUN] / scen.c;
  return f;
}

StateVec affine_rhs(const ConvexState& x, const ConvexControl& u, const Scenario& scen) {
  return affine_rhs(x.vec(), u.vec(), scen);
}

ConvexState to_convex_state(const SpacecraftState& x) {
  if (!(x.m > 0.0)) throw DomainError("to_convex_state: non-positive mass");
  return {x.r, x.theta, x.phi, x.v_r, x.v_t, x.v_n, std::log(x.m)};
}

SpacecraftState from_convex_state(const ConvexState& x) {
  return {x.r, x.theta, x.phi, x.v_r, x.v_t, x.v_n, std::exp(x.z)};
}

ConvexControl to_convex_control(const ControlRTN& u, double m) {
  if (!(m > 0.0)) throw DomainError("to_convex_control: non-positive mass");
  return {u.t_r / m, u.t_t / m, u.t_n / m, u.magnitude() / m};
}

ControlRTN from_convex_control(const ConvexControl& u, double m) {
  return {u.u_r * m, u.u_t * m, u.u_n * m};
}

SpacecraftState coasting_state(const Scenario& scen, Sat sat, double t) {
  const int k = index_of(sat);
  const double node = scen.theta0[k];
  const double inc = scen.inc[k];
  const double rate = std::sqrt(scen.mu / (scen.r0 * scen.r0 * scen.r0));
  const double speed = scen.r0 * rate;
  const double arg = rate * t;

  // In-plane position/velocity, then rotate by inclination about x and by the
  // node right ascension about z.
  const Eigen::Vector3d p_plane(std::cos(arg), std::sin(arg), 0.0);
  const Eigen::Vector3d v_plane(-std::sin(arg), std::cos(arg), 0.0);
  const Eigen::Matrix3d rot =
      (Eigen::AngleAxisd(node, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(inc, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  const Eigen::Vector3d pos = scen.r0 * (rot * p_plane);
  const Eigen::Vector3d vel = speed * (rot * v_plane);

  const double r = pos.norm();
  const double phi = std::asin(pos.z() / r);
  double theta = std::atan2(pos.y(), pos.x());
  // Unwrap next to node + arg: right ascension trails the argument of
  // latitude by less than a quarter turn.
  const double two_pi = 2.0 * std::numbers::pi;
  theta += two_pi * std::round((node + arg - theta) / two_pi);

  const Eigen::Vector3d e_r = pos / r;
  const Eigen::Vector3d e_t(-std::sin(theta), std::cos(theta), 0.0);
  const Eigen::Vector3d e_n(-std::sin(phi) * std::cos(theta), -std::sin(phi) * std::sin(theta),
                            std::cos(phi));
  return {r, theta, phi, vel.dot(e_r), vel.dot(e_t), vel.dot(e_n), scen.m0};
}

Cartesian to_cartesian(const StateVec& x) {
  const double r = x[kR];
  const double th = x[kTheta];
  const double ph = x[kPhi];
  const Eigen::Vector3d e_r(std::cos(ph) * std::cos(th), std::cos(ph) * std::sin(th), std::sin(ph));
  const Eigen::Vector3d e_t(-std::sin(th), std::cos(th), 0.0);
  const Eigen::Vector3d e_n(-std::sin(ph) * std::cos(th), -std::sin(ph) * std::sin(th),
                            std::cos(ph));
  return {r * e_r, x[kVr] * e_r + x[kVt] * e_t + x[kVn] * e_n};
}

double inclination_of(const StateVec& x) {
  const Cartesian cart = to_cartesian(x);
  const Eigen::Vector3d h = cart.pos.cross(cart.vel);
  return std::acos(std::clamp(h.z() / h.norm(), -1.0, 1.0));
}

}  // namespace rdv
