#pragma once

// Two-body point-mass dynamics in polar position / LVLH velocity coordinates,
// normalized units (mu = r0 = m0 = 1 for the shipped scenarios).

#include <array>
#include <stdexcept>

#include <Eigen/Core>

namespace rdv {

inline constexpr int kNx = 7;  // r, theta, phi, v_r, v_t, v_n, z (or m)
inline constexpr int kNu = 4;  // u_r, u_t, u_n, u_N

using StateVec = Eigen::Matrix<double, kNx, 1>;
using ControlVec = Eigen::Matrix<double, kNu, 1>;
using StateMat = Eigen::Matrix<double, kNx, kNx>;
using ControlMat = Eigen::Matrix<double, kNx, kNu>;

enum StateIndex : int { kR = 0, kTheta, kPhi, kVr, kVt, kVn, kZ };
enum ControlIndex : int { kUr = 0, kUt, kUn, kUN };

/// Raised when a state leaves the domain of the equations of motion
/// (non-positive radius or mass).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised at the tan(phi) pole of the polar coordinates.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class Sat : int { I = 0, II = 1 };

inline constexpr std::array<Sat, 2> kBothSats{Sat::I, Sat::II};

inline int index_of(Sat s) { return static_cast<int>(s); }
const char* name_of(Sat s);

/// Mission and vehicle parameters. Both spacecraft share thrust, exhaust
/// velocity and initial mass; they differ in initial phase and inclination.
struct Scenario {
  double mu = 1.0;
  double r0 = 1.0;
  double rf = 1.2;
  double tf = 10.5;
  double t_max = 0.1;
  double c = 1.0;
  double m0 = 1.0;
  std::array<double, 2> theta0{3.141592653589793, 0.0};
  std::array<double, 2> inc{0.0, 0.0};
  int k_rev = 0;

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;

  /// Both spacecraft start on the equatorial plane; phi and v_n stay zero.
  bool coplanar() const { return inc[0] == 0.0 && inc[1] == 0.0; }
};

struct SpacecraftState {
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  double v_r = 0.0;
  double v_t = 1.0;
  double v_n = 0.0;
  double m = 1.0;

  StateVec vec() const { return {r, theta, phi, v_r, v_t, v_n, m}; }
};

struct ConvexState {
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  double v_r = 0.0;
  double v_t = 1.0;
  double v_n = 0.0;
  double z = 0.0;

  StateVec vec() const { return {r, theta, phi, v_r, v_t, v_n, z}; }
  static ConvexState from_vec(const StateVec& v) {
    return {v[kR], v[kTheta], v[kPhi], v[kVr], v[kVt], v[kVn], v[kZ]};
  }
};

struct ControlRTN {
  double t_r = 0.0;
  double t_t = 0.0;
  double t_n = 0.0;

  double magnitude() const;
};

struct ConvexControl {
  double u_r = 0.0;
  double u_t = 0.0;
  double u_n = 0.0;
  double u_N = 0.0;

  ControlVec vec() const { return {u_r, u_t, u_n, u_N}; }
  static ConvexControl from_vec(const ControlVec& v) {
    return {v[kUr], v[kUt], v[kUn], v[kUN]};
  }
};

/// Largest admissible |phi|; the polar coordinates are singular at the pole.
inline constexpr double kMaxLatitude = 89.9 * 3.141592653589793 / 180.0;

Eigen::Vector3d gravity_accel(const Eigen::Vector3d& r_vec, double mu);

/// Original equations of motion; returns (r', theta', phi', v_r', v_t', v_n', m').
StateVec eom_rhs(const SpacecraftState& x, const ControlRTN& u, const Scenario& scen);

/// Control-affine form in (z, u); returns (..., z').
StateVec affine_rhs(const ConvexState& x, const ConvexControl& u, const Scenario& scen);

/// Same as affine_rhs on raw vectors, skipping the struct round trip.
StateVec affine_rhs(const StateVec& x, const ControlVec& u, const Scenario& scen);

ConvexState to_convex_state(const SpacecraftState& x);
SpacecraftState from_convex_state(const ConvexState& x);
ConvexControl to_convex_control(const ControlRTN& u, double m);
ControlRTN from_convex_control(const ConvexControl& u, double m);

/// Unperturbed circular coast on the initial orbit. The orbit's ascending node
/// lies at the satellite's initial right ascension, so every satellite starts
/// on the equator.
SpacecraftState coasting_state(const Scenario& scen, Sat sat, double t);

/// Inertial Cartesian position/velocity of a polar/LVLH state.
struct Cartesian {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
};
Cartesian to_cartesian(const StateVec& x);

/// Inclination (rad) of the osculating orbit through a polar/LVLH state.
double inclination_of(const StateVec& x);

}  // namespace rdv
