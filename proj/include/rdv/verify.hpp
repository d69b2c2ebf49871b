#pragma once

// Independent checks of a solved trajectory: nonlinear propagation, terminal
// residuals, relaxation exactness, and the impulsive-transfer oracle.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdv/transcription.hpp"

namespace rdv {

/// Piecewise-linear control history. Thrust profiles interpolate T; acceleration
/// profiles interpolate u and apply T = u m along the trajectory.
struct ControlProfile {
  enum class Kind { kThrust, kAcceleration };
  Kind kind = Kind::kThrust;
  std::vector<double> t;
  std::vector<Eigen::Vector3d> values;

  Eigen::Vector3d at(double time) const;
  ControlRTN thrust(double time, double mass) const;
};

/// Profile of one spacecraft of a solved trajectory.
ControlProfile control_profile(const TrajectoryPair& traj, Sat s,
                               ControlProfile::Kind kind = ControlProfile::Kind::kAcceleration);

struct StateHistory {
  std::vector<double> t;
  std::vector<SpacecraftState> x;
};

/// Raised when integration reaches the polar or r = 0 singularity.
class PropagationError : public DomainError {
 public:
  PropagationError(const std::string& what, double t) : DomainError(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct PropagationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
};

/// Adaptive Dormand-Prince integration of the original equations, restarted at
/// every profile node. The history holds the state at each node inside t_span.
StateHistory propagate_nonlinear(const SpacecraftState& x0, const ControlProfile& controls, const Scenario& scen,
                                 double t0, double t1, const PropagationOptions& opts = {});

/// max over nodes with u_N > threshold of | ||(u_r,u_t,u_n)|| - u_N |.
double relaxation_exactness(const TrajectoryPair& traj, double threshold);

struct TerminalResiduals {
  double theta = 0.0;     // |theta_I - theta_II - 2 pi k_rev|
  double radius = 0.0;    // |r - rf|
  double radial_v = 0.0;  // |v_r|
  double speed = 0.0;     // |v_t^2 + v_n^2 - mu / rf|
  double matching = 0.0;  // max |x_I - x_II| over r, phi, v_r, v_t, v_n

  double max() const;
};

struct VerificationReport {
  TerminalResiduals terminal;             // on the discrete solution
  TerminalResiduals propagated_terminal;  // on the propagated end states
  double max_defect_vs_propagation = 0.0;
  double relaxation_gap = 0.0;
  std::array<double, 2> propellant{};
  double propellant_total = 0.0;
};

struct VerifyOptions {
  bool rendezvous_theta = true;
  Sat terminal_sat = Sat::I;
  bool propagate = true;
  double burn_threshold = 1e-4;  // times t_max
  ControlProfile::Kind profile = ControlProfile::Kind::kAcceleration;
  PropagationOptions propagation;
};

TerminalResiduals terminal_residuals(const std::array<StateVec, 2>& end, const Scenario& scen,
                                     const VerifyOptions& opts = {});

VerificationReport constraint_residuals(const TrajectoryPair& traj, const Scenario& scen,
                                        const VerifyOptions& opts = {});

struct HohmannResult {
  double dv_total = 0.0;
  double dm = 0.0;
};

HohmannResult hohmann_oracle(double r0, double rf, double c, double mu = 1.0, double m0 = 1.0);

enum class Family { kNone, kA, kB };
const char* to_string(Family f);

struct PhasingReport {
  double dm_transfer = 0.0;  // per spacecraft
  std::array<double, 2> dm_phasing{};
  double dm_phasing_total = 0.0;
  Family family = Family::kNone;
};

/// Raised when a run spends less than its transfer-only cost.
class DataInconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhasingOptions {
  double tolerance = 1e-3;  // phasing below this is null
  double family_b_revolutions = 1.75;
  bool per_spacecraft_check = true;  // also reject negative phasing of each spacecraft
};

/// Splits each spacecraft's propellant into the per-spacecraft transfer cost and
/// phasing duty. Throws DataInconsistency on negative phasing beyond tolerance.
PhasingReport phasing_split(const std::array<double, 2>& run_dm, double transfer_dm, double theta_span_sat_ii,
                            const PhasingOptions& opts = {});

/// Propellant used by each spacecraft, m0 (1 - exp(z_f - z_0)).
std::array<double, 2> propellant_used(const TrajectoryPair& traj, const Scenario& scen);

/// theta(tf) - theta(0) of one spacecraft.
double theta_span(const TrajectoryPair& traj, Sat s);

/// Inclination (deg) of the terminal orbit of one spacecraft.
double final_inclination_deg(const TrajectoryPair& traj, Sat s = Sat::I);

/// Angle (deg) between the initial and final orbit planes of one spacecraft.
double plane_change_deg(const TrajectoryPair& traj, Sat s);

}  // namespace rdv
