#include "rdv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <boost/numeric/odeint.hpp>

namespace rdv {

namespace {

using OdeState = std::array<double, kNx>;

SpacecraftState to_state(const OdeState& y) { return {y[0], y[1], y[2], y[3], y[4], y[5], y[6]}; }

OdeState to_ode(const SpacecraftState& x) { return {x.r, x.theta, x.phi, x.v_r, x.v_t, x.v_n, x.m}; }

Eigen::Vector3d angular_momentum(const StateVec& x) {
  const Cartesian c = to_cartesian(x);
  return c.pos.cross(c.vel);
}

}  // namespace

Eigen::Vector3d ControlProfile::at(double time) const {
  if (t.empty()) return Eigen::Vector3d::Zero();
  if (time <= t.front()) return values.front();
  if (time >= t.back()) return values.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t j = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (time - t[j]) / (t[j + 1] - t[j]);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

ControlRTN ControlProfile::thrust(double time, double mass) const {
  Eigen::Vector3d v = at(time);
  if (kind == Kind::kAcceleration) v *= mass;
  return {v.x(), v.y(), v.z()};
}

ControlProfile control_profile(const TrajectoryPair& traj, Sat s, ControlProfile::Kind kind) {
  ControlProfile p;
  p.kind = kind;
  p.t = traj.mesh.times();
  for (int j = 0; j < traj.nodes(); ++j) {
    Eigen::Vector3d u = traj.controls(s).col(j).head<3>();
    if (kind == ControlProfile::Kind::kThrust) u *= std::exp(traj.states(s)(kZ, j));
    p.values.push_back(u);
  }
  return p;
}

StateHistory propagate_nonlinear(const SpacecraftState& x0, const ControlProfile& controls, const Scenario& scen,
                                 double t0, double t1, const PropagationOptions& opts) {
  namespace ode = boost::numeric::odeint;
  auto rhs = [&](const OdeState& y, OdeState& dy, double t) {
    const SpacecraftState x = to_state(y);
    StateVec f;
    try {
      f = eom_rhs(x, controls.thrust(t, x.m), scen);
    } catch (const DomainError& e) {
      throw PropagationError(std::string(e.what()) + " at t = " + std::to_string(t), t);
    }
    for (int i = 0; i < kNx; ++i) dy[i] = f[i];
  };

  // Break the span at profile nodes, where the control has kinks.
  std::vector<double> stops{t0};
  for (double tk : controls.t) {
    if (tk > t0 && tk < t1) stops.push_back(tk);
  }
  stops.push_back(t1);

  StateHistory hist;
  OdeState y = to_ode(x0);
  hist.t.push_back(t0);
  hist.x.push_back(x0);
  auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol, ode::runge_kutta_dopri5<OdeState>());
  for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
    const double a = stops[k];
    const double b = stops[k + 1];
    ode::integrate_adaptive(stepper, rhs, y, a, b, std::min(0.01, b - a));
    hist.t.push_back(b);
    hist.x.push_back(to_state(y));
  }
  return hist;
}

double relaxation_exactness(const TrajectoryPair& traj, double threshold) {
  double gap = 0.0;
  for (Sat s : kBothSats) {
    const ControlTraj& u = traj.controls(s);
    for (int j = 0; j < traj.nodes(); ++j) {
      if (u(kUN, j) <= threshold) continue;
      gap = std::max(gap, std::abs(u.col(j).head<3>().norm() - u(kUN, j)));
    }
  }
  return gap;
}

double TerminalResiduals::max() const { return std::max({theta, radius, radial_v, speed, matching}); }

TerminalResiduals terminal_residuals(const std::array<StateVec, 2>& end, const Scenario& scen,
                                     const VerifyOptions& opts) {
  const StateVec& a = end[0];
  const StateVec& b = end[1];
  const StateVec& term = end[index_of(opts.terminal_sat)];
  TerminalResiduals r;
  if (opts.rendezvous_theta) {
    r.theta = std::abs(a[kTheta] - b[kTheta] - 2.0 * std::numbers::pi * scen.k_rev);
  }
  r.radius = std::abs(term[kR] - scen.rf);
  r.radial_v = std::abs(term[kVr]);
  r.speed = std::abs(term[kVt] * term[kVt] + term[kVn] * term[kVn] - scen.mu / scen.rf);
  for (int i : {kR, kPhi, kVr, kVt, kVn}) r.matching = std::max(r.matching, std::abs(a[i] - b[i]));
  return r;
}

VerificationReport constraint_residuals(const TrajectoryPair& traj, const Scenario& scen,
                                        const VerifyOptions& opts) {
  traj.check_shape();
  const int last = traj.nodes() - 1;
  VerificationReport rep;
  std::array<StateVec, 2> end;
  for (Sat s : kBothSats) end[index_of(s)] = traj.states(s).col(last);
  rep.terminal = terminal_residuals(end, scen, opts);
  rep.relaxation_gap = relaxation_exactness(traj, opts.burn_threshold * scen.t_max);
  rep.propellant = propellant_used(traj, scen);
  rep.propellant_total = rep.propellant[0] + rep.propellant[1];

  if (opts.propagate) {
    std::array<StateVec, 2> prop_end;
    for (Sat s : kBothSats) {
      const SpacecraftState x0 = from_convex_state(ConvexState::from_vec(traj.states(s).col(0)));
      const StateHistory h =
          propagate_nonlinear(x0, control_profile(traj, s, opts.profile), scen, 0.0, traj.mesh.tf(), opts.propagation);
      StateVec xf = to_convex_state(h.x.back()).vec();
      prop_end[index_of(s)] = xf;
      rep.max_defect_vs_propagation =
          std::max(rep.max_defect_vs_propagation, (xf - end[index_of(s)]).cwiseAbs().maxCoeff());
    }
    rep.propagated_terminal = terminal_residuals(prop_end, scen, opts);
  }
  return rep;
}

HohmannResult hohmann_oracle(double r0, double rf, double c, double mu, double m0) {
  if (!(r0 > 0.0 && rf > 0.0 && c > 0.0)) throw std::invalid_argument("hohmann_oracle: non-positive input");
  const double a = r0 + rf;
  const double dv1 = (std::sqrt(2.0 * rf / a) - 1.0) * std::sqrt(mu / r0);
  const double dv2 = std::sqrt(mu / rf) * (1.0 - std::sqrt(2.0 * r0 / a));
  HohmannResult out;
  out.dv_total = std::abs(dv1) + std::abs(dv2);
  out.dm = m0 * (1.0 - std::exp(-out.dv_total / c));
  return out;
}

const char* to_string(Family f) {
  switch (f) {
    case Family::kA:
      return "A";
    case Family::kB:
      return "B";
    case Family::kNone:
      break;
  }
  return "none";
}

PhasingReport phasing_split(const std::array<double, 2>& run_dm, double transfer_dm, double theta_span_sat_ii,
                            const PhasingOptions& opts) {
  PhasingReport rep;
  rep.dm_transfer = transfer_dm;
  for (int s = 0; s < 2; ++s) {
    rep.dm_phasing[s] = run_dm[s] - transfer_dm;
    if (opts.per_spacecraft_check && rep.dm_phasing[s] < -opts.tolerance) {
      throw DataInconsistency("satellite " + std::string(s == 0 ? "I" : "II") + " spends " +
                              std::to_string(run_dm[s]) + ", below the transfer cost " + std::to_string(transfer_dm));
    }
  }
  rep.dm_phasing_total = rep.dm_phasing[0] + rep.dm_phasing[1];
  if (rep.dm_phasing_total < -opts.tolerance) {
    throw DataInconsistency("total propellant " + std::to_string(run_dm[0] + run_dm[1]) +
                            " is below twice the transfer cost " + std::to_string(transfer_dm));
  }
  if (rep.dm_phasing_total > opts.tolerance) {
    const double revs = theta_span_sat_ii / (2.0 * std::numbers::pi);
    rep.family = revs >= opts.family_b_revolutions ? Family::kB : Family::kA;
  }
  return rep;
}

std::array<double, 2> propellant_used(const TrajectoryPair& traj, const Scenario& scen) {
  const int last = traj.nodes() - 1;
  std::array<double, 2> dm{};
  for (Sat s : kBothSats) {
    const auto& z = traj.states(s).row(kZ);
    dm[index_of(s)] = scen.m0 * (1.0 - std::exp(z[last] - z[0]));
  }
  return dm;
}

double theta_span(const TrajectoryPair& traj, Sat s) {
  const auto& th = traj.states(s).row(kTheta);
  return th[traj.nodes() - 1] - th[0];
}

double final_inclination_deg(const TrajectoryPair& traj, Sat s) {
  return inclination_of(traj.states(s).col(traj.nodes() - 1)) * 180.0 / std::numbers::pi;
}

double plane_change_deg(const TrajectoryPair& traj, Sat s) {
  const Eigen::Vector3d h0 = angular_momentum(traj.states(s).col(0));
  const Eigen::Vector3d hf = angular_momentum(traj.states(s).col(traj.nodes() - 1));
  const double c = std::clamp(h0.normalized().dot(hf.normalized()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace rdv
