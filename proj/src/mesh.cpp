#include "rdv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <queue>

namespace rdv {

ContinuousTrajectory::ContinuousTrajectory(TrajectoryPair traj, const Scenario& scen) : traj_(std::move(traj)) {
  traj_.check_shape();
  for (Sat s : kBothSats) {
    StateTraj& f = f_[index_of(s)];
    f.resize(kNx, traj_.nodes());
    for (int j = 0; j < traj_.nodes(); ++j) {
      f.col(j) = affine_rhs(StateVec(traj_.states(s).col(j)), ControlVec(traj_.controls(s).col(j)), scen);
    }
  }
}

int ContinuousTrajectory::interval_of(double t) const {
  const auto& times = traj_.mesh.times();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const int j = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(j, 0, traj_.nodes() - 2);
}

StateVec ContinuousTrajectory::state(Sat s, double t) const {
  const int j = interval_of(t);
  const double h = traj_.mesh.h(j);
  const double u = (t - traj_.mesh.t(j)) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  const int k = index_of(s);
  return h00 * traj_.x[k].col(j) + h10 * h * f_[k].col(j) + h01 * traj_.x[k].col(j + 1) +
         h11 * h * f_[k].col(j + 1);
}

ControlVec ContinuousTrajectory::control(Sat s, double t) const {
  const int j = interval_of(t);
  const double u = (t - traj_.mesh.t(j)) / traj_.mesh.h(j);
  const int k = index_of(s);
  return (1.0 - u) * traj_.u[k].col(j) + u * traj_.u[k].col(j + 1);
}

ContinuousTrajectory spline_reconstruct(const TrajectoryPair& traj, const Scenario& scen) {
  return ContinuousTrajectory(traj, scen);
}

double MeshErrorReport::interval_max(int j) const {
  return std::max(eta[0].col(j).maxCoeff(), eta[1].col(j).maxCoeff());
}

MeshErrorReport estimate_errors(const ContinuousTrajectory& cont, const Mesh& mesh, const Scenario& scen,
                                const ErrorOptions& opts) {
  MeshErrorReport rep;
  rep.tol = opts.tol;
  const int n = mesh.size() - 1;
  for (Sat s : kBothSats) {
    StateTraj& eta = rep.eta[index_of(s)];
    eta.resize(kNx, n);
    for (int j = 0; j < n; ++j) {
      const double t0 = mesh.t(j);
      const double h = mesh.h(j);
      const double t2 = t0 + 0.5 * h;
      const double t3 = t0 + h;
      const StateVec x0 = cont.state(s, t0);
      const StateVec x2 = cont.state(s, t2);
      const StateVec x3 = cont.state(s, t3);
      const StateVec f1 = affine_rhs(x0, cont.control(s, t0), scen);
      const StateVec f2 = affine_rhs(x2, cont.control(s, t2), scen);
      const StateVec f3 = affine_rhs(x3, cont.control(s, t3), scen);
      StateVec e = 0.5 * (x3 - x0 - 0.25 * h * (f3 + 2.0 * f2 + f1)).cwiseAbs();
      if (opts.relative) e = e.cwiseQuotient((StateVec::Ones() + x0.cwiseAbs()));
      eta.col(j) = e;
    }
  }
  for (int j = 0; j < n; ++j) {
    const double m = rep.interval_max(j);
    rep.max_eta = std::max(rep.max_eta, m);
    if (m > opts.tol) rep.above_tol.push_back(j);
  }
  return rep;
}

std::vector<int> allocate_points(const std::vector<double>& eta, double tol, int budget) {
  std::vector<int> n(eta.size(), 0);
  auto predicted = [&](std::size_t j) { return eta[j] / std::pow(1.0 + n[j], 3); };
  // Max-heap on predicted error; ties go to the lower interval index.
  auto worse = [&](std::size_t a, std::size_t b) {
    const double pa = predicted(a);
    const double pb = predicted(b);
    return pa < pb || (pa == pb && a > b);
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (eta[j] > tol) heap.push(j);
  }
  for (int used = 0; used < budget && !heap.empty(); ++used) {
    const std::size_t j = heap.top();
    heap.pop();
    ++n[j];
    if (predicted(j) > tol) heap.push(j);
  }
  return n;
}

Mesh refine(const Mesh& mesh, const MeshErrorReport& report, double tol, double growth_cap) {
  if (!(tol > 0.0)) throw std::invalid_argument("refine: tol must be positive");
  std::vector<double> eta(report.intervals());
  for (int j = 0; j < report.intervals(); ++j) eta[j] = report.interval_max(j);
  const int budget = static_cast<int>(std::floor(growth_cap * mesh.size()));
  const std::vector<int> add = allocate_points(eta, tol, budget);
  std::vector<double> t;
  t.reserve(mesh.size() + budget);
  for (int j = 0; j + 1 < mesh.size(); ++j) {
    t.push_back(mesh.t(j));
    for (int k = 1; k <= add[j]; ++k) t.push_back(mesh.t(j) + mesh.h(j) * k / (add[j] + 1));
  }
  t.push_back(mesh.tf());
  return Mesh(std::move(t));
}

TrajectoryPair interpolate_onto(const TrajectoryPair& traj, const Mesh& new_mesh, const Scenario& scen) {
  if (new_mesh == traj.mesh) return traj;
  const ContinuousTrajectory cont(traj, scen);
  const auto& old_t = traj.mesh.times();
  TrajectoryPair out(new_mesh);
  for (Sat s : kBothSats) {
    for (int j = 0; j < new_mesh.size(); ++j) {
      const double t = new_mesh.t(j);
      const auto hit = std::lower_bound(old_t.begin(), old_t.end(), t);
      if (hit != old_t.end() && *hit == t) {
        const int k = static_cast<int>(hit - old_t.begin());
        out.states(s).col(j) = traj.states(s).col(k);
        out.controls(s).col(j) = traj.controls(s).col(k);
      } else {
        out.states(s).col(j) = cont.state(s, t);
        out.controls(s).col(j) = cont.control(s, t);
      }
    }
  }
  return out;
}

void write_error_csv(const MeshErrorReport& report, const Mesh& mesh, std::ostream& out) {
  out << "interval,sat,t,h,eta_r,eta_theta,eta_phi,eta_vr,eta_vt,eta_vn,eta_z,flagged\n";
  out << std::setprecision(17);
  for (int j = 0; j < report.intervals(); ++j) {
    for (Sat s : kBothSats) {
      const auto e = report.eta[index_of(s)].col(j);
      out << j << ',' << name_of(s) << ',' << mesh.t(j) << ',' << mesh.h(j);
      for (int i = 0; i < kNx; ++i) out << ',' << e[i];
      out << ',' << (e.maxCoeff() > report.tol ? 1 : 0) << '\n';
    }
  }
}

}  // namespace rdv
