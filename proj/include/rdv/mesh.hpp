#pragma once

// Discretization-error estimation on a solved trajectory and node insertion.

#include <array>
#include <iosfwd>
#include <vector>

#include "rdv/transcription.hpp"

namespace rdv {

/// Cubic Hermite states (node values and dynamics slopes) and piecewise-linear
/// controls over the mesh of a TrajectoryPair.
class ContinuousTrajectory {
 public:
  ContinuousTrajectory(TrajectoryPair traj, const Scenario& scen);

  const TrajectoryPair& nodes() const { return traj_; }
  StateVec state(Sat s, double t) const;
  ControlVec control(Sat s, double t) const;
  StateVec slope(Sat s, int node) const { return f_[index_of(s)].col(node); }

 private:
  int interval_of(double t) const;

  TrajectoryPair traj_;
  std::array<StateTraj, 2> f_;
};

ContinuousTrajectory spline_reconstruct(const TrajectoryPair& traj, const Scenario& scen);

struct MeshErrorReport {
  std::array<StateTraj, 2> eta;  // column j: interval [t_j, t_j+1]
  double max_eta = 0.0;
  double tol = 0.0;
  std::vector<int> above_tol;

  int intervals() const { return static_cast<int>(eta[0].cols()); }
  /// Largest component over both spacecraft on interval j.
  double interval_max(int j) const;
};

struct ErrorOptions {
  double tol = 1e-6;
  bool relative = false;  // divide each component by 1 + |x_j|
};

MeshErrorReport estimate_errors(const ContinuousTrajectory& cont, const Mesh& mesh, const Scenario& scen,
                                const ErrorOptions& opts = {});

/// Points added per interval by greedy minimax on eta_j / (1 + n_j)^3.
std::vector<int> allocate_points(const std::vector<double>& eta, double tol, int budget);

/// Adds allocate_points(...) equispaced interior nodes to each interval, with a
/// budget of floor(growth_cap * M) points.
Mesh refine(const Mesh& mesh, const MeshErrorReport& report, double tol, double growth_cap);

TrajectoryPair interpolate_onto(const TrajectoryPair& traj, const Mesh& new_mesh, const Scenario& scen);

/// interval, sat, t, h, eta_r .. eta_z, flagged
void write_error_csv(const MeshErrorReport& report, const Mesh& mesh, std::ostream& out);

}  // namespace rdv
