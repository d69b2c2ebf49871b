#pragma once

// Trapezoidal transcription of one convexified subproblem into an SOCP.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdv/dynamics.hpp"
#include "rdv/socp.hpp"

namespace rdv {

/// Node times t_0 = 0 < t_1 < ... < t_{M-1} = tf.
class Mesh {
 public:
  Mesh() = default;
  /// Throws std::invalid_argument unless strictly increasing, starting at 0, M >= 2.
  explicit Mesh(std::vector<double> times);

  int size() const { return static_cast<int>(t_.size()); }
  double t(int j) const { return t_[j]; }
  double h(int j) const { return t_[j + 1] - t_[j]; }
  double tf() const { return t_.back(); }
  const std::vector<double>& times() const { return t_; }

  bool operator==(const Mesh&) const = default;

 private:
  std::vector<double> t_;
};

Mesh build_mesh(double tf, int m_nodes);

using StateTraj = Eigen::Matrix<double, kNx, Eigen::Dynamic>;
using ControlTraj = Eigen::Matrix<double, kNu, Eigen::Dynamic>;

/// Convex states and controls of both spacecraft on one mesh; column j is node j.
struct TrajectoryPair {
  Mesh mesh;
  std::array<StateTraj, 2> x;
  std::array<ControlTraj, 2> u;

  TrajectoryPair() = default;
  explicit TrajectoryPair(Mesh m);

  int nodes() const { return mesh.size(); }
  StateTraj& states(Sat s) { return x[index_of(s)]; }
  const StateTraj& states(Sat s) const { return x[index_of(s)]; }
  ControlTraj& controls(Sat s) { return u[index_of(s)]; }
  const ControlTraj& controls(Sat s) const { return u[index_of(s)]; }

  /// Throws std::invalid_argument if array widths differ from the mesh.
  void check_shape() const;
};

/// x_{j+1} - x_j - h/2 (f_j + f_{j+1}).
StateVec trapezoid_defect(const StateVec& x_j, const StateVec& x_j1, const StateVec& f_j,
                          const StateVec& f_j1, double h);

enum class ObjectiveMode {
  kLinearizedMass,  // maximize sum of exp(z_ref)(1 + z - z_ref) at tf
  kLogMass,         // maximize sum of z at tf
};

struct TranscriptionOptions {
  bool rendezvous_theta = true;  // false: transfer-only problem
  Sat terminal_sat = Sat::I;
  ObjectiveMode objective = ObjectiveMode::kLinearizedMass;
};

/// What a constraint row encodes, for diagnostics and tests.
struct RowTag {
  enum class Kind { kDefect, kInitial, kRendezvous, kTerminal, kThrustCap };
  Kind kind = Kind::kDefect;
  Sat sat = Sat::I;
  int node = 0;
  int component = 0;  // state index, or -1 for the terminal speed row
};

/// Column map (sat, node, component) -> column, with components 0..6 the
/// states and 7..10 the controls, plus the row tags of an assembled problem.
class DiscreteProblemLayout {
 public:
  static constexpr int kPerNode = kNx + kNu;

  explicit DiscreteProblemLayout(int m_nodes);

  int nodes() const { return m_; }
  int n_vars() const { return 2 * m_ * kPerNode; }
  int state_col(Sat s, int node, int comp) const { return (index_of(s) * m_ + node) * kPerNode + comp; }
  int control_col(Sat s, int node, int comp) const { return state_col(s, node, kNx + comp); }

  std::vector<RowTag> equality_tags;
  std::vector<RowTag> inequality_tags;

 private:
  int m_ = 0;
};

/// One SCvx subproblem linearized about `ref`. Fills the layout's row tags.
socp::SocpProblem assemble_socp(const Scenario& scen, const TrajectoryPair& ref,
                                DiscreteProblemLayout& layout,
                                const TranscriptionOptions& opts = {});

/// Raised when a solution without a usable primal point is unpacked.
class UnavailableSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requires an optimal status.
TrajectoryPair extract_solution(const socp::SocpSolution& sol, const DiscreteProblemLayout& layout,
                                const Mesh& mesh);

TrajectoryPair unpack(const Eigen::VectorXd& v, const DiscreteProblemLayout& layout, const Mesh& mesh);
Eigen::VectorXd pack(const TrajectoryPair& traj, const DiscreteProblemLayout& layout);

/// Sum of final masses under the objective's mass model for a given reference.
double linearized_final_mass(const TrajectoryPair& sol, const TrajectoryPair& ref);

}  // namespace rdv
