#include "rdv/transcription.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdv/linearization.hpp"

namespace rdv {

namespace {

using Terms = std::vector<std::pair<int, double>>;

}  // namespace

Mesh::Mesh(std::vector<double> times) : t_(std::move(times)) {
  if (t_.size() < 2) throw std::invalid_argument("mesh needs at least 2 nodes");
  if (t_.front() != 0.0) throw std::invalid_argument("mesh must start at t = 0");
  for (std::size_t j = 0; j + 1 < t_.size(); ++j) {
    if (!(t_[j + 1] > t_[j])) {
      throw std::invalid_argument("mesh times not strictly increasing at node " + std::to_string(j + 1));
    }
  }
}

Mesh build_mesh(double tf, int m_nodes) {
  if (m_nodes < 2) throw std::invalid_argument("build_mesh: m_nodes must be at least 2");
  if (!(tf > 0.0)) throw std::invalid_argument("build_mesh: tf must be positive");
  std::vector<double> t(m_nodes);
  for (int j = 0; j < m_nodes; ++j) t[j] = tf * j / (m_nodes - 1);
  t.back() = tf;
  return Mesh(std::move(t));
}

TrajectoryPair::TrajectoryPair(Mesh m) : mesh(std::move(m)) {
  for (int s = 0; s < 2; ++s) {
    x[s] = StateTraj::Zero(kNx, mesh.size());
    u[s] = ControlTraj::Zero(kNu, mesh.size());
  }
}

void TrajectoryPair::check_shape() const {
  for (int s = 0; s < 2; ++s) {
    if (x[s].cols() != mesh.size() || u[s].cols() != mesh.size()) {
      throw std::invalid_argument("trajectory arrays do not match the mesh (" +
                                  std::to_string(x[s].cols()) + " states, " +
                                  std::to_string(u[s].cols()) + " controls, " +
                                  std::to_string(mesh.size()) + " nodes)");
    }
  }
}

StateVec trapezoid_defect(const StateVec& x_j, const StateVec& x_j1, const StateVec& f_j,
                          const StateVec& f_j1, double h) {
  return x_j1 - x_j - 0.5 * h * (f_j + f_j1);
}

DiscreteProblemLayout::DiscreteProblemLayout(int m_nodes) : m_(m_nodes) {
  if (m_nodes < 2) throw std::invalid_argument("layout needs at least 2 nodes");
}

socp::SocpProblem assemble_socp(const Scenario& scen, const TrajectoryPair& ref,
                                DiscreteProblemLayout& layout, const TranscriptionOptions& opts) {
  ref.check_shape();
  const int m = layout.nodes();
  if (ref.nodes() != m) {
    throw std::invalid_argument("reference has " + std::to_string(ref.nodes()) +
                                " nodes, layout expects " + std::to_string(m));
  }
  const bool planar = scen.coplanar();
  // In the plane, phi and v_n are pinned to zero and their rows would be
  // linear combinations of the pins.
  auto active = [planar](int comp) { return !(planar && (comp == kPhi || comp == kVn)); };

  socp::SocpProblem p(layout.n_vars());
  layout.equality_tags.clear();
  layout.inequality_tags.clear();
  auto add_eq = [&](const Terms& terms, double rhs, RowTag tag) {
    p.equalities.add_row(terms, rhs);
    layout.equality_tags.push_back(tag);
  };

  const ControlMat b = control_matrix(scen);
  for (Sat sat : kBothSats) {
    const StateTraj& xr = ref.states(sat);
    std::vector<NodeLinearization> lin(m);
    for (int j = 0; j < m; ++j) lin[j] = linearize_dynamics(StateVec(xr.col(j)), scen);

    for (int j = 0; j + 1 < m; ++j) {
      const double hh = 0.5 * ref.mesh.h(j);
      const StateMat lhs_next = StateMat::Identity() - hh * lin[j + 1].a;
      const StateMat lhs_prev = -StateMat::Identity() - hh * lin[j].a;
      const StateVec rhs = hh * (lin[j].c + lin[j + 1].c);
      for (int i = 0; i < kNx; ++i) {
        if (!active(i)) continue;
        Terms terms;
        for (int k = 0; k < kNx; ++k) {
          if (lhs_next(i, k) != 0.0) terms.emplace_back(layout.state_col(sat, j + 1, k), lhs_next(i, k));
          if (lhs_prev(i, k) != 0.0) terms.emplace_back(layout.state_col(sat, j, k), lhs_prev(i, k));
        }
        for (int k = 0; k < kNu; ++k) {
          if (b(i, k) == 0.0) continue;
          terms.emplace_back(layout.control_col(sat, j, k), -hh * b(i, k));
          terms.emplace_back(layout.control_col(sat, j + 1, k), -hh * b(i, k));
        }
        add_eq(terms, rhs[i], {RowTag::Kind::kDefect, sat, j, i});
      }
    }

    const StateVec x0 = to_convex_state(coasting_state(scen, sat, 0.0)).vec();
    for (int i = 0; i < kNx; ++i) {
      if (!active(i)) continue;
      add_eq({{layout.state_col(sat, 0, i), 1.0}}, x0[i], {RowTag::Kind::kInitial, sat, 0, i});
    }

    for (int j = 0; j < m; ++j) {
      const int un = layout.control_col(sat, j, kUN);
      p.cones.push_back({un, layout.control_col(sat, j, kUr), layout.control_col(sat, j, kUt),
                         layout.control_col(sat, j, kUn)});
      p.bounds.push_back({un, 0.0, socp::kInf});
      const AffineScalarConstraint cap = linearize_un_bound(xr(kZ, j), scen.t_max);
      p.inequalities.add_row({{un, cap.coeff_of("u_N")}, {layout.state_col(sat, j, kZ), cap.coeff_of("z")}},
                             cap.rhs);
      layout.inequality_tags.push_back({RowTag::Kind::kThrustCap, sat, j, kUN});
      if (planar) {
        p.bounds.push_back({layout.state_col(sat, j, kPhi), 0.0, 0.0});
        p.bounds.push_back({layout.state_col(sat, j, kVn), 0.0, 0.0});
        p.bounds.push_back({layout.control_col(sat, j, kUn), 0.0, 0.0});
      }
    }

    const double w = opts.objective == ObjectiveMode::kLinearizedMass ? std::exp(xr(kZ, m - 1)) : 1.0;
    p.cost[layout.state_col(sat, m - 1, kZ)] = -w;
  }

  const int last = m - 1;
  for (int i = 0; i < kZ; ++i) {
    if (!active(i)) continue;
    if (i == kTheta && !opts.rendezvous_theta) continue;
    const double rhs = i == kTheta ? 2.0 * std::numbers::pi * scen.k_rev : 0.0;
    add_eq({{layout.state_col(Sat::I, last, i), 1.0}, {layout.state_col(Sat::II, last, i), -1.0}}, rhs,
           {RowTag::Kind::kRendezvous, Sat::I, last, i});
  }

  const Sat ts = opts.terminal_sat;
  add_eq({{layout.state_col(ts, last, kR), 1.0}}, scen.rf, {RowTag::Kind::kTerminal, ts, last, kR});
  add_eq({{layout.state_col(ts, last, kVr), 1.0}}, 0.0, {RowTag::Kind::kTerminal, ts, last, kVr});
  if (planar) {
    add_eq({{layout.state_col(ts, last, kVt), 1.0}}, std::sqrt(scen.mu / scen.rf),
           {RowTag::Kind::kTerminal, ts, last, -1});
  } else {
    const StateTraj& xr = ref.states(ts);
    const AffineScalarConstraint v = linearize_final_velocity(xr(kVt, last), xr(kVn, last), scen);
    add_eq({{layout.state_col(ts, last, kVt), v.coeff_of("v_t")},
            {layout.state_col(ts, last, kVn), v.coeff_of("v_n")}},
           v.rhs, {RowTag::Kind::kTerminal, ts, last, -1});
  }
  return p;
}

Eigen::VectorXd pack(const TrajectoryPair& traj, const DiscreteProblemLayout& layout) {
  traj.check_shape();
  Eigen::VectorXd v(layout.n_vars());
  for (Sat s : kBothSats) {
    for (int j = 0; j < layout.nodes(); ++j) {
      v.segment<kNx>(layout.state_col(s, j, 0)) = traj.states(s).col(j);
      v.segment<kNu>(layout.control_col(s, j, 0)) = traj.controls(s).col(j);
    }
  }
  return v;
}

TrajectoryPair unpack(const Eigen::VectorXd& v, const DiscreteProblemLayout& layout, const Mesh& mesh) {
  if (v.size() != layout.n_vars() || mesh.size() != layout.nodes()) {
    throw std::invalid_argument("vector, layout and mesh sizes disagree");
  }
  TrajectoryPair out(mesh);
  for (Sat s : kBothSats) {
    for (int j = 0; j < layout.nodes(); ++j) {
      out.states(s).col(j) = v.segment<kNx>(layout.state_col(s, j, 0));
      out.controls(s).col(j) = v.segment<kNu>(layout.control_col(s, j, 0));
    }
  }
  return out;
}

TrajectoryPair extract_solution(const socp::SocpSolution& sol, const DiscreteProblemLayout& layout,
                                const Mesh& mesh) {
  if (sol.status != socp::Status::kOptimal) {
    throw UnavailableSolution(std::string("no solution to extract: solver status ") +
                              socp::to_string(sol.status));
  }
  return unpack(sol.primal, layout, mesh);
}

double linearized_final_mass(const TrajectoryPair& sol, const TrajectoryPair& ref) {
  double total = 0.0;
  for (Sat s : kBothSats) {
    const double z_ref = ref.states(s)(kZ, ref.nodes() - 1);
    const double z = sol.states(s)(kZ, sol.nodes() - 1);
    total += std::exp(z_ref) * (1.0 + z - z_ref);
  }
  return total;
}

}  // namespace rdv
