#pragma once

// First-order expansion of the control-affine dynamics and of the nonconvex
// constraints about a reference trajectory.

#include <string>
#include <vector>

#include "rdv/dynamics.hpp"

namespace rdv {

/// x' ~ a * x + b * u + c about one reference state.
struct NodeLinearization {
  StateMat a = StateMat::Zero();
  ControlMat b = ControlMat::Zero();
  StateVec c = StateVec::Zero();
};

struct LinearizedDynamics {
  std::vector<NodeLinearization> nodes;
  std::vector<double> node_times;
};

/// Analytic Jacobian of the coast part of affine_rhs with respect to the state.
StateMat coast_jacobian(const StateVec& x, const Scenario& scen);

/// Control coefficient matrix; exact, state independent.
ControlMat control_matrix(const Scenario& scen);

NodeLinearization linearize_dynamics(const StateVec& x_ref, const Scenario& scen);
NodeLinearization linearize_dynamics(const ConvexState& x_ref, const Scenario& scen);

enum class Sense { kLessEq, kEqual };

/// sum(coeff * var) (sense) rhs over named scalar variables.
struct AffineScalarConstraint {
  struct Term {
    std::string var;
    double coeff = 0.0;
  };
  std::vector<Term> terms;
  double rhs = 0.0;
  Sense sense = Sense::kLessEq;

  double coeff_of(const std::string& var) const;
  /// lhs - rhs at the given point (missing names read as zero).
  double evaluate(const std::vector<std::pair<std::string, double>>& point) const;
};

/// u_N <= t_max * exp(-z_ref) * (1 - (z - z_ref)), written as
/// u_N + t_max * exp(-z_ref) * z <= t_max * exp(-z_ref) * (1 + z_ref).
/// Variables: "u_N", "z".
AffineScalarConstraint linearize_un_bound(double z_ref, double t_max);

/// Value of the linearized cap at z.
double linearized_un_cap(double z_ref, double t_max, double z);

/// 2 vt_ref v_t + 2 vn_ref v_n = mu/rf + vt_ref^2 + vn_ref^2.
/// Variables: "v_t", "v_n".
AffineScalarConstraint linearize_final_velocity(double vt_ref, double vn_ref,
                                                const Scenario& scen);

}  // namespace rdv
