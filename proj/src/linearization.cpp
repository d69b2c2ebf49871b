#include "rdv/linearization.hpp"

#include <cmath>

namespace rdv {

StateMat coast_jacobian(const StateVec& x, const Scenario& scen) {
  const double r = x[kR];
  const double phi = x[kPhi];
  const double vr = x[kVr];
  const double vt = x[kVt];
  const double vn = x[kVn];
  if (!(r > 0.0)) throw DomainError("coast_jacobian: non-positive radius");
  if (!(std::abs(phi) < kMaxLatitude)) throw SingularityError("coast_jacobian: polar latitude");

  const double mu = scen.mu;
  const double cp = std::cos(phi);
  const double tp = std::tan(phi);
  const double sec2 = 1.0 / (cp * cp);
  const double r2 = r * r;

  StateMat a = StateMat::Zero();
  a(kR, kVr) = 1.0;

  a(kTheta, kR) = -vt / (r2 * cp);
  a(kTheta, kPhi) = vt * std::sin(phi) * sec2 / r;
  a(kTheta, kVt) = 1.0 / (r * cp);

  a(kPhi, kR) = -vn / r2;
  a(kPhi, kVn) = 1.0 / r;

  a(kVr, kR) = -(vt * vt + vn * vn) / r2 + 2.0 * mu / (r2 * r);
  a(kVr, kVt) = 2.0 * vt / r;
  a(kVr, kVn) = 2.0 * vn / r;

  a(kVt, kR) = vr * vt / r2 - vt * vn * tp / r2;
  a(kVt, kPhi) = vt * vn * sec2 / r;
  a(kVt, kVr) = -vt / r;
  a(kVt, kVt) = -vr / r + vn * tp / r;
  a(kVt, kVn) = vt * tp / r;

  a(kVn, kR) = vr * vn / r2 + vt * vt * tp / r2;
  a(kVn, kPhi) = -vt * vt * sec2 / r;
  a(kVn, kVr) = -vn / r;
  a(kVn, kVt) = -2.0 * vt * tp / r;
  a(kVn, kVn) = -vr / r;
  return a;
}

ControlMat control_matrix(const Scenario& scen) {
  ControlMat b = ControlMat::Zero();
  b(kVr, kUr) = 1.0;
  b(kVt, kUt) = 1.0;
  b(kVn, kUn) = 1.0;
  b(kZ, kUN) = -1.0 / scen.c;
  return b;
}

NodeLinearization linearize_dynamics(const StateVec& x_ref, const Scenario& scen) {
  NodeLinearization lin;
  lin.a = coast_jacobian(x_ref, scen);
  lin.b = control_matrix(scen);
  lin.c = affine_rhs(x_ref, ControlVec::Zero(), scen) - lin.a * x_ref;
  return lin;
}

NodeLinearization linearize_dynamics(const ConvexState& x_ref, const Scenario& scen) {
  return linearize_dynamics(x_ref.vec(), scen);
}

double AffineScalarConstraint::coeff_of(const std::string& var) const {
  double sum = 0.0;
  for (const Term& t : terms) {
    if (t.var == var) sum += t.coeff;
  }
  return sum;
}

double AffineScalarConstraint::evaluate(
    const std::vector<std::pair<std::string, double>>& point) const {
  double lhs = 0.0;
  for (const auto& [name, value] : point) lhs += coeff_of(name) * value;
  return lhs - rhs;
}

AffineScalarConstraint linearize_un_bound(double z_ref, double t_max) {
  const double k = t_max * std::exp(-z_ref);
  return {{{"u_N", 1.0}, {"z", k}}, k * (1.0 + z_ref), Sense::kLessEq};
}

double linearized_un_cap(double z_ref, double t_max, double z) {
  return t_max * std::exp(-z_ref) * (1.0 - (z - z_ref));
}

AffineScalarConstraint linearize_final_velocity(double vt_ref, double vn_ref,
                                                const Scenario& scen) {
  return {{{"v_t", 2.0 * vt_ref}, {"v_n", 2.0 * vn_ref}},
          scen.mu / scen.rf + vt_ref * vt_ref + vn_ref * vn_ref,
          Sense::kEqual};
}

}  // namespace rdv
