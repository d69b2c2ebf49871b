#pragma once

// Random SOCPs with known optima, shared by the solver tests and the
// acceptance suite.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rdv/socp.hpp"

namespace rdv::socp::fixtures {

// Random problem with a known optimum. Pick x* in the cones, a complementary
// dual z*, a multiplier y; then c = A'y + z*, b = A x* make (x*, y, z*) a KKT
// point, so c'x* is optimal.
struct Constructed {
  SocpProblem problem;
  double optimum = 0.0;
};

inline Constructed kkt_problem(unsigned seed, int n_free = 4) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const int n_cone_vars = 16;  // cones of dimension 4, 3, 5, 1, 3
  const std::vector<int> dims{4, 3, 5, 1, 3};
  const int n = n_cone_vars + n_free;
  const int m = 8;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  SocpProblem p(n);
  int at = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int d = dims[k];
    std::vector<int> cone;
    for (int i = 0; i < d; ++i) cone.push_back(at + i);
    p.cones.push_back(cone);
    Eigen::VectorXd v(d - 1);
    for (int i = 0; i < d - 1; ++i) v[i] = g(rng);
    if (d == 1) v.resize(0);
    const double nv = v.size() ? v.norm() : 0.0;
    switch (k % 3) {
      case 0:  // boundary, strictly complementary
        x[at] = nv;
        x.segment(at + 1, d - 1) = v;
        z[at] = u(rng) * nv;
        z.segment(at + 1, d - 1) = -(z[at] / std::max(nv, 1e-300)) * v;
        if (d == 1) z[at] = u(rng), x[at] = 0.0;
        break;
      case 1:  // interior primal
        x[at] = nv + u(rng);
        x.segment(at + 1, d - 1) = v;
        break;
      default:  // zero primal, interior dual
        z[at] = nv + u(rng);
        z.segment(at + 1, d - 1) = v;
        break;
    }
    at += d;
  }
  for (int i = n_cone_vars; i < n; ++i) x[i] = g(rng);

  Eigen::MatrixXd a(m, n);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = g(rng);
  }
  Eigen::VectorXd y(m);
  for (int r = 0; r < m; ++r) y[r] = g(rng);
  const Eigen::VectorXd b = a * x;
  p.cost = a.transpose() * y + z;
  for (int r = 0; r < m; ++r) {
    std::vector<std::pair<int, double>> terms;
    for (int c = 0; c < n; ++c) terms.emplace_back(c, a(r, c));
    p.equalities.add_row(terms, b[r]);
  }
  return {p, p.cost.dot(x)};
}

inline double max_violation(const SocpProblem& p, const Eigen::VectorXd& x) {
  double v = 0.0;
  auto rows = [&](const SparseRows& s, bool eq) {
    Eigen::VectorXd ax = Eigen::VectorXd::Zero(s.rows());
    for (const auto& e : s.entries) ax[e.row] += e.value * x[e.col];
    for (int r = 0; r < s.rows(); ++r) {
      const double d = ax[r] - s.rhs[r];
      v = std::max(v, eq ? std::abs(d) : std::max(d, 0.0));
    }
  };
  rows(p.equalities, true);
  rows(p.inequalities, false);
  for (const auto& cone : p.cones) {
    double s = 0.0;
    for (std::size_t i = 1; i < cone.size(); ++i) s += x[cone[i]] * x[cone[i]];
    v = std::max(v, std::sqrt(s) - x[cone[0]]);
  }
  for (const auto& b : p.bounds) {
    v = std::max({v, b.lower - x[b.var], x[b.var] - b.upper});
  }
  return v;
}

}  // namespace rdv::socp::fixtures
