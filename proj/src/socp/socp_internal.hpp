#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "rdv/socp.hpp"

namespace rdv::socp {

/// min c'x  s.t.  A x = b,  G x + s = h,  s in R+^n_lp x Q^d1 x ... (LP rows first).
struct StandardForm {
  int n = 0;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> G;
  Eigen::VectorXd b, h, c;
  int n_lp = 0;
  std::vector<int> soc_dims;
};

/// Standard form plus the maps needed to report results in user terms.
struct Presolved {
  StandardForm sf;
  std::vector<int> eq_source;         // standard eq row -> user eq row, -1 for pinned variables
  std::vector<int> user_eq_kept;      // user eq row -> standard row carrying it (or -1)
  std::vector<int> ineq_row;          // user ineq row -> G row
  std::vector<int> cone_row;          // user cone -> first G row (size-1 cones live in the LP part)
  std::optional<std::pair<int, int>> inconsistent;  // duplicate lhs, different rhs
  Eigen::VectorXd col_scale, eq_scale, ineq_scale;
};

Presolved presolve(const SocpProblem& problem);

/// Ruiz-style equilibration of [A; G] with one factor per cone block.
void equilibrate(Presolved& pre, int iterations = 3);

SocpSolution solve_standard_form(const StandardForm& sf, const SolverSettings& settings);

/// Canonical content of a sparse row: sorted columns, merged duplicates, zeros dropped.
using RowKey = std::vector<std::pair<int, double>>;
std::vector<RowKey> canonical_rows(const SparseRows& rows, int n_rows);

}  // namespace rdv::socp
