#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>

#include "socp_internal.hpp"

namespace rdv::socp {

int SparseRows::add_row(const std::vector<std::pair<int, double>>& terms, double b) {
  const int row = rows();
  for (const auto& [col, value] : terms) entries.push_back({row, col, value});
  rhs.push_back(b);
  return row;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
    case Status::kMaxIters:
      return "max_iters";
    case Status::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

std::vector<RowKey> canonical_rows(const SparseRows& rows, int n_rows) {
  std::vector<RowKey> out(static_cast<std::size_t>(n_rows));
  for (const auto& e : rows.entries) {
    if (e.row >= 0 && e.row < n_rows) out[e.row].emplace_back(e.col, e.value);
  }
  for (RowKey& row : out) {
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    RowKey merged;
    for (const auto& [col, v] : row) {
      if (!merged.empty() && merged.back().first == col) {
        merged.back().second += v;
      } else {
        merged.emplace_back(col, v);
      }
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    row = std::move(merged);
  }
  return out;
}

Presolved presolve(const SocpProblem& problem) {
  Presolved pre;
  const int n = problem.n_vars;
  StandardForm& sf = pre.sf;
  sf.n = n;
  sf.c = problem.cost;

  // Equalities: drop exact duplicates; a duplicate lhs with a different rhs
  // is a certificate of infeasibility.
  const int n_eq_user = problem.equalities.rows();
  const std::vector<RowKey> eq_rows = canonical_rows(problem.equalities, n_eq_user);
  std::map<RowKey, int> seen;
  std::vector<Eigen::Triplet<double>> a_trip;
  std::vector<double> b;
  pre.user_eq_kept.assign(n_eq_user, -1);
  for (int i = 0; i < n_eq_user; ++i) {
    const auto [it, inserted] = seen.emplace(eq_rows[i], i);
    if (!inserted) {
      const int first = it->second;
      if (problem.equalities.rhs[first] != problem.equalities.rhs[i]) {
        pre.inconsistent = std::make_pair(first, i);
      }
      pre.user_eq_kept[i] = pre.user_eq_kept[first];
      continue;
    }
    const int row = static_cast<int>(b.size());
    for (const auto& [col, v] : eq_rows[i]) a_trip.emplace_back(row, col, v);
    b.push_back(problem.equalities.rhs[i]);
    pre.eq_source.push_back(i);
    pre.user_eq_kept[i] = row;
  }

  // Pinned variables become equality rows; other finite bounds become LP rows.
  std::vector<Eigen::Triplet<double>> g_trip;
  std::vector<double> h;
  auto add_g = [&](const std::vector<std::pair<int, double>>& terms, double rhs) {
    const int row = static_cast<int>(h.size());
    for (const auto& [col, v] : terms) g_trip.emplace_back(row, col, v);
    h.push_back(rhs);
    return row;
  };

  const int n_in = problem.inequalities.rows();
  const std::vector<RowKey> in_rows = canonical_rows(problem.inequalities, n_in);
  for (int i = 0; i < n_in; ++i) {
    pre.ineq_row.push_back(add_g(in_rows[i], problem.inequalities.rhs[i]));
  }
  for (const Bound& bd : problem.bounds) {
    if (std::isfinite(bd.lower) && bd.lower == bd.upper) {
      a_trip.emplace_back(static_cast<int>(b.size()), bd.var, 1.0);
      b.push_back(bd.lower);
      pre.eq_source.push_back(-1);
      continue;
    }
    if (std::isfinite(bd.lower)) add_g({{bd.var, -1.0}}, -bd.lower);
    if (std::isfinite(bd.upper)) add_g({{bd.var, 1.0}}, bd.upper);
  }
  pre.cone_row.assign(problem.cones.size(), -1);
  for (std::size_t k = 0; k < problem.cones.size(); ++k) {
    if (problem.cones[k].size() == 1) pre.cone_row[k] = add_g({{problem.cones[k][0], -1.0}}, 0.0);
  }
  sf.n_lp = static_cast<int>(h.size());
  for (std::size_t k = 0; k < problem.cones.size(); ++k) {
    const auto& cone = problem.cones[k];
    if (cone.size() < 2) continue;
    pre.cone_row[k] = static_cast<int>(h.size());
    for (int idx : cone) add_g({{idx, -1.0}}, 0.0);
    sf.soc_dims.push_back(static_cast<int>(cone.size()));
  }

  sf.A.resize(static_cast<int>(b.size()), n);
  sf.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sf.G.resize(static_cast<int>(h.size()), n);
  sf.G.setFromTriplets(g_trip.begin(), g_trip.end());
  sf.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<int>(b.size()));
  sf.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<int>(h.size()));
  pre.col_scale = Eigen::VectorXd::Ones(n);
  pre.eq_scale = Eigen::VectorXd::Ones(sf.A.rows());
  pre.ineq_scale = Eigen::VectorXd::Ones(sf.G.rows());
  return pre;
}

void equilibrate(Presolved& pre, int iterations) {
  StandardForm& sf = pre.sf;
  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  const int m = static_cast<int>(sf.G.rows());
  auto clamp_scale = [](double v) { return v < 1e-4 ? 1.0 : std::clamp(std::sqrt(v), 1e-4, 1e4); };

  for (int iter = 0; iter < iterations; ++iter) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd row_a = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd row_g = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < sf.A.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.A, j); it; ++it) {
        col[j] = std::max(col[j], std::abs(it.value()));
        row_a[it.row()] = std::max(row_a[it.row()], std::abs(it.value()));
      }
    }
    for (int j = 0; j < sf.G.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.G, j); it; ++it) {
        col[j] = std::max(col[j], std::abs(it.value()));
        row_g[it.row()] = std::max(row_g[it.row()], std::abs(it.value()));
      }
    }
    // One factor per cone keeps the cone invariant under row scaling.
    int start = sf.n_lp;
    for (int d : sf.soc_dims) {
      const double mx = row_g.segment(start, d).maxCoeff();
      row_g.segment(start, d).setConstant(mx);
      start += d;
    }
    const Eigen::VectorXd e = col.unaryExpr(clamp_scale);
    const Eigen::VectorXd da = row_a.unaryExpr(clamp_scale);
    const Eigen::VectorXd dg = row_g.unaryExpr(clamp_scale);

    for (int j = 0; j < sf.A.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.A, j); it; ++it) {
        it.valueRef() /= da[it.row()] * e[j];
      }
    }
    for (int j = 0; j < sf.G.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.G, j); it; ++it) {
        it.valueRef() /= dg[it.row()] * e[j];
      }
    }
    pre.col_scale.array() *= e.array();
    pre.eq_scale.array() *= da.array();
    pre.ineq_scale.array() *= dg.array();
  }
  sf.b.array() /= pre.eq_scale.array();
  sf.h.array() /= pre.ineq_scale.array();
  sf.c.array() /= pre.col_scale.array();
}

SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings) {
  Presolved pre = presolve(problem);
  if (pre.inconsistent) {
    SocpSolution out;
    out.status = Status::kInfeasible;
    out.primal = Eigen::VectorXd::Zero(problem.n_vars);
    return out;
  }
  equilibrate(pre);
  SocpSolution raw = solve_standard_form(pre.sf, settings);

  // Undo equilibration and map duals back to user rows.
  SocpSolution out;
  out.status = raw.status;
  out.iterations = raw.iterations;
  out.pres = raw.pres;
  out.dres = raw.dres;
  out.close_to_optimal = raw.close_to_optimal;
  out.trace = std::move(raw.trace);

  const Eigen::VectorXd x = raw.primal.cwiseQuotient(pre.col_scale);
  const Eigen::VectorXd y = raw.dual_eq.cwiseQuotient(pre.eq_scale);
  const Eigen::VectorXd z = raw.dual_ineq.cwiseQuotient(pre.ineq_scale);
  const Eigen::VectorXd s = raw.dual_cones.front().cwiseProduct(pre.ineq_scale);

  out.primal = x;
  out.dual_eq = Eigen::VectorXd::Zero(problem.equalities.rows());
  for (int i = 0; i < static_cast<int>(pre.eq_source.size()); ++i) {
    if (pre.eq_source[i] >= 0) out.dual_eq[pre.eq_source[i]] = y[i];
  }
  out.dual_ineq = Eigen::VectorXd::Zero(problem.inequalities.rows());
  for (int i = 0; i < static_cast<int>(pre.ineq_row.size()); ++i) {
    out.dual_ineq[i] = z[pre.ineq_row[i]];
  }
  for (std::size_t k = 0; k < problem.cones.size(); ++k) {
    const int d = static_cast<int>(problem.cones[k].size());
    out.dual_cones.push_back(pre.cone_row[k] >= 0 ? Eigen::VectorXd(z.segment(pre.cone_row[k], d))
                                                  : Eigen::VectorXd::Zero(d));
  }
  out.objective = problem.cost.dot(x);
  out.dual_objective = -(pre.sf.b.cwiseProduct(pre.eq_scale).dot(y) +
                         pre.sf.h.cwiseProduct(pre.ineq_scale).dot(z));
  out.gap = s.size() > 0 ? s.dot(z) : 0.0;
  return out;
}

bool ValidationReport::ok() const {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.severity == Finding::Severity::kError; });
}

ValidationReport validate(const SocpProblem& problem) {
  ValidationReport report;
  const int n = problem.n_vars;
  auto error = [&](std::string msg, std::vector<int> idx) {
    report.findings.push_back({Finding::Severity::kError, std::move(msg), std::move(idx)});
  };
  auto warning = [&](std::string msg, std::vector<int> idx) {
    report.findings.push_back({Finding::Severity::kWarning, std::move(msg), std::move(idx)});
  };

  if (problem.cost.size() != n) {
    error("cost vector has " + std::to_string(problem.cost.size()) + " entries for " +
              std::to_string(n) + " variables",
          {});
  }
  for (int i = 0; i < problem.cost.size(); ++i) {
    if (!std::isfinite(problem.cost[i])) error("non-finite cost coefficient", {i});
  }

  auto check_rows = [&](const SparseRows& rows, const char* what) {
    for (const auto& e : rows.entries) {
      if (e.row < 0 || e.row >= rows.rows()) {
        error(std::string(what) + " entry references row " + std::to_string(e.row), {e.row});
      }
      if (e.col < 0 || e.col >= n) {
        error(std::string(what) + " entry references variable " + std::to_string(e.col), {e.col});
      }
      if (!std::isfinite(e.value)) error(std::string(what) + " entry is not finite", {e.row, e.col});
    }
    for (int i = 0; i < rows.rows(); ++i) {
      if (std::isnan(rows.rhs[i])) error(std::string(what) + " right-hand side is NaN", {i});
    }
  };
  check_rows(problem.equalities, "equality");
  check_rows(problem.inequalities, "inequality");

  for (std::size_t k = 0; k < problem.cones.size(); ++k) {
    const auto& cone = problem.cones[k];
    const int ki = static_cast<int>(k);
    if (cone.empty()) {
      error("cone " + std::to_string(k) + " is empty", {ki});
      continue;
    }
    std::set<int> members;
    for (int idx : cone) {
      if (idx < 0 || idx >= n) {
        error("cone " + std::to_string(k) + " references variable " + std::to_string(idx), {idx});
      } else if (!members.insert(idx).second) {
        error("cone " + std::to_string(k) + " repeats variable " + std::to_string(idx), {ki, idx});
      }
    }
  }
  for (const Bound& bd : problem.bounds) {
    if (bd.var < 0 || bd.var >= n) {
      error("bound references variable " + std::to_string(bd.var), {bd.var});
    } else if (std::isnan(bd.lower) || std::isnan(bd.upper)) {
      error("bound on variable " + std::to_string(bd.var) + " is NaN", {bd.var});
    } else if (bd.lower > bd.upper) {
      error("bound on variable " + std::to_string(bd.var) + " has lower > upper", {bd.var});
    }
  }
  if (!report.ok()) return report;

  // Duplicated rows, then the numerical rank of what remains.
  const int p = problem.equalities.rows();
  const std::vector<RowKey> rows = canonical_rows(problem.equalities, p);
  std::map<RowKey, int> seen;
  int duplicates = 0;
  for (int i = 0; i < p; ++i) {
    const auto [it, inserted] = seen.emplace(rows[i], i);
    if (!inserted) {
      ++duplicates;
      warning("equality rows " + std::to_string(it->second) + " and " + std::to_string(i) +
                  " are duplicates (rank deficiency)",
              {it->second, i});
    }
  }
  if (p > 0 && n > 0) {
    Eigen::SparseMatrix<double> at(n, p);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < p; ++i) {
      for (const auto& [col, v] : rows[i]) trip.emplace_back(col, i, v);
    }
    at.setFromTriplets(trip.begin(), trip.end());
    at.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(1e-10);
    qr.compute(at);
    if (qr.info() == Eigen::Success) {
      report.equality_rank = static_cast<int>(qr.rank());
      if (report.equality_rank < p - duplicates) {
        warning("equality matrix rank " + std::to_string(report.equality_rank) + " < " +
                    std::to_string(p - duplicates) + " distinct rows",
                {});
      }
    }
  }
  return report;
}

}  // namespace rdv::socp
