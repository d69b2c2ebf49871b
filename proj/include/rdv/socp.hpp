#pragma once

// Second-order cone programs in a user-facing form:
//
//   minimize    cost' x
//   subject to  A_eq x  = b_eq
//               A_in x <= b_in
//               ||x[c1..ck]|| <= x[c0]        for every cone (c0; c1..ck)
//               lower <= x <= upper           for every bound entry
//
// and a primal-dual interior-point solver for it.

#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rdv::socp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A block of sparse linear rows with right-hand sides.
struct SparseRows {
  struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
  };
  std::vector<Entry> entries;
  std::vector<double> rhs;

  int rows() const { return static_cast<int>(rhs.size()); }
  /// Appends a row and returns its index.
  int add_row(const std::vector<std::pair<int, double>>& terms, double b);
};

struct Bound {
  int var = 0;
  double lower = -kInf;
  double upper = kInf;
};

struct SocpProblem {
  int n_vars = 0;
  Eigen::VectorXd cost;
  SparseRows equalities;
  SparseRows inequalities;
  std::vector<std::vector<int>> cones;
  std::vector<Bound> bounds;

  explicit SocpProblem(int n = 0) : n_vars(n), cost(Eigen::VectorXd::Zero(n)) {}

  int add_var() {
    cost.conservativeResize(n_vars + 1);
    cost[n_vars] = 0.0;
    return n_vars++;
  }
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kMaxIters, kNumericalFailure };

const char* to_string(Status s);

struct SolverSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iters = 100;
  bool verbose = false;
};

/// One interior-point iterate, normalized by tau.
struct IterateInfo {
  int iter = 0;
  double pcost = 0.0;
  double dcost = 0.0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double step = 0.0;
};

struct SocpSolution {
  Status status = Status::kNumericalFailure;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual_eq;     // one per equality row
  Eigen::VectorXd dual_ineq;   // one per inequality row
  std::vector<Eigen::VectorXd> dual_cones;  // one per cone, same layout as the tuple
  double objective = 0.0;       // cost' x
  double dual_objective = 0.0;
  double gap = 0.0;             // complementarity s' z
  double pres = 0.0;
  double dres = 0.0;
  int iterations = 0;
  /// Set when the iterate only meets the relaxed tolerances.
  bool close_to_optimal = false;
  std::vector<IterateInfo> trace;
};

struct Finding {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string message;
  std::vector<int> indices;
};

struct ValidationReport {
  std::vector<Finding> findings;
  int equality_rank = -1;

  bool ok() const;
  bool empty() const { return findings.empty(); }
};

/// Structural checks: index ranges, empty or duplicated cone members, NaN
/// coefficients, duplicated and rank-deficient equality rows.
ValidationReport validate(const SocpProblem& problem);

/// Homogeneous self-dual interior point with Nesterov-Todd scaling and
/// Mehrotra predictor-corrector steps. Deterministic.
SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings = {});

// Plain-text conic format (version 1), used by `dump-socp` and the external
// adapters. Layout, one record per line, '#' lines ignored:
//
//   SOCP 1
//   vars <n>
//   cost <k>               then k lines "<index> <value>"        (nonzeros)
//   eq <rows> <nnz>        then nnz lines "<row> <col> <value>", then rows lines "<rhs>"
//   ineq <rows> <nnz>      same as eq
//   cones <count>          then count lines "<dim> <i0> <i1> ... "
//   bounds <count>         then count lines "<var> <lower> <upper>" (inf / -inf allowed)
//   end
void write_conic(const SocpProblem& problem, std::ostream& out);
SocpProblem read_conic(std::istream& in);

/// Raised by solve_via_external when no adapter of that name is usable.
class AdapterUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A third-party conic solver used for cross-validation.
class ExternalAdapter {
 public:
  virtual ~ExternalAdapter() = default;
  virtual std::string name() const = 0;
  virtual bool available() const = 0;
  virtual SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings) const = 0;
};

void register_adapter(std::shared_ptr<const ExternalAdapter> adapter);
std::shared_ptr<const ExternalAdapter> find_adapter(const std::string& name);

SocpSolution solve_via_external(const SocpProblem& problem, const std::string& adapter,
                                const SolverSettings& settings = {});

/// Solves through a Python helper script driving CVXPY. The script path and
/// interpreter are fixed at construction; availability is probed once.
std::shared_ptr<const ExternalAdapter> make_cvxpy_adapter(std::string python,
                                                          std::string script);

}  // namespace rdv::socp
