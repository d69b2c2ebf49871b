#pragma once

// Successive convexification: linearize about a reference, solve the SOCP,
// filter the reference over the last three solutions, repeat.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "rdv/socp.hpp"
#include "rdv/transcription.hpp"

namespace rdv {

struct FilterWeights {
  std::array<double, 3> k{6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0};
};

struct IterationLog {
  int iteration = 0;
  double objective = 0.0;  // sum of final masses of the SOCP solution
  double state_delta = 0.0;
  socp::Status status = socp::Status::kOptimal;
  bool close_to_optimal = false;
  int solver_iterations = 0;
  double wall_time_s = 0.0;
};

struct ScvxConfig {
  double eps_tol = 1e-6;
  int max_iters = 25;
  FilterWeights weights;
  bool filter_enabled = true;
  bool keep_history = false;  // store every SOCP solution in the report
  TranscriptionOptions transcription;
  std::function<void(const IterationLog&)> on_iteration;

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

struct ScvxReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;
  std::vector<double> state_delta_history;
  std::vector<socp::Status> solver_status;
  std::vector<IterationLog> log;
  TrajectoryPair final;      // last SOCP solution
  TrajectoryPair reference;  // reference it was linearized about
  std::vector<TrajectoryPair> history;  // filled when keep_history is set
};

/// An SOCP subproblem without a usable solution. Carries the problem for replay.
class ScvxError : public std::runtime_error {
 public:
  ScvxError(const std::string& what, int iteration, socp::Status status,
            std::shared_ptr<const socp::SocpProblem> problem)
      : std::runtime_error(what), iteration_(iteration), status_(status), problem_(std::move(problem)) {}

  int iteration() const { return iteration_; }
  socp::Status status() const { return status_; }
  const socp::SocpProblem& problem() const { return *problem_; }

 private:
  int iteration_;
  socp::Status status_;
  std::shared_ptr<const socp::SocpProblem> problem_;
};

/// Both spacecraft coasting on their initial orbits, zero controls.
TrajectoryPair initial_reference(const Scenario& scen, const Mesh& mesh);

/// Weighted state combination of the most recent solutions (recent[0] newest);
/// controls come from recent[0]. Fewer than three solutions: recent[0].
TrajectoryPair filter_reference(std::span<const TrajectoryPair> recent, const FilterWeights& w);

/// Infinity norm of the state difference over both spacecraft and all nodes.
double state_delta(const TrajectoryPair& a, const TrajectoryPair& b);

/// state_delta(a, b) < eps.
bool check_termination(const TrajectoryPair& a, const TrajectoryPair& b, double eps);

ScvxReport run_scvx(const Scenario& scen, const Mesh& mesh, const ScvxConfig& cfg,
                    const socp::SolverSettings& solver = {});

/// Same loop from a given starting reference (used after mesh refinement).
ScvxReport run_scvx(const Scenario& scen, const TrajectoryPair& start, const ScvxConfig& cfg,
                    const socp::SolverSettings& solver = {});

}  // namespace rdv
