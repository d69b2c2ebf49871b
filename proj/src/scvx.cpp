#include "rdv/scvx.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <string>

namespace rdv {

namespace {

void require_same_mesh(const TrajectoryPair& a, const TrajectoryPair& b) {
  if (!(a.mesh == b.mesh)) throw std::invalid_argument("trajectories live on different meshes");
}

double final_mass_sum(const TrajectoryPair& t) {
  const int last = t.nodes() - 1;
  return std::exp(t.states(Sat::I)(kZ, last)) + std::exp(t.states(Sat::II)(kZ, last));
}

}  // namespace

void ScvxConfig::validate() const {
  if (!(eps_tol > 0.0)) throw std::invalid_argument("scvx: eps_tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("scvx: max_iters must be at least 1");
  double sum = 0.0;
  for (double k : weights.k) {
    if (k < 0.0) throw std::invalid_argument("scvx: filter weights must be nonnegative");
    sum += k;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("scvx: filter weights must sum to 1");
}

TrajectoryPair initial_reference(const Scenario& scen, const Mesh& mesh) {
  TrajectoryPair ref(mesh);
  for (Sat s : kBothSats) {
    for (int j = 0; j < mesh.size(); ++j) {
      ref.states(s).col(j) = to_convex_state(coasting_state(scen, s, mesh.t(j))).vec();
    }
  }
  return ref;
}

TrajectoryPair filter_reference(std::span<const TrajectoryPair> recent, const FilterWeights& w) {
  if (recent.empty()) throw std::invalid_argument("filter_reference: no solutions");
  for (const TrajectoryPair& t : recent) require_same_mesh(recent[0], t);
  TrajectoryPair out = recent[0];
  if (recent.size() < 3) return out;
  for (int s = 0; s < 2; ++s) {
    out.x[s] = w.k[0] * recent[0].x[s] + w.k[1] * recent[1].x[s] + w.k[2] * recent[2].x[s];
  }
  return out;
}

double state_delta(const TrajectoryPair& a, const TrajectoryPair& b) {
  require_same_mesh(a, b);
  double d = 0.0;
  for (int s = 0; s < 2; ++s) d = std::max(d, (a.x[s] - b.x[s]).cwiseAbs().maxCoeff());
  return d;
}

bool check_termination(const TrajectoryPair& a, const TrajectoryPair& b, double eps) {
  return state_delta(a, b) < eps;
}

ScvxReport run_scvx(const Scenario& scen, const Mesh& mesh, const ScvxConfig& cfg,
                    const socp::SolverSettings& solver) {
  return run_scvx(scen, initial_reference(scen, mesh), cfg, solver);
}

ScvxReport run_scvx(const Scenario& scen, const TrajectoryPair& start, const ScvxConfig& cfg,
                    const socp::SolverSettings& solver) {
  scen.validate();
  cfg.validate();
  start.check_shape();
  using clock = std::chrono::steady_clock;

  ScvxReport report;
  DiscreteProblemLayout layout(start.nodes());
  TrajectoryPair ref = start;
  std::deque<TrajectoryPair> recent;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    const auto t0 = clock::now();
    auto problem = std::make_shared<socp::SocpProblem>(assemble_socp(scen, ref, layout, cfg.transcription));
    const socp::SocpSolution sol = socp::solve(*problem, solver);
    const bool usable = sol.status == socp::Status::kOptimal || sol.close_to_optimal;
    if (!usable) {
      throw ScvxError("SOCP subproblem failed at iteration " + std::to_string(k) + ": " +
                          socp::to_string(sol.status),
                      k, sol.status, problem);
    }
    recent.push_front(unpack(sol.primal, layout, ref.mesh));
    if (recent.size() > 3) recent.pop_back();

    const std::vector<TrajectoryPair> window(recent.begin(), recent.end());
    TrajectoryPair next = cfg.filter_enabled ? filter_reference(window, cfg.weights) : recent.front();
    const double delta = state_delta(next, ref);

    IterationLog entry;
    entry.iteration = k;
    entry.objective = final_mass_sum(recent.front());
    entry.state_delta = delta;
    entry.status = sol.status;
    entry.close_to_optimal = sol.close_to_optimal;
    entry.solver_iterations = sol.iterations;
    entry.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
    report.log.push_back(entry);
    report.objective_history.push_back(entry.objective);
    report.state_delta_history.push_back(delta);
    report.solver_status.push_back(sol.status);
    report.iterations = k;
    if (cfg.on_iteration) cfg.on_iteration(entry);

    report.final = recent.front();
    if (cfg.keep_history) report.history.push_back(report.final);
    report.reference = ref;
    // The first comparison is against the starting guess, not a solution.
    if (k >= 2 && delta < cfg.eps_tol) {
      report.converged = true;
      break;
    }
    ref = std::move(next);
  }
  return report;
}

}  // namespace rdv
