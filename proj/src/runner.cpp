#include "rdv/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace rdv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class LogLine {
 public:
  LogLine(const LogSink& sink, const char* event) : sink_(sink) {
    out_ << std::setprecision(10) << "event=" << event;
  }
  ~LogLine() {
    if (sink_) sink_(out_.str());
  }
  template <class T>
  LogLine& operator()(const char* key, const T& value) {
    out_ << ' ' << key << '=' << value;
    return *this;
  }

 private:
  const LogSink& sink_;
  std::ostringstream out_;
};

TrajectoryPair retime(const TrajectoryPair& warm, const Mesh& mesh) {
  if (warm.nodes() != mesh.size()) throw std::invalid_argument("warm start has a different node count");
  TrajectoryPair out(mesh);
  out.x = warm.x;
  out.u = warm.u;
  return out;
}

double pass_cost(const ScvxReport& rep, const Scenario& scen) {
  const auto dm = propellant_used(rep.final, scen);
  return dm[0] + dm[1];
}

ScvxConfig with_logging(const RunConfig& cfg, const LogSink& log) {
  ScvxConfig sc = cfg.scvx;
  if (log) {
    const double tf = cfg.scenario.tf;
    sc.on_iteration = [&log, tf](const IterationLog& it) {
      LogLine(log, "iteration")("tf", tf)("k", it.iteration)("objective", it.objective)("delta", it.state_delta)(
          "status", socp::to_string(it.status))("close", it.close_to_optimal)("ipm_iters", it.solver_iterations)(
          "seconds", it.wall_time_s);
    };
  }
  return sc;
}

RunConfig at_tf(const RunConfig& cfg, double tf) {
  RunConfig c = cfg;
  c.scenario.tf = tf;
  return c;
}

void run_tasks(std::vector<std::function<void()>>& tasks, int workers) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < tasks.size();) tasks[k]();
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  std::vector<std::jthread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
}

int worker_count(const RunConfig& cfg) {
  if (cfg.sweep.workers > 0) return cfg.sweep.workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

SweepRow failed_row(double tf, const std::string& note) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow row;
  row.tf = tf;
  row.dm_total = row.dm_sat_I = row.dm_sat_II = row.dm_transfer = row.dm_phasing_total = nan;
  row.final_inclination_deg = row.max_eta = nan;
  row.note = note;
  return row;
}

}  // namespace

ScvxReport solve_initial(const RunConfig& cfg, const TrajectoryPair* warm, const LogSink& log) {
  cfg.validate();
  const Mesh mesh = build_mesh(cfg.scenario.tf, cfg.mesh.nodes);
  const ScvxConfig sc = with_logging(cfg, log);
  try {
    if (warm) return run_scvx(cfg.scenario, retime(*warm, mesh), sc, cfg.solver);
    return run_scvx(cfg.scenario, mesh, sc, cfg.solver);
  } catch (const ScvxError& e) {
    throw StageError("scvx", e.what(), true);
  }
}

std::array<double, 2> transfer_cost(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.scvx.transcription.rendezvous_theta = false;
  c.scvx.keep_history = false;
  try {
    return propellant_used(solve_initial(c).final, c.scenario);
  } catch (const StageError& e) {
    throw StageError("transfer", e.what(), true);
  }
}

RunRecord finish_run(const RunConfig& cfg, ScvxReport first_pass, double first_pass_seconds, const LogSink& log) {
  const auto t_start = Clock::now();
  const Scenario& scen = cfg.scenario;
  RunRecord rec;
  rec.config_hash = config_hash(cfg);
  rec.scenario = scen;
  rec.first_pass = std::move(first_pass);
  rec.times.scvx = first_pass_seconds;
  rec.converged = rec.first_pass.converged;
  LogLine(log, "scvx_done")("tf", scen.tf)("iterations", rec.first_pass.iterations)("converged",
                                                                                     rec.first_pass.converged);

  // Refinement rounds.
  auto t0 = Clock::now();
  const ErrorOptions eo{cfg.mesh.tol, cfg.mesh.relative};
  const ScvxConfig sc = with_logging(cfg, log);
  const ScvxReport* current = &rec.first_pass;
  Mesh mesh = current->final.mesh;
  rec.mesh_errors = estimate_errors(ContinuousTrajectory(current->final, scen), mesh, scen, eo);
  for (int round = 0; round < cfg.mesh.max_rounds && !rec.mesh_errors.above_tol.empty(); ++round) {
    const Mesh next = refine(mesh, rec.mesh_errors, cfg.mesh.tol, cfg.mesh.growth_cap);
    if (next == mesh) break;
    try {
      rec.last_pass = run_scvx(scen, interpolate_onto(current->final, next, scen), sc, cfg.solver);
    } catch (const ScvxError& e) {
      throw StageError("refine", e.what(), true);
    }
    current = &rec.last_pass;
    rec.converged = rec.converged && rec.last_pass.converged;
    mesh = next;
    rec.mesh_errors = estimate_errors(ContinuousTrajectory(current->final, scen), mesh, scen, eo);
    ++rec.refinement_rounds;
    LogLine(log, "refine")("tf", scen.tf)("round", rec.refinement_rounds)("nodes", mesh.size())(
        "max_eta", rec.mesh_errors.max_eta)("iterations", rec.last_pass.iterations);
  }
  if (rec.refinement_rounds == 0) rec.last_pass = rec.first_pass;
  rec.final_nodes = mesh.size();
  rec.max_eta = rec.mesh_errors.max_eta;
  rec.times.refine = seconds_since(t0);

  t0 = Clock::now();
  const TrajectoryPair& traj = rec.trajectory();
  try {
    rec.verification = constraint_residuals(traj, scen, cfg.verify.options);
  } catch (const PropagationError& e) {
    throw StageError("verify", e.what(), false);
  }
  rec.final_inclination_deg = final_inclination_deg(traj, Sat::I);
  for (Sat s : kBothSats) {
    rec.plane_change_deg[index_of(s)] = plane_change_deg(traj, s);
    rec.theta_span[index_of(s)] = theta_span(traj, s);
  }
  rec.times.verify = seconds_since(t0);

  t0 = Clock::now();
  if (!cfg.scvx.transcription.rendezvous_theta) {
    rec.phasing.dm_transfer = 0.5 * rec.verification.propellant_total;
  } else if (cfg.verify.transfer_reference) {
    const auto transfer = transfer_cost(cfg);
    PhasingOptions po = cfg.verify.phasing;
    po.per_spacecraft_check = scen.coplanar();
    try {
      rec.phasing = phasing_split(rec.verification.propellant, 0.5 * (transfer[0] + transfer[1]), rec.theta_span[1], po);
    } catch (const DataInconsistency& e) {
      throw StageError("phasing", e.what(), false);
    }
  }
  rec.times.transfer = seconds_since(t0);
  rec.times.total = rec.times.scvx + seconds_since(t_start);
  LogLine(log, "run_done")("tf", scen.tf)("dm_total", rec.verification.propellant_total)(
      "family", to_string(rec.phasing.family))("residual", rec.verification.propagated_terminal.max())(
      "nodes", rec.final_nodes)("seconds", rec.times.total);
  return rec;
}

RunRecord run_single(const RunConfig& cfg, const LogSink& log) {
  const auto t0 = Clock::now();
  ScvxReport first = solve_initial(cfg, nullptr, log);
  return finish_run(cfg, std::move(first), seconds_since(t0), log);
}

SweepRow make_row(const RunRecord& rec) {
  SweepRow row;
  row.tf = rec.scenario.tf;
  row.dm_sat_I = rec.verification.propellant[0];
  row.dm_sat_II = rec.verification.propellant[1];
  row.dm_total = row.dm_sat_I + row.dm_sat_II;
  row.dm_transfer = rec.phasing.dm_transfer;
  row.dm_phasing_total = rec.phasing.dm_phasing_total;
  row.family = to_string(rec.phasing.family);
  row.final_inclination_deg = rec.final_inclination_deg;
  row.iterations = rec.first_pass.iterations;
  row.converged = rec.converged;
  row.max_eta = rec.max_eta;
  row.wall_time_s = rec.times.total;
  return row;
}

std::vector<SweepEntry> run_sweep_records(const RunConfig& cfg, std::vector<double> tf_list, const LogSink& log) {
  if (tf_list.empty()) throw std::invalid_argument("run_sweep: empty tf list");
  std::sort(tf_list.begin(), tf_list.end());
  tf_list.erase(std::unique(tf_list.begin(), tf_list.end()), tf_list.end());
  cfg.validate();
  const std::size_t n = tf_list.size();

  struct Candidate {
    std::optional<ScvxReport> report;
    double seconds = 0.0;
    std::string error;
  };
  // Slots: cold start, forward chain, backward chain.
  std::vector<std::array<Candidate, 3>> cand(n);
  const bool chains = cfg.sweep.continuation && n > 1;

  auto attempt = [&](std::size_t i, const TrajectoryPair* warm, Candidate& out) {
    const auto t0 = Clock::now();
    try {
      out.report = solve_initial(at_tf(cfg, tf_list[i]), warm, log);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(t0);
  };
  auto chain = [&](bool forward, int slot) {
    std::optional<TrajectoryPair> last;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = forward ? k : n - 1 - k;
      Candidate& c = cand[i][slot];
      attempt(i, last ? &*last : nullptr, c);
      if (c.report) last = c.report->final;
    }
  };

  std::vector<std::function<void()>> tasks;
  if (chains) {
    tasks.emplace_back([&] { chain(true, 1); });
    tasks.emplace_back([&] { chain(false, 2); });
  }
  for (std::size_t i = 0; i < n; ++i) tasks.emplace_back([&, i] { attempt(i, nullptr, cand[i][0]); });
  run_tasks(tasks, worker_count(cfg));

  std::vector<SweepEntry> rows(n);
  tasks.clear();
  for (std::size_t i = 0; i < n; ++i) {
    tasks.emplace_back([&, i] {
      const RunConfig ci = at_tf(cfg, tf_list[i]);
      int best = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 3; ++s) {
        const Candidate& c = cand[i][s];
        if (!c.report) continue;
        const double cost = pass_cost(*c.report, ci.scenario);
        if (cost < best_cost) {
          best_cost = cost;
          best = s;
        }
      }
      if (best < 0) {
        rows[i].row = failed_row(tf_list[i], cand[i][0].error);
        LogLine(log, "row_failed")("tf", tf_list[i])("error", std::quoted(cand[i][0].error));
        return;
      }
      Candidate& c = cand[i][best];
      try {
        rows[i].record = finish_run(ci, std::move(*c.report), c.seconds, log);
        rows[i].row = make_row(*rows[i].record);
      } catch (const std::exception& e) {
        rows[i].row = failed_row(tf_list[i], e.what());
        LogLine(log, "row_failed")("tf", tf_list[i])("error", std::quoted(std::string(e.what())));
      }
    });
  }
  run_tasks(tasks, worker_count(cfg));
  return rows;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, std::vector<double> tf_list, const LogSink& log) {
  std::vector<SweepRow> rows;
  for (SweepEntry& e : run_sweep_records(cfg, std::move(tf_list), log)) rows.push_back(std::move(e.row));
  return rows;
}

std::optional<double> family_switch(const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> ok;
  for (const SweepRow& r : rows) {
    if (r.note.empty() && std::isfinite(r.dm_sat_I) && std::isfinite(r.dm_sat_II)) ok.push_back(&r);
  }
  std::sort(ok.begin(), ok.end(), [](const SweepRow* a, const SweepRow* b) { return a->tf < b->tf; });
  for (std::size_t k = 0; k + 1 < ok.size(); ++k) {
    const double da = ok[k]->dm_sat_I - ok[k]->dm_sat_II;
    const double db = ok[k + 1]->dm_sat_I - ok[k + 1]->dm_sat_II;
    if (da == 0.0) return ok[k]->tf;
    if ((da > 0.0) != (db > 0.0)) return ok[k]->tf + da / (da - db) * (ok[k + 1]->tf - ok[k]->tf);
  }
  return std::nullopt;
}

}  // namespace rdv
