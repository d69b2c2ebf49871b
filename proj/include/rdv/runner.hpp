#pragma once

// Batch execution: a single solve with mesh refinement and verification, and
// duration sweeps with continuation across neighbouring durations.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdv/config.hpp"
#include "rdv/mesh.hpp"

namespace rdv {

/// key=value structured log line sink. Sweeps call it from worker threads.
using LogSink = std::function<void(const std::string& line)>;

/// Failure of one pipeline stage ("scvx", "refine", "verify", "transfer", "phasing").
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, bool solver_failure)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), solver_failure_(solver_failure) {}
  const std::string& stage() const { return stage_; }
  bool solver_failure() const { return solver_failure_; }

 private:
  std::string stage_;
  bool solver_failure_;
};

struct StageTimes {
  double scvx = 0.0;
  double refine = 0.0;
  double verify = 0.0;
  double transfer = 0.0;
  double total = 0.0;
};

struct RunRecord {
  std::uint64_t config_hash = 0;
  Scenario scenario;
  ScvxReport first_pass;         // SCvx on the initial mesh
  ScvxReport last_pass;          // SCvx on the final mesh
  bool converged = false;        // every SCvx pass met the termination test
  int refinement_rounds = 0;
  int final_nodes = 0;
  double max_eta = 0.0;          // on the final mesh
  MeshErrorReport mesh_errors;   // on the final mesh
  VerificationReport verification;
  PhasingReport phasing;
  double final_inclination_deg = 0.0;
  std::array<double, 2> plane_change_deg{};
  std::array<double, 2> theta_span{};
  StageTimes times;

  const TrajectoryPair& trajectory() const { return last_pass.final; }
};

/// SCvx on the initial mesh, optionally from a warm start on any mesh with the
/// same node count (node values are reused on the new mesh).
ScvxReport solve_initial(const RunConfig& cfg, const TrajectoryPair* warm = nullptr, const LogSink& log = {});

/// Refinement rounds, verification and phasing split after a first pass.
RunRecord finish_run(const RunConfig& cfg, ScvxReport first_pass, double first_pass_seconds,
                     const LogSink& log = {});

/// solve_initial followed by finish_run. Throws StageError.
RunRecord run_single(const RunConfig& cfg, const LogSink& log = {});

/// Propellant of both spacecraft on the phase-free problem.
std::array<double, 2> transfer_cost(const RunConfig& cfg);

struct SweepRow {
  double tf = 0.0;
  double dm_total = 0.0;
  double dm_sat_I = 0.0;
  double dm_sat_II = 0.0;
  double dm_transfer = 0.0;  // per spacecraft
  double dm_phasing_total = 0.0;
  std::string family = "none";
  double final_inclination_deg = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_eta = 0.0;
  double wall_time_s = 0.0;
  std::string note;  // error message of a failed row

  bool operator==(const SweepRow&) const = default;
};

SweepRow make_row(const RunRecord& rec);

struct SweepEntry {
  SweepRow row;
  std::optional<RunRecord> record;  // empty for failed rows
};

/// One entry per tf, sorted by tf. With continuation, each duration is solved
/// cold and warm-started along chains in both directions; the cheapest first
/// pass is finished.
std::vector<SweepEntry> run_sweep_records(const RunConfig& cfg, std::vector<double> tf_list,
                                          const LogSink& log = {});

/// Rows of run_sweep_records.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, std::vector<double> tf_list, const LogSink& log = {});

/// Duration at which dm_sat_I - dm_sat_II changes sign, by linear interpolation
/// between the bracketing rows of converged or usable results.
std::optional<double> family_switch(const std::vector<SweepRow>& rows);

}  // namespace rdv
