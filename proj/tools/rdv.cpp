// rdv: command-line front end for solving, sweeping, verifying and exporting
// cooperative rendezvous problems.
//
// Exit codes: 0 success, 1 solver failure, 2 configuration or input error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "rdv/config.hpp"
#include "rdv/export.hpp"
#include "rdv/runner.hpp"
#include "rdv/socp.hpp"

namespace fs = std::filesystem;
using namespace rdv;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string preset;
  std::optional<double> tf;
  std::optional<int> nodes;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("-c,--config", c.config, "YAML configuration file");
  auto* pre = cmd->add_option("-p,--preset", c.preset, "Bundled preset: coplanar_nominal, noncoplanar_10deg");
  cfg->excludes(pre);
  cmd->add_option("--tf", c.tf, "Override scenario.tf");
  cmd->add_option("--nodes", c.nodes, "Override transcription.nodes");
  cmd->add_flag("-q,--quiet", c.quiet, "No log lines on stderr");
}

RunConfig resolve(const Common& c) {
  if (c.config.empty() && c.preset.empty()) throw ConfigError("one of --config or --preset is required");
  RunConfig cfg = c.config.empty() ? load_preset(c.preset) : load_scenario(c.config);
  if (c.tf) cfg.scenario.tf = *c.tf;
  if (c.nodes) cfg.mesh.nodes = *c.nodes;
  cfg.validate();
  return cfg;
}

LogSink stderr_sink(bool quiet) {
  if (quiet) return {};
  static std::mutex mu;
  return [](const std::string& line) {
    const auto now = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
    std::lock_guard lock(mu);
    std::cerr << std::fixed << std::setprecision(3) << "ts=" << now << std::defaultfloat << " level=info " << line
              << '\n';
  };
}

void log_error(const std::string& kind, const std::string& what) {
  std::cerr << "level=error kind=" << kind << " message=" << std::quoted(what) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad tf value '" + item + "'");
    }
  }
  return out;
}

int cmd_solve(const Common& c, const std::string& out_dir) {
  RunConfig cfg = resolve(c);
  cfg.scvx.keep_history = true;
  const RunRecord rec = run_single(cfg, stderr_sink(c.quiet));
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "record.json");
    write_record_json(rec, f);
  }
  {
    auto f = open_out(dir / "trajectory.csv");
    write_trajectory_csv(rec.trajectory(), f);
  }
  {
    auto f = open_out(dir / "iterations.csv");
    write_iterations_csv(rec.first_pass, f);
  }
  {
    auto f = open_out(dir / "mesh_errors.csv");
    write_error_csv(rec.mesh_errors, rec.trajectory().mesh, f);
  }
  {
    auto f = open_out(dir / "sweep_row.csv");
    write_sweep_csv({make_row(rec)}, f);
  }
  const SweepRow row = make_row(rec);
  std::cout << std::setprecision(6) << "tf=" << row.tf << " dm_total=" << row.dm_total << " dm_I=" << row.dm_sat_I
            << " dm_II=" << row.dm_sat_II << " family=" << row.family << " converged=" << row.converged
            << " iterations=" << row.iterations << " nodes=" << rec.final_nodes
            << " residual=" << rec.verification.propagated_terminal.max() << " hash=" << hash_hex(rec.config_hash)
            << '\n';
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& tf_list, std::optional<int> workers, const std::string& out,
              const std::string& format, bool no_timing) {
  RunConfig cfg = resolve(c);
  if (!tf_list.empty()) cfg.sweep.tf = parse_list(tf_list);
  if (workers) cfg.sweep.workers = *workers;
  if (cfg.sweep.tf.empty()) throw ConfigError("no sweep durations: set sweep.tf or --tf-list");
  std::vector<SweepRow> rows = run_sweep(cfg, cfg.sweep.tf, stderr_sink(c.quiet));
  if (no_timing) {
    for (SweepRow& r : rows) r.wall_time_s = 0.0;
  }
  export_rows(rows, format == "json" ? Format::kJson : Format::kCsv, out);
  int failed = 0;
  for (const SweepRow& r : rows) failed += !r.note.empty();
  std::cout << "rows=" << rows.size() << " failed=" << failed << " out=" << out << '\n';
  if (const auto sw = family_switch(rows)) std::cout << "family_switch_tf=" << *sw << '\n';
  return failed ? kSolverFailure : kOk;
}

int cmd_verify(const Common& c, const std::string& trajectory) {
  const RunConfig cfg = resolve(c);
  auto in = open_in(trajectory);
  TrajectoryPair traj = [&] {
    try {
      return read_trajectory_csv(in);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }();
  RunConfig at = cfg;
  at.scenario.tf = traj.mesh.tf();
  const VerificationReport rep = constraint_residuals(traj, at.scenario, cfg.verify.options);
  write_verification_json(rep, std::cout);
  return kOk;
}

int cmd_export(const std::string& in_path, const std::string& out_path, const std::string& format) {
  auto in = open_in(in_path);
  std::vector<SweepRow> rows;
  try {
    rows = read_sweep_csv(in);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  export_rows(rows, format == "json" ? Format::kJson : Format::kCsv, out_path);
  return kOk;
}

int cmd_dump(const Common& c, const std::string& trajectory, const std::string& out) {
  const RunConfig cfg = resolve(c);
  const Mesh mesh = build_mesh(cfg.scenario.tf, cfg.mesh.nodes);
  TrajectoryPair ref = initial_reference(cfg.scenario, mesh);
  if (!trajectory.empty()) {
    auto in = open_in(trajectory);
    try {
      ref = read_trajectory_csv(in);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  DiscreteProblemLayout layout(ref.nodes());
  const socp::SocpProblem p = assemble_socp(cfg.scenario, ref, layout, cfg.scvx.transcription);
  auto f = open_out(out);
  socp::write_conic(p, f);
  std::cout << "vars=" << p.n_vars << " equalities=" << p.equalities.rows() << " cones=" << p.cones.size()
            << " out=" << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-propellant cooperative rendezvous by successive convexification"};
  app.require_subcommand(1);

  Common solve_opts, sweep_opts, verify_opts, dump_opts;
  std::string out_dir = "run";
  auto* solve = app.add_subcommand("solve", "Solve one scenario, refine the mesh and verify");
  add_common(solve, solve_opts);
  solve->add_option("-o,--out", out_dir, "Output directory");

  std::string tf_list, sweep_out = "sweep.csv", sweep_format = "csv";
  std::optional<int> workers;
  bool no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Solve over a list of mission durations");
  add_common(sweep, sweep_opts);
  sweep->add_option("--tf-list", tf_list, "Comma-separated durations (overrides sweep section)");
  sweep->add_option("--workers", workers, "Worker threads");
  sweep->add_option("-o,--out", sweep_out, "Output file");
  sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_flag("--no-timing", no_timing, "Write zero wall times for byte-stable output");

  std::string verify_traj;
  auto* verify = app.add_subcommand("verify", "Check a trajectory CSV against the nonlinear dynamics");
  add_common(verify, verify_opts);
  verify->add_option("-t,--trajectory", verify_traj, "Trajectory CSV")->required();

  std::string export_in, export_out, export_format = "json";
  auto* exp = app.add_subcommand("export", "Convert a sweep CSV");
  exp->add_option("-i,--in", export_in, "Sweep CSV")->required();
  exp->add_option("-o,--out", export_out, "Output file")->required();
  exp->add_option("--format", export_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string dump_traj, dump_out;
  auto* dump = app.add_subcommand("dump-socp", "Write the first SOCP subproblem in the conic text format");
  add_common(dump, dump_opts);
  dump->add_option("-t,--trajectory", dump_traj, "Linearize about this trajectory CSV instead");
  dump->add_option("-o,--out", dump_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, out_dir);
    if (*sweep) return cmd_sweep(sweep_opts, tf_list, workers, sweep_out, sweep_format, no_timing);
    if (*verify) return cmd_verify(verify_opts, verify_traj);
    if (*exp) return cmd_export(export_in, export_out, export_format);
    if (*dump) return cmd_dump(dump_opts, dump_traj, dump_out);
  } catch (const ConfigError& e) {
    log_error("config", e.what());
    return kConfigError;
  } catch (const InputError& e) {
    log_error("input", e.what());
    return kConfigError;
  } catch (const StageError& e) {
    log_error(e.stage(), e.what());
    return kSolverFailure;
  } catch (const ScvxError& e) {
    log_error("scvx", e.what());
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    log_error("argument", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    log_error("runtime", e.what());
    return kSolverFailure;
  }
  return kOk;
}
