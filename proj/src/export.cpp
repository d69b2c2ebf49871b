#include "rdv/export.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace rdv {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Splits one CSV record, honouring double quotes.
std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::runtime_error("csv: bad number '" + s + "'");
  return v;
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json row_json(const SweepRow& r) {
  return ordered_json{{"tf", r.tf},
                      {"dm_total", number(r.dm_total)},
                      {"dm_sat_I", number(r.dm_sat_I)},
                      {"dm_sat_II", number(r.dm_sat_II)},
                      {"dm_transfer", number(r.dm_transfer)},
                      {"dm_phasing_total", number(r.dm_phasing_total)},
                      {"family", r.family},
                      {"final_inclination_deg", number(r.final_inclination_deg)},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"max_eta", number(r.max_eta)},
                      {"wall_time_s", r.wall_time_s},
                      {"note", r.note}};
}

ordered_json residuals_json(const TerminalResiduals& t) {
  return ordered_json{{"theta", t.theta},       {"radius", t.radius},     {"radial_v", t.radial_v},
                      {"speed", t.speed},       {"matching", t.matching}, {"max", t.max()}};
}

ordered_json verification_json(const VerificationReport& v) {
  return ordered_json{{"terminal", residuals_json(v.terminal)},
                      {"propagated_terminal", residuals_json(v.propagated_terminal)},
                      {"max_defect_vs_propagation", v.max_defect_vs_propagation},
                      {"relaxation_gap", v.relaxation_gap},
                      {"propellant", {v.propellant[0], v.propellant[1]}},
                      {"propellant_total", v.propellant_total}};
}

ordered_json scvx_json(const ScvxReport& r) {
  ordered_json status = ordered_json::array();
  for (socp::Status s : r.solver_status) status.push_back(socp::to_string(s));
  return ordered_json{{"converged", r.converged},
                      {"iterations", r.iterations},
                      {"objective_history", r.objective_history},
                      {"state_delta_history", r.state_delta_history},
                      {"solver_status", status},
                      {"nodes", r.final.nodes()}};
}

void write_trajectory_rows(const TrajectoryPair& traj, std::ostream& out, const std::string& prefix) {
  for (Sat s : kBothSats) {
    const StateTraj& x = traj.states(s);
    const ControlTraj& u = traj.controls(s);
    for (int j = 0; j < traj.nodes(); ++j) {
      const double m = std::exp(x(kZ, j));
      out << prefix << name_of(s) << ',' << traj.mesh.t(j);
      for (int i : {kR, kTheta, kPhi, kVr, kVt, kVn}) out << ',' << x(i, j);
      out << ',' << m << ',' << u(kUr, j) * m << ',' << u(kUt, j) * m << ',' << u(kUn, j) * m << ','
          << u(kUN, j) * m << '\n';
    }
  }
}

constexpr const char* kTrajectoryHeader = "sat,t,r,theta,phi,v_r,v_t,v_n,m,T_r,T_t,T_n,T_mag";

}  // namespace

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"tf",          "dm_total",   "dm_sat_I",
                                             "dm_sat_II",   "dm_transfer", "dm_phasing_total",
                                             "family",      "final_inclination_deg", "iterations",
                                             "converged",   "max_eta",    "wall_time_s",
                                             "note"};
  return cols;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n' << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.tf << ',' << r.dm_total << ',' << r.dm_sat_I << ',' << r.dm_sat_II << ',' << r.dm_transfer << ','
        << r.dm_phasing_total << ',' << r.family << ',' << r.final_inclination_deg << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << r.max_eta << ',' << r.wall_time_s << ',' << csv_quote(r.note) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  const std::vector<std::string> header = split(line, ',');
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < header.size(); ++i) idx[header[i]] = i;
  for (const std::string& c : sweep_columns()) {
    if (!idx.count(c)) throw std::runtime_error("csv: missing column " + c);
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cell = csv_cells(line);
    if (cell.size() != header.size()) throw std::runtime_error("csv: wrong cell count in '" + line + "'");
    auto num = [&](const char* c) { return parse_double(cell[idx.at(c)]); };
    SweepRow r;
    r.tf = num("tf");
    r.dm_total = num("dm_total");
    r.dm_sat_I = num("dm_sat_I");
    r.dm_sat_II = num("dm_sat_II");
    r.dm_transfer = num("dm_transfer");
    r.dm_phasing_total = num("dm_phasing_total");
    r.family = cell[idx.at("family")];
    r.final_inclination_deg = num("final_inclination_deg");
    r.iterations = static_cast<int>(num("iterations"));
    r.converged = num("converged") != 0.0;
    r.max_eta = num("max_eta");
    r.wall_time_s = num("wall_time_s");
    r.note = cell[idx.at("note")];
    rows.push_back(r);
  }
  return rows;
}

void write_sweep_json(const std::vector<SweepRow>& rows, std::ostream& out) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows) arr.push_back(row_json(r));
  out << arr.dump(2) << '\n';
}

void export_rows(const std::vector<SweepRow>& rows, Format format, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("export: no rows");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export: cannot open " + path.string());
  if (format == Format::kCsv) {
    write_sweep_csv(rows, out);
  } else {
    write_sweep_json(rows, out);
  }
  out.flush();
  if (!out) throw std::runtime_error("export: write failed for " + path.string());
}

void write_trajectory_csv(const TrajectoryPair& traj, std::ostream& out) {
  out << kTrajectoryHeader << '\n' << std::setprecision(17);
  write_trajectory_rows(traj, out, "");
}

TrajectoryPair read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::runtime_error("trajectory csv: expected header " + std::string(kTrajectoryHeader));
  }
  std::array<std::vector<std::vector<double>>, 2> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cell = split(line, ',');
    if (cell.size() != 13) throw std::runtime_error("trajectory csv: wrong cell count in '" + line + "'");
    int s = -1;
    if (cell[0] == "I") s = 0;
    if (cell[0] == "II") s = 1;
    if (s < 0) throw std::runtime_error("trajectory csv: unknown satellite '" + cell[0] + "'");
    std::vector<double> v;
    for (std::size_t i = 1; i < cell.size(); ++i) v.push_back(parse_double(cell[i]));
    rows[s].push_back(std::move(v));
  }
  if (rows[0].size() != rows[1].size() || rows[0].size() < 2) {
    throw std::runtime_error("trajectory csv: both satellites need the same nodes, at least two");
  }
  std::vector<double> t;
  for (std::size_t j = 0; j < rows[0].size(); ++j) {
    if (rows[0][j][0] != rows[1][j][0]) throw std::runtime_error("trajectory csv: satellite times differ");
    t.push_back(rows[0][j][0]);
  }
  TrajectoryPair traj{Mesh(std::move(t))};
  for (int s = 0; s < 2; ++s) {
    for (std::size_t j = 0; j < rows[s].size(); ++j) {
      const std::vector<double>& v = rows[s][j];
      const double m = v[7];
      if (!(m > 0.0)) throw std::runtime_error("trajectory csv: non-positive mass");
      traj.x[s].col(j) << v[1], v[2], v[3], v[4], v[5], v[6], std::log(m);
      traj.u[s].col(j) << v[8] / m, v[9] / m, v[10] / m, v[11] / m;
    }
  }
  return traj;
}

void write_iterations_csv(const ScvxReport& report, std::ostream& out) {
  out << "iteration," << kTrajectoryHeader << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < report.history.size(); ++k) {
    write_trajectory_rows(report.history[k], out, std::to_string(k + 1) + ",");
  }
}

void write_record_json(const RunRecord& rec, std::ostream& out) {
  const Scenario& s = rec.scenario;
  ordered_json j;
  j["config_hash"] = hash_hex(rec.config_hash);
  j["scenario"] = {{"mu", s.mu},       {"r0", s.r0},        {"rf", s.rf},
                   {"tf", s.tf},       {"t_max", s.t_max},  {"c", s.c},
                   {"m0", s.m0},       {"theta0_I", s.theta0[0]}, {"theta0_II", s.theta0[1]},
                   {"inc_I", s.inc[0]}, {"inc_II", s.inc[1]}, {"k_rev", s.k_rev}};
  j["converged"] = rec.converged;
  j["first_pass"] = scvx_json(rec.first_pass);
  j["last_pass"] = scvx_json(rec.last_pass);
  j["refinement_rounds"] = rec.refinement_rounds;
  j["final_nodes"] = rec.final_nodes;
  j["max_eta"] = rec.max_eta;
  j["verification"] = verification_json(rec.verification);
  j["phasing"] = {{"dm_transfer", rec.phasing.dm_transfer},
                  {"dm_phasing", {rec.phasing.dm_phasing[0], rec.phasing.dm_phasing[1]}},
                  {"dm_phasing_total", rec.phasing.dm_phasing_total},
                  {"family", to_string(rec.phasing.family)}};
  j["final_inclination_deg"] = rec.final_inclination_deg;
  j["plane_change_deg"] = {rec.plane_change_deg[0], rec.plane_change_deg[1]};
  j["theta_span"] = {rec.theta_span[0], rec.theta_span[1]};
  j["wall_time_s"] = {{"scvx", rec.times.scvx},
                      {"refine", rec.times.refine},
                      {"verify", rec.times.verify},
                      {"transfer", rec.times.transfer},
                      {"total", rec.times.total}};
  out << j.dump(2) << '\n';
}

void write_verification_json(const VerificationReport& rep, std::ostream& out) {
  out << verification_json(rep).dump(2) << '\n';
}

}  // namespace rdv
