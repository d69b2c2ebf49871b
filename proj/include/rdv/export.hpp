#pragma once

// CSV and JSON persistence of sweep rows, run records and trajectories.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdv/runner.hpp"

namespace rdv {

enum class Format { kCsv, kJson };

/// Column order of sweep CSV files.
const std::vector<std::string>& sweep_columns();

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
void write_sweep_json(const std::vector<SweepRow>& rows, std::ostream& out);

/// Writes rows to path. Throws std::invalid_argument on an empty list and
/// std::runtime_error on I/O failure.
void export_rows(const std::vector<SweepRow>& rows, Format format, const std::filesystem::path& path);

/// Per node: sat, t, r, theta, phi, v_r, v_t, v_n, m, T_r, T_t, T_n, T_mag.
void write_trajectory_csv(const TrajectoryPair& traj, std::ostream& out);
/// Inverse of write_trajectory_csv.
TrajectoryPair read_trajectory_csv(std::istream& in);

/// One trajectory block per SCvx iteration, with a leading iteration column.
void write_iterations_csv(const ScvxReport& report, std::ostream& out);

void write_record_json(const RunRecord& rec, std::ostream& out);

void write_verification_json(const VerificationReport& rep, std::ostream& out);

}  // namespace rdv
