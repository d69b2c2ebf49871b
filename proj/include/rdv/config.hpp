#pragma once

// Run configuration: YAML loading with a closed schema, bundled presets, and a
// content hash of the resolved settings.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdv/scvx.hpp"
#include "rdv/socp.hpp"
#include "rdv/verify.hpp"

namespace rdv {

struct MeshSettings {
  int nodes = 101;
  double tol = 1e-6;
  bool relative = false;
  double growth_cap = 0.5;
  int max_rounds = 10;
};

struct VerifySettings {
  VerifyOptions options;
  PhasingOptions phasing;
  bool transfer_reference = true;  // solve the phase-free problem for dm_transfer
};

struct SweepSettings {
  std::vector<double> tf;
  bool continuation = true;
  int workers = 0;  // 0: hardware concurrency
};

struct RunConfig {
  Scenario scenario;
  ScvxConfig scvx;
  socp::SolverSettings solver;
  MeshSettings mesh;
  VerifySettings verify;
  SweepSettings sweep;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Parse or schema error. The message carries the origin and line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// Reads a YAML file. Missing keys take defaults except scenario.rf and scenario.tf.
RunConfig load_scenario(const std::filesystem::path& path);

std::vector<std::string> preset_names();
RunConfig load_preset(std::string_view name);
std::string preset_text(std::string_view name);

/// Resolved configuration as YAML with every key present.
std::string canonical_text(const RunConfig& cfg);

/// FNV-1a 64 of canonical_text.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// tf values start, start + step, ..., up to stop inclusive.
std::vector<double> tf_range(double start, double stop, double step);

}  // namespace rdv
