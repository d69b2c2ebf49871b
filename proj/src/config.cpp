#include "rdv/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include <yaml-cpp/yaml.h>

namespace rdv {

namespace {

struct Preset {
  const char* name;
  const char* text;
};

constexpr Preset kPresets[] = {
#include "presets.inc"
};

std::string where(const std::string& origin, const YAML::Mark& mark) {
  if (mark.is_null()) return origin;
  return origin + ":" + std::to_string(mark.line + 1);
}

// A mapping whose keys must all be consumed before finish().
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& origin)
      : node_(std::move(node)), path_(std::move(path)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_.Mark(), "expected a mapping");
  }

  template <class T>
  void get(const char* key, T& out, bool required = false) {
    seen_.insert(key);
    const YAML::Node v = node_ ? node_[key] : YAML::Node();
    if (!v || v.IsNull()) {
      if (required) fail(node_ ? node_.Mark() : YAML::Mark::null_mark(), "missing required field " + full(key));
      return;
    }
    try {
      out = v.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(v.Mark(), "invalid value for " + full(key));
    }
  }

  template <class T>
  void get_enum(const char* key, T& out, std::initializer_list<std::pair<const char*, T>> choices) {
    std::string word;
    get(key, word);
    if (word.empty()) return;
    for (const auto& [name, value] : choices) {
      if (word == name) {
        out = value;
        return;
      }
    }
    fail(node_[key].Mark(), "unknown value '" + word + "' for " + full(key));
  }

  bool has(const char* key) const { return node_ && node_[key] && !node_[key].IsNull(); }
  YAML::Mark mark_of(const char* key) const { return node_[key].Mark(); }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(node_ ? node_[key] : YAML::Node(), full(key), origin_);
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first.Mark(), "unknown key " + full(key));
    }
  }

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const {
    throw ConfigError(where(origin_, mark) + ": " + msg);
  }

 private:
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

const char* sat_word(Sat s) { return s == Sat::I ? "I" : "II"; }

}  // namespace

void RunConfig::validate() const {
  try {
    scenario.validate();
    scvx.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (mesh.nodes < 2) throw ConfigError("transcription.nodes must be at least 2");
  if (!(mesh.tol > 0.0)) throw ConfigError("mesh.tol must be positive");
  if (!(mesh.growth_cap > 0.0)) throw ConfigError("mesh.growth_cap must be positive");
  if (mesh.max_rounds < 0) throw ConfigError("mesh.max_rounds must be nonnegative");
  if (!(solver.gap_tol > 0.0 && solver.feas_tol > 0.0)) throw ConfigError("solver tolerances must be positive");
  if (solver.max_iters < 1) throw ConfigError("solver.max_iters must be at least 1");
  if (!(verify.options.propagation.rel_tol > 0.0 && verify.options.propagation.abs_tol > 0.0)) {
    throw ConfigError("verify tolerances must be positive");
  }
  if (sweep.workers < 0) throw ConfigError("sweep.workers must be nonnegative");
  for (double t : sweep.tf) {
    if (!(t > 0.0)) throw ConfigError("sweep tf values must be positive");
  }
}

std::vector<double> tf_range(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw ConfigError("sweep range needs step > 0 and stop >= start");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(std::round((start + i * step) * 1e9) / 1e9);
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(origin, e.mark) + ": " + e.msg);
  }
  RunConfig cfg;
  Section top(root, "", origin);

  Section sc = top.child("scenario");
  Scenario& s = cfg.scenario;
  sc.get("mu", s.mu);
  sc.get("r0", s.r0);
  sc.get("rf", s.rf, true);
  sc.get("tf", s.tf, true);
  sc.get("t_max", s.t_max);
  sc.get("c", s.c);
  sc.get("m0", s.m0);
  sc.get("theta0_I", s.theta0[0]);
  sc.get("theta0_II", s.theta0[1]);
  sc.get("inc_I", s.inc[0]);
  sc.get("inc_II", s.inc[1]);
  sc.get("k_rev", s.k_rev);
  sc.finish();

  Section tr = top.child("transcription");
  tr.get("nodes", cfg.mesh.nodes);
  tr.get_enum("objective", cfg.scvx.transcription.objective,
              {{"linearized_mass", ObjectiveMode::kLinearizedMass}, {"log_mass", ObjectiveMode::kLogMass}});
  tr.get_enum("terminal_sat", cfg.scvx.transcription.terminal_sat, {{"I", Sat::I}, {"II", Sat::II}});
  tr.get("rendezvous_phase", cfg.scvx.transcription.rendezvous_theta);
  tr.finish();

  Section sv = top.child("scvx");
  sv.get("eps_tol", cfg.scvx.eps_tol);
  sv.get("max_iters", cfg.scvx.max_iters);
  sv.get("filter", cfg.scvx.filter_enabled);
  if (sv.has("weights")) {
    std::vector<double> w;
    sv.get("weights", w);
    if (w.size() != 3) sv.fail(sv.mark_of("weights"), "scvx.weights needs three values");
    std::copy(w.begin(), w.end(), cfg.scvx.weights.k.begin());
  }
  sv.get("keep_history", cfg.scvx.keep_history);
  sv.finish();

  Section so = top.child("solver");
  so.get("gap_tol", cfg.solver.gap_tol);
  so.get("feas_tol", cfg.solver.feas_tol);
  so.get("max_iters", cfg.solver.max_iters);
  so.finish();

  Section me = top.child("mesh");
  me.get("tol", cfg.mesh.tol);
  me.get("relative", cfg.mesh.relative);
  me.get("growth_cap", cfg.mesh.growth_cap);
  me.get("max_rounds", cfg.mesh.max_rounds);
  me.finish();

  Section ve = top.child("verify");
  VerifyOptions& vo = cfg.verify.options;
  ve.get("propagate", vo.propagate);
  ve.get_enum("profile", vo.profile,
              {{"acceleration", ControlProfile::Kind::kAcceleration}, {"thrust", ControlProfile::Kind::kThrust}});
  ve.get("burn_threshold", vo.burn_threshold);
  ve.get("rel_tol", vo.propagation.rel_tol);
  ve.get("abs_tol", vo.propagation.abs_tol);
  ve.get("transfer_reference", cfg.verify.transfer_reference);
  ve.get("phasing_tolerance", cfg.verify.phasing.tolerance);
  ve.get("family_b_revolutions", cfg.verify.phasing.family_b_revolutions);
  ve.finish();
  vo.rendezvous_theta = cfg.scvx.transcription.rendezvous_theta;
  vo.terminal_sat = cfg.scvx.transcription.terminal_sat;

  Section sw = top.child("sweep");
  if (sw.has("tf")) {
    if (sw.has("start") || sw.has("stop") || sw.has("step")) {
      sw.fail(sw.mark_of("tf"), "sweep.tf excludes sweep.start/stop/step");
    }
    sw.get("tf", cfg.sweep.tf);
  } else if (sw.has("start") || sw.has("stop") || sw.has("step")) {
    double start = 0.0, stop = 0.0, step = 0.0;
    sw.get("start", start, true);
    sw.get("stop", stop, true);
    sw.get("step", step, true);
    cfg.sweep.tf = tf_range(start, stop, step);
  }
  sw.get("continuation", cfg.sweep.continuation);
  sw.get("workers", cfg.sweep.workers);
  sw.finish();

  top.finish();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const Preset& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string preset_text(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (name == p.name) return p.text;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

RunConfig load_preset(std::string_view name) {
  return parse_config(preset_text(name), "preset:" + std::string(name));
}

std::string canonical_text(const RunConfig& cfg) {
  std::ostringstream o;
  o << std::setprecision(17);
  const Scenario& s = cfg.scenario;
  const auto& tr = cfg.scvx.transcription;
  const auto& vo = cfg.verify.options;
  o << "scenario:\n"
    << "  mu: " << s.mu << "\n  r0: " << s.r0 << "\n  rf: " << s.rf << "\n  tf: " << s.tf
    << "\n  t_max: " << s.t_max << "\n  c: " << s.c << "\n  m0: " << s.m0 << "\n  theta0_I: " << s.theta0[0]
    << "\n  theta0_II: " << s.theta0[1] << "\n  inc_I: " << s.inc[0] << "\n  inc_II: " << s.inc[1]
    << "\n  k_rev: " << s.k_rev << "\n";
  o << "transcription:\n"
    << "  nodes: " << cfg.mesh.nodes << "\n  objective: "
    << (tr.objective == ObjectiveMode::kLogMass ? "log_mass" : "linearized_mass")
    << "\n  terminal_sat: " << sat_word(tr.terminal_sat) << "\n  rendezvous_phase: " << std::boolalpha
    << tr.rendezvous_theta << "\n";
  o << "scvx:\n"
    << "  eps_tol: " << cfg.scvx.eps_tol << "\n  max_iters: " << cfg.scvx.max_iters
    << "\n  filter: " << cfg.scvx.filter_enabled << "\n  weights: [" << cfg.scvx.weights.k[0] << ", "
    << cfg.scvx.weights.k[1] << ", " << cfg.scvx.weights.k[2] << "]\n  keep_history: " << cfg.scvx.keep_history
    << "\n";
  o << "solver:\n"
    << "  gap_tol: " << cfg.solver.gap_tol << "\n  feas_tol: " << cfg.solver.feas_tol
    << "\n  max_iters: " << cfg.solver.max_iters << "\n";
  o << "mesh:\n"
    << "  tol: " << cfg.mesh.tol << "\n  relative: " << cfg.mesh.relative << "\n  growth_cap: " << cfg.mesh.growth_cap
    << "\n  max_rounds: " << cfg.mesh.max_rounds << "\n";
  o << "verify:\n"
    << "  propagate: " << vo.propagate << "\n  profile: "
    << (vo.profile == ControlProfile::Kind::kThrust ? "thrust" : "acceleration")
    << "\n  burn_threshold: " << vo.burn_threshold << "\n  rel_tol: " << vo.propagation.rel_tol
    << "\n  abs_tol: " << vo.propagation.abs_tol << "\n  transfer_reference: " << cfg.verify.transfer_reference
    << "\n  phasing_tolerance: " << cfg.verify.phasing.tolerance
    << "\n  family_b_revolutions: " << cfg.verify.phasing.family_b_revolutions << "\n";
  o << "sweep:\n  tf: [";
  for (std::size_t i = 0; i < cfg.sweep.tf.size(); ++i) o << (i ? ", " : "") << cfg.sweep.tf[i];
  o << "]\n  continuation: " << cfg.sweep.continuation << "\n  workers: " << cfg.sweep.workers << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // The worker count does not change results.
  RunConfig c = cfg;
  c.sweep.workers = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

}  // namespace rdv
