#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "rdv/socp.hpp"

namespace rdv::socp {

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, std::shared_ptr<const ExternalAdapter>>& registry() {
  static std::map<std::string, std::shared_ptr<const ExternalAdapter>> r;
  return r;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

Status parse_status(const std::string& s) {
  if (s == "optimal") return Status::kOptimal;
  if (s == "infeasible") return Status::kInfeasible;
  if (s == "unbounded") return Status::kUnbounded;
  if (s == "max_iters") return Status::kMaxIters;
  return Status::kNumericalFailure;
}

// Writes the problem, runs `python script in out tol`, reads back
//   status <word>
//   objective <value>
//   primal <n>
//   <value> x n
class CvxpyAdapter final : public ExternalAdapter {
 public:
  CvxpyAdapter(std::string python, std::string script)
      : python_(std::move(python)), script_(std::move(script)) {}

  std::string name() const override { return "cvxpy"; }

  bool available() const override {
    std::call_once(probe_once_, [this] {
      if (!std::filesystem::exists(script_)) return;
      const std::string cmd = quote(python_) + " -c 'import cvxpy' >/dev/null 2>&1";
      available_ = std::system(cmd.c_str()) == 0;
    });
    return available_;
  }

  SocpSolution solve(const SocpProblem& problem, const SolverSettings& settings) const override {
    namespace fs = std::filesystem;
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path();
    const std::string stem =
        "rdv_socp_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const fs::path in_path = dir / (stem + ".txt");
    const fs::path out_path = dir / (stem + ".out");
    {
      std::ofstream f(in_path);
      write_conic(problem, f);
    }
    std::ostringstream cmd;
    cmd << quote(python_) << ' ' << quote(script_) << ' ' << quote(in_path.string()) << ' '
        << quote(out_path.string()) << ' ' << settings.gap_tol << " >/dev/null 2>&1";
    const int rc = std::system(cmd.str().c_str());
    std::error_code ec;
    fs::remove(in_path, ec);
    if (rc != 0) {
      fs::remove(out_path, ec);
      throw std::runtime_error("external solver script failed with code " + std::to_string(rc));
    }
    std::ifstream f(out_path);
    SocpSolution sol;
    std::string key;
    std::string status;
    f >> key >> status;
    sol.status = parse_status(status);
    f >> key >> sol.objective;
    int n = 0;
    f >> key >> n;
    sol.primal = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) f >> sol.primal[i];
    f.close();
    fs::remove(out_path, ec);
    return sol;
  }

 private:
  std::string python_;
  std::string script_;
  mutable std::once_flag probe_once_;
  mutable bool available_ = false;
};

}  // namespace

void register_adapter(std::shared_ptr<const ExternalAdapter> adapter) {
  std::lock_guard lock(registry_mutex());
  registry()[adapter->name()] = std::move(adapter);
}

std::shared_ptr<const ExternalAdapter> find_adapter(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  const auto it = registry().find(name);
  return it == registry().end() ? nullptr : it->second;
}

SocpSolution solve_via_external(const SocpProblem& problem, const std::string& adapter,
                                const SolverSettings& settings) {
  const auto a = find_adapter(adapter);
  if (!a) throw AdapterUnavailable("no external adapter registered as '" + adapter + "'");
  if (!a->available()) throw AdapterUnavailable("external adapter '" + adapter + "' is unavailable");
  return a->solve(problem, settings);
}

std::shared_ptr<const ExternalAdapter> make_cvxpy_adapter(std::string python, std::string script) {
  return std::make_shared<CvxpyAdapter>(std::move(python), std::move(script));
}

}  // namespace rdv::socp
