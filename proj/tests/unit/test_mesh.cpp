#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "rdv/mesh.hpp"
#include "rdv/scvx.hpp"

using namespace rdv;

namespace {

double predicted_max(const std::vector<double>& eta, const std::vector<int>& n) {
  double m = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) m = std::max(m, eta[j] / std::pow(1.0 + n[j], 3));
  return m;
}

// Smallest achievable max over all allocations using at most `budget` points.
double brute_force_minimax(const std::vector<double>& eta, int budget) {
  std::vector<int> n(eta.size(), 0);
  double best = predicted_max(eta, n);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
    if (j == eta.size()) {
      best = std::min(best, predicted_max(eta, n));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      n[j] = k;
      rec(j + 1, left - k);
    }
    n[j] = 0;
  };
  rec(0, budget);
  return best;
}

const Scenario& coast_scenario() {
  static const Scenario s = [] {
    Scenario c;
    c.inc = {0.1, 0.3};
    return c;
  }();
  return s;
}

}  // namespace

TEST_CASE("Hermite spline interpolates nodes and slopes") {
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 31);
  const ContinuousTrajectory cont(initial_reference(s, mesh), s);
  for (Sat sat : kBothSats) {
    for (int j = 0; j < mesh.size(); ++j) {
      CHECK((cont.state(sat, mesh.t(j)) - cont.nodes().states(sat).col(j)).cwiseAbs().maxCoeff() < 1e-14);
    }
    // Centered difference of the spline at an interior node recovers the node slope to O(d^2).
    const double d = 1e-5;
    const double t = mesh.t(10);
    const StateVec fd = (cont.state(sat, t + d) - cont.state(sat, t - d)) / (2 * d);
    CHECK((fd - cont.slope(sat, 10)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("controls are linear between nodes") {
  const Mesh mesh = build_mesh(1.0, 3);
  TrajectoryPair t(mesh);
  t.controls(Sat::I).col(0) << 0.0, 0.1, 0.0, 0.1;
  t.controls(Sat::I).col(1) << 0.2, 0.1, 0.0, 0.3;
  for (int s = 0; s < 2; ++s) t.x[s].row(kR).setOnes(), t.x[s].row(kVt).setOnes();
  const ContinuousTrajectory cont(t, Scenario{});
  const ControlVec u = cont.control(Sat::I, 0.125);
  CHECK(u[kUr] == doctest::Approx(0.05));
  CHECK(u[kUN] == doctest::Approx(0.15));
}

TEST_CASE("circular coast has negligible error") {
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 101);
  const MeshErrorReport rep = estimate_errors(ContinuousTrajectory(initial_reference(s, mesh), s), mesh, s);
  CHECK(rep.intervals() == 100);
  CHECK(rep.max_eta < 1e-5);
  CHECK(rep.max_eta > 0.0);
}

TEST_CASE("error estimate is third order") {
  const Scenario& s = coast_scenario();
  const Mesh coarse = build_mesh(s.tf, 41);
  const Mesh fine = build_mesh(s.tf, 81);
  const double e1 = estimate_errors(ContinuousTrajectory(initial_reference(s, coarse), s), coarse, s).max_eta;
  const double e2 = estimate_errors(ContinuousTrajectory(initial_reference(s, fine), s), fine, s).max_eta;
  const double order = std::log2(e1 / e2);
  CHECK(order > 2.7);
  CHECK(order < 3.3);
}

TEST_CASE("interval error matches the quadrature oracle within a factor of two") {
  // On exact nodes eta is half the two-panel trapezoid error, h^3/96 |x'''|.
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 81);
  const MeshErrorReport rep = estimate_errors(ContinuousTrajectory(initial_reference(s, mesh), s), mesh, s);
  const auto exact = [&](double t) { return to_convex_state(coasting_state(s, Sat::II, t)).vec(); };
  const double d = 1e-2;
  int checked = 0;
  for (int j : {3, 17, 40, 66}) {
    const double h = mesh.h(j);
    const double tm = mesh.t(j) + 0.5 * h;
    const StateVec x3 =
        (exact(tm + 2 * d) - 2 * exact(tm + d) + 2 * exact(tm - d) - exact(tm - 2 * d)) / (2 * d * d * d);
    for (int i = 0; i < kNx; ++i) {
      const double oracle = h * h * h / 96.0 * std::abs(x3[i]);
      if (oracle < 1e-7) continue;
      const double est = rep.eta[1](i, j);
      CHECK(est / oracle > 0.5);
      CHECK(est / oracle < 2.0);
      ++checked;
    }
  }
  CHECK(checked > 4);
}

TEST_CASE("allocate_points examples") {
  CHECK(allocate_points({8e-6}, 1e-6, 10) == std::vector<int>{1});
  CHECK(allocate_points({27e-6, 8e-6}, 1e-6, 3) == std::vector<int>{2, 1});
  CHECK(allocate_points({0.5e-6, 2e-6}, 1e-6, 5) == std::vector<int>{0, 1});
  CHECK(allocate_points({5e-6, 5e-6}, 1e-6, 1) == std::vector<int>{1, 0});
  CHECK(allocate_points({5e-6}, 1e-6, 0) == std::vector<int>{0});
}

TEST_CASE("greedy allocation matches brute-force minimax") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-7.0, -3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const int budget = trial % 6;
    std::vector<double> eta(n);
    for (double& e : eta) e = std::pow(10.0, u(rng));
    const double tol = 1e-6;
    const std::vector<int> g = allocate_points(eta, tol, budget);
    int used = 0;
    for (int k : g) used += k;
    CHECK(used <= budget);
    const double greedy = predicted_max(eta, g);
    const double best = brute_force_minimax(eta, budget);
    CHECK(greedy <= std::max(best, tol) * (1 + 1e-12));
  }
}

TEST_CASE("interpolate_onto") {
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 11);
  const TrajectoryPair ref = initial_reference(s, mesh);
  CHECK(interpolate_onto(ref, mesh, s).x[1] == ref.x[1]);

  std::vector<double> t = mesh.times();
  t.insert(t.begin() + 3, 0.5 * (t[2] + t[3]));
  const Mesh finer(t);
  const TrajectoryPair out = interpolate_onto(ref, finer, s);
  CHECK(out.nodes() == 12);
  CHECK(out.states(Sat::I).col(2) == ref.states(Sat::I).col(2));
  CHECK(out.states(Sat::I).col(4) == ref.states(Sat::I).col(3));
  const StateVec truth = to_convex_state(coasting_state(s, Sat::I, t[3])).vec();
  CHECK((out.states(Sat::I).col(3) - truth).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("refinement keeps old nodes and respects the budget") {
  const Scenario s;
  const Mesh mesh = build_mesh(s.tf, 41);
  const ScvxReport run = run_scvx(s, mesh, {});
  const ErrorOptions opts{1e-6, false};
  const MeshErrorReport rep = estimate_errors(ContinuousTrajectory(run.final, s), mesh, s, opts);
  REQUIRE(!rep.above_tol.empty());
  const Mesh next = refine(mesh, rep, opts.tol, 0.5);
  CHECK(next.size() > mesh.size());
  CHECK(next.size() <= mesh.size() + 20);
  for (double tk : mesh.times()) {
    CHECK(std::find(next.times().begin(), next.times().end(), tk) != next.times().end());
  }
  CHECK(next.tf() == mesh.tf());

  ScvxConfig cfg;
  const ScvxReport again = run_scvx(s, interpolate_onto(run.final, next, s), cfg);
  const MeshErrorReport rep2 = estimate_errors(ContinuousTrajectory(again.final, s), next, s, opts);
  CHECK(rep2.max_eta <= 0.9 * rep.max_eta);
}

TEST_CASE("refine leaves an accurate mesh alone") {
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 101);
  const MeshErrorReport rep = estimate_errors(ContinuousTrajectory(initial_reference(s, mesh), s), mesh, s, {1e-5});
  CHECK(rep.above_tol.empty());
  CHECK(refine(mesh, rep, 1e-5, 0.5) == mesh);
  CHECK_THROWS_AS(refine(mesh, rep, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("error csv layout") {
  const Scenario& s = coast_scenario();
  const Mesh mesh = build_mesh(s.tf, 4);
  const MeshErrorReport rep = estimate_errors(ContinuousTrajectory(initial_reference(s, mesh), s), mesh, s);
  std::ostringstream out;
  write_error_csv(rep, mesh, out);
  const std::string text = out.str();
  CHECK(text.rfind("interval,sat,t,h,eta_r,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 3);
}
