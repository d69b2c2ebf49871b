#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rdv/scvx.hpp"

using namespace rdv;
using std::numbers::pi;

namespace {

TrajectoryPair constant_pair(const Mesh& mesh, double v) {
  TrajectoryPair t(mesh);
  for (int s = 0; s < 2; ++s) {
    t.x[s].setConstant(v);
    t.u[s].setConstant(v);
  }
  return t;
}

}  // namespace

TEST_CASE("initial reference coasts with zero controls") {
  Scenario s;
  s.inc = {0.0, 0.2};
  const Mesh mesh = build_mesh(s.tf, 21);
  const TrajectoryPair ref = initial_reference(s, mesh);
  for (Sat sat : kBothSats) {
    CHECK(ref.controls(sat).isZero());
    CHECK(ref.states(sat).row(kZ).isZero());
    for (int j = 0; j < mesh.size(); ++j) {
      const StateVec x = to_convex_state(coasting_state(s, sat, mesh.t(j))).vec();
      CHECK((ref.states(sat).col(j) - x).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  CHECK(ref.states(Sat::I)(kTheta, 0) == doctest::Approx(pi));
}

TEST_CASE("filter weights on three solutions") {
  const Mesh mesh = build_mesh(1.0, 3);
  const std::vector<TrajectoryPair> recent{constant_pair(mesh, 11.0), constant_pair(mesh, 0.0),
                                           constant_pair(mesh, 0.0)};
  const TrajectoryPair f = filter_reference(recent, {});
  CHECK(f.states(Sat::I)(kR, 0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(f.controls(Sat::II)(kUN, 2) == 11.0);

  const std::vector<TrajectoryPair> r2{constant_pair(mesh, 1.0), constant_pair(mesh, 1.0), constant_pair(mesh, 0.0)};
  CHECK(filter_reference(r2, {}).states(Sat::II)(kZ, 1) == doctest::Approx(9.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("filter with fewer than three solutions uses the newest") {
  const Mesh mesh = build_mesh(1.0, 3);
  const std::vector<TrajectoryPair> r{constant_pair(mesh, 2.0), constant_pair(mesh, 7.0)};
  CHECK(filter_reference(r, {}).states(Sat::I)(kR, 1) == 2.0);
  const std::vector<TrajectoryPair> one{constant_pair(mesh, 3.0)};
  CHECK(filter_reference(one, {}).states(Sat::I)(kR, 1) == 3.0);
}

TEST_CASE("filtered states are an affine combination") {
  const Mesh mesh = build_mesh(2.0, 9);
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TrajectoryPair> r;
    for (int i = 0; i < 3; ++i) {
      TrajectoryPair t(mesh);
      for (int s = 0; s < 2; ++s) {
        t.x[s] = t.x[s].unaryExpr([&](double) { return g(rng); });
        t.u[s] = t.u[s].unaryExpr([&](double) { return g(rng); });
      }
      r.push_back(t);
    }
    const TrajectoryPair f = filter_reference(r, {});
    for (int s = 0; s < 2; ++s) {
      const StateTraj lo = r[0].x[s].cwiseMin(r[1].x[s]).cwiseMin(r[2].x[s]);
      const StateTraj hi = r[0].x[s].cwiseMax(r[1].x[s]).cwiseMax(r[2].x[s]);
      CHECK(((f.x[s] - lo).minCoeff() > -1e-14));
      CHECK(((hi - f.x[s]).minCoeff() > -1e-14));
      const StateTraj expect = (6.0 * r[0].x[s] + 3.0 * r[1].x[s] + 2.0 * r[2].x[s]) / 11.0;
      CHECK((f.x[s] - expect).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("state delta and termination boundary") {
  const Mesh mesh = build_mesh(1.0, 4);
  TrajectoryPair a = constant_pair(mesh, 0.0);
  TrajectoryPair b = a;
  b.states(Sat::II)(kVt, 2) = 0.5;
  b.controls(Sat::I)(kUr, 1) = 9.0;  // controls do not count
  CHECK(state_delta(a, b) == 0.5);
  CHECK(check_termination(a, b, 0.5000001));
  CHECK_FALSE(check_termination(a, b, 0.5));
}

TEST_CASE("config validation") {
  ScvxConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.eps_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.weights.k = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("degenerate rendezvous converges at the first check") {
  Scenario s;
  s.rf = 1.0;
  s.theta0 = {0.0, 0.0};
  s.tf = 2 * pi;
  const ScvxReport rep = run_scvx(s, build_mesh(s.tf, 31), {});
  CHECK(rep.converged);
  CHECK(rep.iterations == 2);
  CHECK(rep.objective_history.back() == doctest::Approx(2.0).epsilon(1e-7));
  for (Sat sat : kBothSats) CHECK(rep.final.controls(sat).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("coplanar run converges and logs every iteration") {
  const Scenario s;
  ScvxConfig cfg;
  int calls = 0;
  cfg.on_iteration = [&](const IterationLog& log) {
    ++calls;
    CHECK(log.iteration == calls);
  };
  const ScvxReport rep = run_scvx(s, build_mesh(s.tf, 41), cfg);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 25);
  CHECK(calls == rep.iterations);
  CHECK(static_cast<int>(rep.objective_history.size()) == rep.iterations);
  CHECK(rep.state_delta_history.back() < cfg.eps_tol);
  for (int k = 5; k < rep.iterations; ++k) CHECK(rep.state_delta_history[k] <= 1e-2);
}

TEST_CASE("filter off still converges on the coplanar case") {
  const Scenario s;
  ScvxConfig cfg;
  cfg.filter_enabled = false;
  const ScvxReport rep = run_scvx(s, build_mesh(s.tf, 41), cfg);
  CHECK(rep.converged);
  ScvxConfig on;
  const ScvxReport ref = run_scvx(s, build_mesh(s.tf, 41), on);
  CHECK(rep.objective_history.back() == doctest::Approx(ref.objective_history.back()).epsilon(1e-5));
}

TEST_CASE("unreachable target raises ScvxError with the problem") {
  Scenario s;
  s.t_max = 1e-4;
  s.rf = 2.0;
  s.tf = 1.0;
  try {
    run_scvx(s, build_mesh(s.tf, 11), {});
    FAIL("expected ScvxError");
  } catch (const ScvxError& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.status() != socp::Status::kOptimal);
    CHECK(e.problem().n_vars == DiscreteProblemLayout(11).n_vars());
  }
}
