#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "rdv/scvx.hpp"
#include "rdv/transcription.hpp"

using namespace rdv;
using std::numbers::pi;

namespace {

Eigen::VectorXd row_residuals(const socp::SparseRows& rows, const Eigen::VectorXd& x) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(rows.rows());
  for (const auto& e : rows.entries) r[e.row] += e.value * x[e.col];
  for (int i = 0; i < rows.rows(); ++i) r[i] -= rows.rhs[i];
  return r;
}

Scenario degenerate_scenario() {
  Scenario s;
  s.rf = 1.0;
  s.theta0 = {0.0, 0.0};
  s.tf = 2 * pi;
  return s;
}

TrajectoryPair perturbed(const TrajectoryPair& t, unsigned seed, double amp) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  TrajectoryPair out = t;
  for (int s = 0; s < 2; ++s) {
    out.x[s] = out.x[s].unaryExpr([&](double v) { return v + u(rng); });
    out.u[s] = out.u[s].unaryExpr([&](double v) { return v + u(rng); });
  }
  return out;
}

}  // namespace

TEST_CASE("build_mesh") {
  const Mesh m = build_mesh(10.0, 101);
  CHECK(m.size() == 101);
  for (int j = 0; j + 1 < m.size(); ++j) CHECK(m.h(j) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.tf() == 10.0);
  CHECK(build_mesh(1.0, 2).times() == std::vector<double>{0.0, 1.0});
  const Mesh q = build_mesh(2 * pi, 5);
  for (int j = 0; j < 5; ++j) CHECK(q.t(j) == doctest::Approx(j * pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(build_mesh(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Mesh({0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("trapezoid_defect") {
  StateVec a = StateVec::Constant(0.3);
  StateVec x0 = StateVec::Zero();
  CHECK(trapezoid_defect(x0, x0 + 0.5 * a, a, a, 0.5).norm() < 1e-15);

  // f(t) = t on [0, 1]
  StateVec f0 = StateVec::Zero();
  StateVec f1 = StateVec::Ones();
  CHECK(trapezoid_defect(x0, StateVec::Constant(0.5), f0, f1, 1.0).norm() < 1e-15);

  // f(t) = t^2 on [0, 1]: exact end state 1/3, trapezoid 1/2
  const StateVec d = trapezoid_defect(x0, StateVec::Constant(1.0 / 3.0), f0, f1, 1.0);
  CHECK(d[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("layout and problem size") {
  Scenario s;
  s.inc = {0.0, 10.0 * pi / 180.0};
  const Mesh mesh = build_mesh(10.5, 101);
  DiscreteProblemLayout layout(101);
  CHECK(layout.n_vars() == 2222);
  const socp::SocpProblem p = assemble_socp(s, initial_reference(s, mesh), layout);
  CHECK(p.n_vars == 2222);
  CHECK(p.cones.size() == 202);
  for (const auto& c : p.cones) CHECK(c.size() == 4);
  CHECK(validate(p).ok());
  CHECK(static_cast<int>(layout.equality_tags.size()) == p.equalities.rows());

  // Every column appears exactly once in the map.
  std::set<int> cols;
  for (Sat sat : kBothSats) {
    for (int j = 0; j < 101; ++j) {
      for (int k = 0; k < DiscreteProblemLayout::kPerNode; ++k) cols.insert(layout.state_col(sat, j, k));
    }
  }
  CHECK(static_cast<int>(cols.size()) == layout.n_vars());
  CHECK(*cols.begin() == 0);
  CHECK(*cols.rbegin() == layout.n_vars() - 1);
  for (const auto& e : p.equalities.entries) CHECK((e.col >= 0 && e.col < p.n_vars));
}

TEST_CASE("pack and unpack are inverse") {
  const Mesh mesh = build_mesh(3.0, 7);
  DiscreteProblemLayout layout(7);
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(layout.n_vars());
  for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
  CHECK(pack(unpack(v, layout, mesh), layout) == v);
}

TEST_CASE("initial rows pin the starting states") {
  const Scenario s;
  const Mesh mesh = build_mesh(10.5, 11);
  DiscreteProblemLayout layout(11);
  const socp::SocpProblem p = assemble_socp(s, initial_reference(s, mesh), layout);
  std::map<int, double> pinned;
  for (std::size_t r = 0; r < layout.equality_tags.size(); ++r) {
    const RowTag& tag = layout.equality_tags[r];
    if (tag.kind == RowTag::Kind::kInitial && tag.sat == Sat::II) pinned[tag.component] = p.equalities.rhs[r];
  }
  // The plane is pinned through bounds; the in-plane rows carry the values.
  CHECK(pinned.size() == 5);
  CHECK(pinned[kR] == 1.0);
  CHECK(pinned[kTheta] == 0.0);
  CHECK(pinned[kVr] == 0.0);
  CHECK(pinned[kVt] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pinned[kZ] == 0.0);
  int plane_pins = 0;
  for (const auto& b : p.bounds) {
    if (b.lower == 0.0 && b.upper == 0.0 && (b.var == layout.state_col(Sat::II, 0, kPhi) ||
                                             b.var == layout.state_col(Sat::II, 0, kVn))) {
      ++plane_pins;
    }
  }
  CHECK(plane_pins == 2);
}

TEST_CASE("defect rows at the reference equal the trapezoid residual") {
  Scenario s;
  s.inc = {0.05, 0.1};
  const Mesh mesh = build_mesh(5.0, 21);
  const TrajectoryPair ref = perturbed(initial_reference(s, mesh), 3, 0.01);
  DiscreteProblemLayout layout(21);
  const socp::SocpProblem p = assemble_socp(s, ref, layout);
  const Eigen::VectorXd res = row_residuals(p.equalities, pack(ref, layout));
  int checked = 0;
  for (std::size_t r = 0; r < layout.equality_tags.size(); ++r) {
    const RowTag& tag = layout.equality_tags[r];
    if (tag.kind != RowTag::Kind::kDefect) continue;
    const int j = tag.node;
    const StateTraj& x = ref.states(tag.sat);
    const ControlTraj& u = ref.controls(tag.sat);
    const StateVec d = trapezoid_defect(x.col(j), x.col(j + 1), affine_rhs(StateVec(x.col(j)), ControlVec(u.col(j)), s),
                                        affine_rhs(StateVec(x.col(j + 1)), ControlVec(u.col(j + 1)), s), mesh.h(j));
    CHECK(std::abs(res[r] - d[tag.component]) < 1e-13);
    ++checked;
  }
  CHECK(checked == 2 * 20 * kNx);
}

TEST_CASE("thrust cap rows evaluate the linearized bound") {
  const Scenario s;
  const Mesh mesh = build_mesh(2.0, 5);
  TrajectoryPair ref = initial_reference(s, mesh);
  ref.states(Sat::I).row(kZ).setConstant(-0.1);
  DiscreteProblemLayout layout(5);
  const socp::SocpProblem p = assemble_socp(s, ref, layout);
  REQUIRE(p.inequalities.rows() == 10);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.n_vars());
  x[layout.state_col(Sat::I, 2, kZ)] = -0.1;
  x[layout.control_col(Sat::I, 2, kUN)] = 0.1 * std::exp(0.1);
  const Eigen::VectorXd r = row_residuals(p.inequalities, x);
  for (std::size_t i = 0; i < layout.inequality_tags.size(); ++i) {
    if (layout.inequality_tags[i].sat == Sat::I && layout.inequality_tags[i].node == 2) {
      CHECK(std::abs(r[i]) < 1e-15);
    }
  }
}

TEST_CASE("rendezvous in place: zero controls, both masses kept") {
  const Scenario s = degenerate_scenario();
  const Mesh mesh = build_mesh(s.tf, 41);
  DiscreteProblemLayout layout(41);
  const TrajectoryPair ref = initial_reference(s, mesh);
  const socp::SocpProblem p = assemble_socp(s, ref, layout);
  const socp::SocpSolution sol = socp::solve(p);
  REQUIRE(sol.status == socp::Status::kOptimal);
  const TrajectoryPair out = extract_solution(sol, layout, mesh);
  for (Sat sat : kBothSats) CHECK(out.controls(sat).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(linearized_final_mass(out, ref) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(out.states(Sat::I)(kZ, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("extract_solution rejects unusable statuses") {
  socp::SocpSolution sol;
  sol.status = socp::Status::kInfeasible;
  DiscreteProblemLayout layout(3);
  CHECK_THROWS_AS(extract_solution(sol, layout, build_mesh(1.0, 3)), UnavailableSolution);
}

TEST_CASE("mismatched reference is rejected") {
  const Scenario s;
  DiscreteProblemLayout layout(11);
  CHECK_THROWS_AS(assemble_socp(s, initial_reference(s, build_mesh(1.0, 7)), layout), std::invalid_argument);
}

TEST_CASE("transfer-only problem drops the phase rendezvous row") {
  const Scenario s;
  const Mesh mesh = build_mesh(10.5, 11);
  DiscreteProblemLayout layout(11);
  TranscriptionOptions opts;
  const auto count_theta = [&] {
    int n = 0;
    for (const auto& t : layout.equality_tags) n += t.kind == RowTag::Kind::kRendezvous && t.component == kTheta;
    return n;
  };
  assemble_socp(s, initial_reference(s, mesh), layout, opts);
  CHECK(count_theta() == 1);
  opts.rendezvous_theta = false;
  assemble_socp(s, initial_reference(s, mesh), layout, opts);
  CHECK(count_theta() == 0);
}
