// Homogeneous self-dual embedding interior point for
//
//   min c'x  s.t.  A x = b,  G x + s = h,  s in R+^l x Q^q1 x ... x Q^qN
//
// with Nesterov-Todd scaling and Mehrotra predictor-corrector directions.
// The KKT system
//
//   [ dI   A'    G'     ]
//   [ A   -dI    0      ]
//   [ G    0   -W'W - dI]
//
// is quasi-definite and factored by a sparse LDL' with a fixed AMD ordering;
// iterative refinement runs against the unregularized matrix. Cone blocks of
// W'W are stored dense, which suits the many small cones of trajectory
// problems.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "socp_internal.hpp"

namespace rdv::socp {
namespace {

using Vec = Eigen::VectorXd;

constexpr double kStaticReg = 7e-8;
constexpr double kGamma = 0.99;
constexpr double kStepMin = 1e-6;
constexpr double kStepMax = 0.999;
constexpr double kSigmaMin = 1e-4;
constexpr double kSigmaMax = 1.0;
constexpr int kMaxRefine = 9;
constexpr double kLinSysAcc = 1e-14;
constexpr double kIrErrFact = 6.0;
constexpr double kSafeguard = 500.0;
constexpr double kFeasTolInacc = 1e-4;
constexpr double kGapTolInacc = 5e-5;

struct SocScaling {
  double eta = 1.0;
  double a = 1.0;
  Vec q;
};

struct Iterate {
  Vec x, y, z, s, lambda;
  double tau = 1.0;
  double kap = 1.0;
};

struct Stats {
  int iter = 0;
  double gap = 0.0;  // s'z / tau^2
  double mu = 0.0;
  double pcost = 0.0;
  double dcost = 0.0;
  double relgap = kInf;
  double pres = kInf;
  double dres = kInf;
  std::optional<double> pinfres;
  std::optional<double> dinfres;
  double kapovert = 0.0;
  double step = 0.0;
  double step_aff = 0.0;
  double sigma = 0.0;
  double cx = 0.0;
  double by = 0.0;
  double hz = 0.0;

  double merit() const { return std::max({pres, dres, std::min(gap, relgap)}); }
};

enum class Exit { kContinue, kOptimal, kPrimalInfeasible, kDualInfeasible };

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverSettings& settings)
      : sf_(sf), settings_(settings) {
    n_ = sf.n;
    p_ = static_cast<int>(sf.b.size());
    m_ = static_cast<int>(sf.h.size());
    n_lp_ = sf.n_lp;
    At_ = sf.A.transpose();
    Gt_ = sf.G.transpose();
    int start = n_lp_;
    for (int d : sf.soc_dims) {
      soc_start_.push_back(start);
      start += d;
      SocScaling sc;
      sc.q = Vec::Zero(d - 1);
      soc_.push_back(sc);
    }
    lp_v_ = Vec::Ones(n_lp_);
    lp_w_ = Vec::Ones(n_lp_);
    degree_ = n_lp_ + static_cast<int>(sf.soc_dims.size()) + 1;
  }

  SocpSolution run();

 private:
  // --- cone algebra -------------------------------------------------------
  bool update_scalings(const Vec& s, const Vec& z, Vec& lambda);
  void scale(const Vec& v, Vec& out) const;          // out = W v
  void apply_v(const Vec& v, Vec& out, bool identity) const;  // out = W'W v
  double conic_product(const Vec& u, const Vec& v, Vec& w) const;
  void conic_division(const Vec& u, const Vec& w, Vec& v) const;
  void bring_to_cone(const Vec& r, Vec& s) const;
  double line_search(const Vec& lambda, const Vec& ds, const Vec& dz, double tau, double dtau,
                     double kap, double dkap) const;

  // --- linear algebra -----------------------------------------------------
  void build_kkt();
  void set_kkt_scalings(bool identity);
  bool factor();
  int solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz, bool identity);

  // --- bookkeeping --------------------------------------------------------
  void compute_residuals();
  void update_stats();
  Exit check_exit(bool reduced) const;

  const StandardForm& sf_;
  SolverSettings settings_;
  int n_ = 0, p_ = 0, m_ = 0, n_lp_ = 0, degree_ = 1;
  Eigen::SparseMatrix<double> At_, Gt_;
  std::vector<int> soc_start_;
  std::vector<SocScaling> soc_;
  Vec lp_v_, lp_w_;

  Eigen::SparseMatrix<double> kkt_;
  std::vector<double*> lp_diag_;
  std::vector<std::vector<double*>> soc_block_;  // lower triangle, row-major
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;

  Iterate w_;
  Stats st_;
  Vec rx_, ry_, rz_;
  double rt_ = 0.0;
  double hresx_ = 0.0, hresy_ = 0.0, hresz_ = 0.0;
  double nx_ = 0.0, ny_ = 0.0, nz_ = 0.0, ns_ = 0.0;
  double resx0_ = 1.0, resy0_ = 1.0, resz0_ = 1.0;
};

bool InteriorPoint::update_scalings(const Vec& s, const Vec& z, Vec& lambda) {
  for (int i = 0; i < n_lp_; ++i) {
    if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
    lp_v_[i] = s[i] / z[i];
    lp_w_[i] = std::sqrt(lp_v_[i]);
  }
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const double sres = s[st] * s[st] - s.segment(st + 1, d - 1).squaredNorm();
    const double zres = z[st] * z[st] - z.segment(st + 1, d - 1).squaredNorm();
    if (!(sres > 0.0) || !(zres > 0.0)) return false;
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    const Vec sbar = s.segment(st, d) / snorm;
    const Vec zbar = z.segment(st, d) / znorm;
    SocScaling& sc = soc_[k];
    sc.eta = std::sqrt(snorm / znorm);
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    sc.a = 0.5 / gamma * (sbar[0] + zbar[0]);
    sc.q = 0.5 / gamma * (sbar.tail(d - 1) - zbar.tail(d - 1));
  }
  scale(z, lambda);
  return true;
}

void InteriorPoint::scale(const Vec& v, Vec& out) const {
  out.resize(m_);
  out.head(n_lp_) = lp_w_.cwiseProduct(v.head(n_lp_));
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const SocScaling& sc = soc_[k];
    const double zeta = sc.q.dot(v.segment(st + 1, d - 1));
    const double factor = v[st] + zeta / (1.0 + sc.a);
    out[st] = sc.eta * (sc.a * v[st] + zeta);
    out.segment(st + 1, d - 1) = sc.eta * (v.segment(st + 1, d - 1) + factor * sc.q);
  }
}

void InteriorPoint::apply_v(const Vec& v, Vec& out, bool identity) const {
  if (identity) {
    out = v;
    return;
  }
  out.resize(m_);
  out.head(n_lp_) = lp_v_.cwiseProduct(v.head(n_lp_));
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const SocScaling& sc = soc_[k];
    // W'W = eta^2 (2 w w' - J), w = (a, q)
    const double wv = sc.a * v[st] + sc.q.dot(v.segment(st + 1, d - 1));
    const double e2 = sc.eta * sc.eta;
    out[st] = e2 * (2.0 * sc.a * wv - v[st]);
    out.segment(st + 1, d - 1) = e2 * (2.0 * wv * sc.q + v.segment(st + 1, d - 1));
  }
}

double InteriorPoint::conic_product(const Vec& u, const Vec& v, Vec& w) const {
  w.resize(m_);
  w.head(n_lp_) = u.head(n_lp_).cwiseProduct(v.head(n_lp_));
  double mu = w.head(n_lp_).lpNorm<1>();
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    w[st] = u.segment(st, d).dot(v.segment(st, d));
    mu += std::abs(w[st]);
    w.segment(st + 1, d - 1) = u[st] * v.segment(st + 1, d - 1) + v[st] * u.segment(st + 1, d - 1);
  }
  return mu;
}

void InteriorPoint::conic_division(const Vec& u, const Vec& w, Vec& v) const {
  v.resize(m_);
  v.head(n_lp_) = w.head(n_lp_).cwiseQuotient(u.head(n_lp_));
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const double u0 = u[st];
    const double w0 = w[st];
    const double rho = u0 * u0 - u.segment(st + 1, d - 1).squaredNorm();
    const double zeta = u.segment(st + 1, d - 1).dot(w.segment(st + 1, d - 1));
    const double factor = (zeta / u0 - w0) / rho;
    v[st] = (u0 * w0 - zeta) / rho;
    v.segment(st + 1, d - 1) = factor * u.segment(st + 1, d - 1) + w.segment(st + 1, d - 1) / u0;
  }
}

void InteriorPoint::bring_to_cone(const Vec& r, Vec& s) const {
  double alpha = -kGamma;
  for (int i = 0; i < n_lp_; ++i) {
    if (r[i] <= 0.0 && -r[i] > alpha) alpha = -r[i];
  }
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const double cres = r[st] - r.segment(st + 1, d - 1).norm();
    if (cres <= 0.0 && -cres > alpha) alpha = -cres;
  }
  alpha += 1.0;
  s = r;
  s.head(n_lp_).array() += alpha;
  for (int st : soc_start_) s[st] += alpha;
}

double InteriorPoint::line_search(const Vec& lambda, const Vec& ds, const Vec& dz, double tau,
                                  double dtau, double kap, double dkap) const {
  double alpha = 10.0;
  if (n_lp_ > 0) {
    const double rhomin = ds.head(n_lp_).cwiseQuotient(lambda.head(n_lp_)).minCoeff();
    const double sigmamin = dz.head(n_lp_).cwiseQuotient(lambda.head(n_lp_)).minCoeff();
    const double worst = std::min(rhomin, sigmamin);
    alpha = worst < 0.0 ? 1.0 / (-worst) : 1.0 / 1e-13;
  }
  const double tau_lim = -tau / dtau;
  const double kap_lim = -kap / dkap;
  if (tau_lim > 0.0 && tau_lim < alpha) alpha = tau_lim;
  if (kap_lim > 0.0 && kap_lim < alpha) alpha = kap_lim;

  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = soc_start_[k];
    const int d = sf_.soc_dims[k];
    const double lk2 = lambda[st] * lambda[st] - lambda.segment(st + 1, d - 1).squaredNorm();
    if (lk2 <= 0.0) continue;
    const double lk = std::sqrt(lk2);
    const Vec lbar = lambda.segment(st, d) / lk;
    const double inv = 1.0 / lk;

    auto conic_step = [&](const Vec& dv) {
      const double lbar_dv = lbar[0] * dv[st] - lbar.tail(d - 1).dot(dv.segment(st + 1, d - 1));
      const double head = inv * lbar_dv;
      const double factor = (lbar_dv + dv[st]) / (lbar[0] + 1.0);
      const double tail_norm =
          (inv * (dv.segment(st + 1, d - 1) - factor * lbar.tail(d - 1))).norm();
      return tail_norm - head;
    };
    const double step = std::max({0.0, conic_step(ds), conic_step(dz)});
    if (step != 0.0) alpha = std::min(alpha, 1.0 / step);
  }
  return std::clamp(alpha, kStepMin, kStepMax);
}

void InteriorPoint::build_kkt() {
  const int dim = n_ + p_ + m_;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n_ + sf_.A.nonZeros() + p_ + sf_.G.nonZeros() + n_lp_) +
               soc_.size() * 16);
  for (int j = 0; j < n_; ++j) trip.emplace_back(j, j, kStaticReg);
  for (int j = 0; j < sf_.A.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.A, j); it; ++it) {
      trip.emplace_back(n_ + it.row(), j, it.value());
    }
  }
  for (int i = 0; i < p_; ++i) trip.emplace_back(n_ + i, n_ + i, -kStaticReg);
  for (int j = 0; j < sf_.G.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.G, j); it; ++it) {
      trip.emplace_back(n_ + p_ + it.row(), j, it.value());
    }
  }
  const int base = n_ + p_;
  for (int i = 0; i < n_lp_; ++i) trip.emplace_back(base + i, base + i, -1.0);
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = base + soc_start_[k];
    const int d = sf_.soc_dims[k];
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c <= r; ++c) trip.emplace_back(st + r, st + c, r == c ? -1.0 : 0.0);
    }
  }
  kkt_.resize(dim, dim);
  kkt_.setFromTriplets(trip.begin(), trip.end());
  kkt_.makeCompressed();

  lp_diag_.clear();
  for (int i = 0; i < n_lp_; ++i) lp_diag_.push_back(&kkt_.coeffRef(base + i, base + i));
  soc_block_.assign(soc_.size(), {});
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int st = base + soc_start_[k];
    const int d = sf_.soc_dims[k];
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c <= r; ++c) soc_block_[k].push_back(&kkt_.coeffRef(st + r, st + c));
    }
  }
  ldlt_.analyzePattern(kkt_);
}

void InteriorPoint::set_kkt_scalings(bool identity) {
  for (int i = 0; i < n_lp_; ++i) *lp_diag_[i] = -(identity ? 1.0 : lp_v_[i]) - kStaticReg;
  for (std::size_t k = 0; k < soc_.size(); ++k) {
    const int d = sf_.soc_dims[k];
    const SocScaling& sc = soc_[k];
    const double e2 = sc.eta * sc.eta;
    std::size_t ptr = 0;
    for (int r = 0; r < d; ++r) {
      const double wr = r == 0 ? sc.a : sc.q[r - 1];
      for (int c = 0; c <= r; ++c) {
        double v;
        if (identity) {
          v = r == c ? 1.0 : 0.0;
        } else {
          const double wc = c == 0 ? sc.a : sc.q[c - 1];
          v = e2 * (2.0 * wr * wc + (r == c ? (r == 0 ? -1.0 : 1.0) : 0.0));
        }
        *soc_block_[k][ptr++] = -v - (r == c ? kStaticReg : 0.0);
      }
    }
  }
}

bool InteriorPoint::factor() {
  ldlt_.factorize(kkt_);
  return ldlt_.info() == Eigen::Success;
}

int InteriorPoint::solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz, bool identity) {
  Vec sol = ldlt_.solve(rhs);
  const double threshold = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * kLinSysAcc;
  double prev_err = kInf;
  Vec correction;
  Vec vz;
  int k = 0;
  for (; k <= kMaxRefine; ++k) {
    const auto sx = sol.head(n_);
    const auto sy = sol.segment(n_, p_);
    const Vec sz = sol.tail(m_);
    Vec e(rhs.size());
    e.head(n_) = rhs.head(n_) - At_ * sy - Gt_ * sz;
    e.segment(n_, p_) = rhs.segment(n_, p_) - sf_.A * sx;
    apply_v(sz, vz, identity);
    e.tail(m_) = rhs.tail(m_) - sf_.G * sx + vz;
    const double err = e.lpNorm<Eigen::Infinity>();
    if (k > 0 && err > prev_err) {
      sol -= correction;
      --k;
      break;
    }
    if (k == kMaxRefine || err < threshold || (k > 0 && prev_err < kIrErrFact * err)) break;
    prev_err = err;
    correction = ldlt_.solve(e);
    sol += correction;
  }
  dx = sol.head(n_);
  dy = sol.segment(n_, p_);
  dz = sol.tail(m_);
  return k;
}

void InteriorPoint::compute_residuals() {
  rx_ = -(Gt_ * w_.z);
  if (p_ > 0) rx_ -= At_ * w_.y;
  hresx_ = rx_.norm();
  rx_ -= w_.tau * sf_.c;

  if (p_ > 0) {
    ry_ = sf_.A * w_.x;
    hresy_ = ry_.norm();
    ry_ -= w_.tau * sf_.b;
  } else {
    ry_.resize(0);
    hresy_ = 0.0;
  }

  rz_ = w_.s + sf_.G * w_.x;
  hresz_ = rz_.norm();
  rz_ -= w_.tau * sf_.h;

  st_.cx = sf_.c.dot(w_.x);
  st_.by = p_ > 0 ? sf_.b.dot(w_.y) : 0.0;
  st_.hz = sf_.h.dot(w_.z);
  rt_ = w_.kap + st_.cx + st_.by + st_.hz;

  nx_ = w_.x.norm();
  ny_ = w_.y.norm();
  nz_ = w_.z.norm();
  ns_ = w_.s.norm();
}

void InteriorPoint::update_stats() {
  const double sz = w_.s.dot(w_.z);
  st_.mu = (sz + w_.kap * w_.tau) / degree_;
  st_.gap = sz / (w_.tau * w_.tau);
  st_.kapovert = w_.kap / w_.tau;
  st_.pcost = st_.cx / w_.tau;
  st_.dcost = -(st_.hz + st_.by) / w_.tau;
  if (st_.pcost < 0.0) {
    st_.relgap = st_.gap / -st_.pcost;
  } else if (st_.dcost > 0.0) {
    st_.relgap = st_.gap / st_.dcost;
  } else {
    st_.relgap = kInf;
  }
  const double nry = p_ > 0 ? ry_.norm() / std::max(resy0_ + nx_, 1.0) : 0.0;
  const double nrz = m_ > 0 ? rz_.norm() / std::max(resz0_ + nx_ + ns_, 1.0) : 0.0;
  st_.pres = std::max(nry, nrz) / w_.tau;
  st_.dres = rx_.norm() / std::max(resx0_ + ny_ + nz_, 1.0) / w_.tau;

  st_.pinfres.reset();
  st_.dinfres.reset();
  if ((st_.hz + st_.by) / std::max(ny_ + nz_, 1.0) < -settings_.gap_tol) {
    st_.pinfres = hresx_ / std::max(ny_ + nz_, 1.0);
  }
  if (st_.cx / std::max(nx_, 1.0) < -settings_.gap_tol) {
    st_.dinfres = std::max(hresy_ / std::max(nx_, 1.0), hresz_ / std::max(nx_ + ns_, 1.0));
  }
  if (settings_.verbose) {
    std::fprintf(stderr, "%3d  %+.6e  %+.6e  %.1e  %.1e  %.1e  %.1e  %.4f\n", st_.iter,
                 st_.pcost, st_.dcost, st_.gap, st_.pres, st_.dres, st_.kapovert, st_.step);
  }
}

Exit InteriorPoint::check_exit(bool reduced) const {
  const double feastol = reduced ? kFeasTolInacc : settings_.feas_tol;
  const double gaptol = reduced ? kGapTolInacc : settings_.gap_tol;
  if ((-st_.cx > 0.0 || -st_.by - st_.hz >= -gaptol) && st_.pres < feastol &&
      st_.dres < feastol && (st_.gap < gaptol || st_.relgap < gaptol)) {
    return Exit::kOptimal;
  }
  if (st_.dinfres && *st_.dinfres < feastol && w_.tau < w_.kap) return Exit::kDualInfeasible;
  if (st_.pinfres && *st_.pinfres < feastol &&
      (w_.tau < w_.kap || (w_.tau < feastol && w_.kap < feastol))) {
    return Exit::kPrimalInfeasible;
  }
  return Exit::kContinue;
}

SocpSolution InteriorPoint::run() {
  SocpSolution out;
  build_kkt();

  resx0_ = std::max(1.0, sf_.c.norm());
  resy0_ = std::max(1.0, sf_.b.norm());
  resz0_ = std::max(1.0, sf_.h.norm());

  // Initial point from two least-squares style solves with W = I.
  set_kkt_scalings(true);
  if (!factor()) {
    out.status = Status::kNumericalFailure;
    return out;
  }
  const int dim = n_ + p_ + m_;
  Vec rhs1 = Vec::Zero(dim);
  rhs1.segment(n_, p_) = sf_.b;
  rhs1.tail(m_) = sf_.h;
  Vec rhs2 = Vec::Zero(dim);
  rhs2.head(n_) = -sf_.c;

  Vec dx1, dy1, dz1, dx2, dy2, dz2;
  solve_kkt(rhs1, dx1, dy1, dz1, true);
  w_.x = dx1;
  bring_to_cone(-dz1, w_.s);
  solve_kkt(rhs2, dx2, dy2, dz2, true);
  w_.y = dy2;
  bring_to_cone(dz2, w_.z);
  w_.tau = 1.0;
  w_.kap = 1.0;
  w_.lambda = Vec::Zero(m_);

  rhs1.head(n_) = -sf_.c;

  Iterate best = w_;
  Stats best_st;
  bool have_best = false;
  double pres_prev = kInf;
  Exit code = Exit::kContinue;
  bool reduced = false;
  bool failed = false;
  bool max_hit = false;

  auto restore_best = [&]() {
    if (have_best) {
      w_ = best;
      st_ = best_st;
    }
    code = check_exit(true);
    reduced = true;
  };

  Vec w_dz, ds_by_w, ds, ds1, ds2, vtmp;
  for (int it = 0; it <= settings_.max_iters; ++it) {
    st_.iter = it;
    compute_residuals();
    update_stats();
    out.trace.push_back({it, st_.pcost, st_.dcost, st_.gap, st_.pres, st_.dres, st_.step});

    if (it > 0 && (st_.pres > kSafeguard * pres_prev || st_.gap < 0.0)) {
      restore_best();
      if (code == Exit::kContinue) failed = true;
      break;
    }
    pres_prev = st_.pres;

    code = check_exit(false);
    if (code != Exit::kContinue) break;
    if (it > 0 && st_.step <= kStepMin * kGamma) {
      restore_best();
      if (code == Exit::kContinue) failed = true;
      break;
    }
    if (it == settings_.max_iters) {
      if (have_best && best_st.merit() < st_.merit()) {
        w_ = best;
        st_ = best_st;
      }
      code = check_exit(true);
      reduced = true;
      if (code == Exit::kContinue) max_hit = true;
      break;
    }
    if (!std::isfinite(st_.pcost)) {
      restore_best();
      if (code == Exit::kContinue) failed = true;
      break;
    }
    if (!have_best || st_.merit() < best_st.merit()) {
      best = w_;
      best_st = st_;
      have_best = true;
    }

    if (!update_scalings(w_.s, w_.z, w_.lambda)) {
      restore_best();
      if (code == Exit::kContinue) failed = true;
      break;
    }
    set_kkt_scalings(false);
    if (!factor()) {
      restore_best();
      if (code == Exit::kContinue) failed = true;
      break;
    }

    solve_kkt(rhs1, dx1, dy1, dz1, false);

    // Affine (predictor) direction.
    rhs2.head(n_) = rx_;
    rhs2.segment(n_, p_) = -ry_;
    rhs2.tail(m_) = w_.s - rz_;
    solve_kkt(rhs2, dx2, dy2, dz2, false);

    const double dtau_denom =
        w_.kap / w_.tau - sf_.c.dot(dx1) - sf_.b.dot(dy1) - sf_.h.dot(dz1);
    const double dtau_aff =
        (rt_ - w_.kap + sf_.c.dot(dx2) + sf_.b.dot(dy2) + sf_.h.dot(dz2)) / dtau_denom;
    dz2 += dtau_aff * dz1;
    scale(dz2, w_dz);
    ds_by_w = -w_dz - w_.lambda;
    const double dkap_aff = -w_.kap - w_.kap / w_.tau * dtau_aff;
    st_.step_aff = line_search(w_.lambda, ds_by_w, w_dz, w_.tau, dtau_aff, w_.kap, dkap_aff);
    st_.sigma = std::clamp(std::pow(1.0 - st_.step_aff, 3), kSigmaMin, kSigmaMax);
    const double sigma = st_.sigma;

    // Combined (corrector) direction.
    conic_product(w_.lambda, w_.lambda, ds1);
    conic_product(ds_by_w, w_dz, ds2);
    const double sigmamu = sigma * st_.mu;
    ds1 += ds2;
    ds1.head(n_lp_).array() -= sigmamu;
    for (int st : soc_start_) ds1[st] -= sigmamu;
    conic_division(w_.lambda, ds1, ds_by_w);
    scale(ds_by_w, vtmp);
    rhs2.head(n_ + p_) *= (1.0 - sigma);
    rhs2.tail(m_) = -(1.0 - sigma) * rz_ + vtmp;
    solve_kkt(rhs2, dx2, dy2, dz2, false);

    const double bkap = w_.kap * w_.tau + dkap_aff * dtau_aff - sigmamu;
    const double dtau = ((1.0 - sigma) * rt_ - bkap / w_.tau + sf_.c.dot(dx2) + sf_.b.dot(dy2) +
                         sf_.h.dot(dz2)) /
                        dtau_denom;
    dx2 += dtau * dx1;
    dy2 += dtau * dy1;
    dz2 += dtau * dz1;
    scale(dz2, w_dz);
    ds_by_w = -(ds_by_w + w_dz);
    const double dkap = -(bkap + w_.kap * dtau) / w_.tau;

    st_.step = kGamma * line_search(w_.lambda, ds_by_w, w_dz, w_.tau, dtau, w_.kap, dkap);
    scale(ds_by_w, ds);

    w_.x += st_.step * dx2;
    w_.y += st_.step * dy2;
    w_.z += st_.step * dz2;
    w_.s += st_.step * ds;
    w_.kap += st_.step * dkap;
    w_.tau += st_.step * dtau;
  }

  out.iterations = st_.iter;
  out.pres = st_.pres;
  out.dres = st_.dres;
  out.gap = st_.gap;
  switch (code) {
    case Exit::kOptimal:
      out.status = reduced ? Status::kNumericalFailure : Status::kOptimal;
      out.close_to_optimal = reduced;
      break;
    case Exit::kPrimalInfeasible:
      out.status = reduced ? Status::kNumericalFailure : Status::kInfeasible;
      break;
    case Exit::kDualInfeasible:
      out.status = reduced ? Status::kNumericalFailure : Status::kUnbounded;
      break;
    case Exit::kContinue:
      out.status = max_hit ? Status::kMaxIters : Status::kNumericalFailure;
      (void)failed;
      break;
  }

  // Normalize by tau for optimal-type exits; certificates keep raw scale.
  const bool certificate = code == Exit::kPrimalInfeasible || code == Exit::kDualInfeasible;
  const double inv_tau = certificate ? 1.0 : 1.0 / w_.tau;
  out.primal = w_.x * inv_tau;
  out.dual_eq = w_.y * inv_tau;
  // Stash the standard-form slack/dual; mapped back by the caller.
  out.dual_ineq = w_.z * inv_tau;
  out.dual_cones.assign(1, w_.s * inv_tau);
  return out;
}

}  // namespace

SocpSolution solve_standard_form(const StandardForm& sf, const SolverSettings& settings) {
  InteriorPoint ipm(sf, settings);
  return ipm.run();
}

}  // namespace rdv::socp
