#include "drohs/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drohs {

namespace {

double inner(const Mat& a, const Mat& b) {
  return (a.array() * b.array()).sum();
}

Mat symmetrized(const Mat& m) { return (m + m.transpose()) / 2.0; }

// Largest step to the psd boundary of X + alpha dX, expressed in the scaled
// frame where X itself is diag(sigma).
double psd_boundary(const Vec& sigma, const Mat& dXhat) {
  if (sigma.size() == 0) return std::numeric_limits<double>::infinity();
  Vec isq = sigma.cwiseSqrt().cwiseInverse();
  Mat Y = symmetrized(isq.asDiagonal() * dXhat * isq.asDiagonal());
  double lmin = Eigen::SelfAdjointEigenSolver<Mat>(Y, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double lp_boundary(const Vec& v, const Vec& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

struct Direction {
  Vec dy;
  Mat dZ, dS, dZhat, dShat;
  Vec ds, dt;
};

}  // namespace

const char* sdp_status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIter: return "max-iter";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const int n = prob.n;
  const int p = static_cast<int>(prob.eq_mats.size());
  const int q = static_cast<int>(prob.ineq_mats.size());
  const int nc = p + q;
  if (n <= 0 || prob.C.rows() != n || prob.C.cols() != n)
    throw std::invalid_argument("solve_sdp: objective matrix has wrong shape");
  if (nc == 0) throw std::invalid_argument("solve_sdp: no constraints");
  if (prob.eq_rhs.size() != p || prob.ineq_rhs.size() != q)
    throw std::invalid_argument("solve_sdp: rhs length mismatch");

  // Normalize the objective by its norm and each constraint row by its
  // matrix norm. This keeps the Schur complement well scaled; multipliers
  // are mapped back to the caller's scaling on return.
  const Mat C0 = symmetrized(prob.C);
  const double cscale = std::max(1.0, C0.norm());
  const Mat C = C0 / cscale;
  std::vector<Mat> E(nc);
  Vec rhs(nc), escale(nc);
  for (int a = 0; a < nc; ++a) {
    const Mat& src = a < p ? prob.eq_mats[a] : prob.ineq_mats[a - p];
    if (src.rows() != n || src.cols() != n)
      throw std::invalid_argument("solve_sdp: constraint matrix has wrong shape");
    escale[a] = std::max(1e-12, src.norm());
    E[a] = symmetrized(src) / escale[a];
    rhs[a] = (a < p ? prob.eq_rhs[a] : prob.ineq_rhs[a - p]) / escale[a];
  }

  const double xi = std::max(10.0, rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0);
  Mat Z = xi * Mat::Identity(n, n);
  Mat S = Z;
  Vec s = Vec::Constant(q, xi), t = Vec::Constant(q, xi);
  Vec y = Vec::Zero(nc);

  SdpStatus status = SdpStatus::MaxIter;
  double relgap = std::numeric_limits<double>::infinity();
  double worst_feas = relgap;
  double alpha_p_prev = 1.0;
  int iters = 0;

  for (int k = 0; k < opts.max_iter; ++k) {
    if (!Z.allFinite() || !S.allFinite() || !y.allFinite()) {
      status = SdpStatus::NumericalFailure;
      break;
    }

    Vec rp(nc);
    for (int a = 0; a < nc; ++a)
      rp[a] = rhs[a] - inner(E[a], Z) - (a >= p ? s[a - p] : 0.0);
    Mat Ay = Mat::Zero(n, n);
    for (int a = 0; a < nc; ++a) Ay += y[a] * E[a];
    const Mat Rd = C - S - Ay;
    Vec rd(q);
    for (int l = 0; l < q; ++l) rd[l] = -y[p + l] - t[l];

    const double zs = inner(Z, S) + s.dot(t);
    const double mu = zs / (n + q);
    const double pobj = inner(C, Z);
    const double dobj = rhs.dot(y);
    relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pfeas = rp.norm() / (1.0 + rhs.norm());
    const double dfeas = (Rd.norm() + rd.norm()) / (1.0 + C.norm());
    worst_feas = std::max(pfeas, dfeas);

#ifndef NDEBUG
    // cone inner products of interior iterates; going negative means the
    // iterate left the cone, which the step rule is supposed to prevent
    assert(zs > -1e-9 * (1.0 + std::abs(pobj)));
    if (pfeas <= 1e-6 && dfeas <= 1e-6)
      assert(pobj >= dobj - 1e-6 * (1.0 + std::abs(pobj) + std::abs(dobj)));
#endif

    if (relgap <= opts.tol_gap && pfeas <= opts.tol_feas &&
        dfeas <= opts.tol_feas) {
      status = SdpStatus::Optimal;
      break;
    }
    // a diverging dual with no primal progress certifies infeasibility
    if (dobj > 1e12 && (pfeas > 100.0 * opts.tol_feas || alpha_p_prev < 1e-3)) {
      status = SdpStatus::Infeasible;
      break;
    }

    Eigen::LLT<Mat> lltZ(Z), lltS(S);
    if (lltZ.info() != Eigen::Success || lltS.info() != Eigen::Success) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    const Mat L1 = lltZ.matrixL();
    const Mat L2 = lltS.matrixL();
    Eigen::JacobiSVD<Mat> svd(L2.transpose() * L1,
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec sigma = svd.singularValues();
    if (!sigma.allFinite() || sigma.minCoeff() <= 0.0) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    const Vec rsig = sigma.cwiseSqrt().cwiseInverse();
    const Mat R = L1 * svd.matrixV() * rsig.asDiagonal();

    std::vector<Mat> Ehat(nc);
    for (int a = 0; a < nc; ++a)
      Ehat[a] = symmetrized(R.transpose() * E[a] * R);
    const Mat Rdhat = symmetrized(R.transpose() * Rd * R);

    Mat M(nc, nc);
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b <= a; ++b) M(a, b) = M(b, a) = inner(Ehat[a], Ehat[b]);
    for (int l = 0; l < q; ++l) M(p + l, p + l) += s[l] / t[l];

    Eigen::LLT<Mat> lltM;
    double reg = 1e-11 * std::max(1.0, M.diagonal().maxCoeff());
    bool factored = false;
    for (int tries = 0; tries < 3 && !factored; ++tries) {
      Mat Mreg = M;
      Mreg.diagonal().array() += reg;
      lltM.compute(Mreg);
      factored = lltM.info() == Eigen::Success;
      reg *= 1e4;
    }
    if (!factored) {
      status = SdpStatus::NumericalFailure;
      break;
    }

    auto direction = [&](const Mat& G, const Vec& rc) {
      Direction d;
      Vec ry(nc);
      for (int a = 0; a < nc; ++a) ry[a] = rp[a] - inner(Ehat[a], G - Rdhat);
      for (int l = 0; l < q; ++l)
        ry[p + l] -= (rc[l] - s[l] * rd[l]) / t[l];
      d.dy = lltM.solve(ry);
      d.dS = Rd;
      for (int a = 0; a < nc; ++a) d.dS -= d.dy[a] * E[a];
      d.dShat = symmetrized(R.transpose() * d.dS * R);
      d.dZhat = G - d.dShat;
      d.dZ = symmetrized(R * d.dZhat * R.transpose());
      d.dt.resize(q);
      d.ds.resize(q);
      for (int l = 0; l < q; ++l) {
        d.dt[l] = rd[l] - d.dy[p + l];
        d.ds[l] = (rc[l] - s[l] * d.dt[l]) / t[l];
      }
      return d;
    };
    auto steps = [&](const Direction& d) {
      double ap = std::min(psd_boundary(sigma, d.dZhat), lp_boundary(s, d.ds));
      double ad = std::min(psd_boundary(sigma, d.dShat), lp_boundary(t, d.dt));
      return std::pair<double, double>{std::min(1.0, 0.99 * ap),
                                       std::min(1.0, 0.99 * ad)};
    };

    // predictor: drive complementarity to zero
    const Mat Gaff = (-sigma.array()).matrix().asDiagonal();
    const Vec rc_aff = -(s.array() * t.array()).matrix();
    const Direction aff = direction(Gaff, rc_aff);
    auto [ap_aff, ad_aff] = steps(aff);
    double mu_aff = (inner(Z + ap_aff * aff.dZ, S + ad_aff * aff.dS) +
                     (s + ap_aff * aff.ds).dot(t + ad_aff * aff.dt)) /
                    (n + q);
    mu_aff = std::max(0.0, mu_aff);
    const double sig =
        std::pow(std::min(1.0, std::max(0.0, mu_aff / mu)), 3.0);

    // corrector: recentre and absorb the second-order cross terms
    const Mat cross = aff.dZhat * aff.dShat;
    Mat RHSc = sig * mu * Mat::Identity(n, n) - symmetrized(cross);
    RHSc.diagonal() -= sigma.cwiseAbs2();
    Mat G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        G(i, j) = 2.0 * RHSc(i, j) / (sigma[i] + sigma[j]);
    Vec rc(q);
    for (int l = 0; l < q; ++l)
      rc[l] = sig * mu - s[l] * t[l] - aff.ds[l] * aff.dt[l];

    const Direction dir = direction(G, rc);
    auto [ap, ad] = steps(dir);
    Z = symmetrized(Z + ap * dir.dZ);
    s += ap * dir.ds;
    y += ad * dir.dy;
    S = symmetrized(S + ad * dir.dS);
    t += ad * dir.dt;
    alpha_p_prev = ap;
    iters = k + 1;
  }

  SdpSolution out;
  out.Z = Z;
  out.eq_duals = (y.head(p).array() * cscale / escale.head(p).array()).matrix();
  out.ineq_duals =
      (y.tail(q).array() * cscale / escale.tail(q).array()).matrix();
  out.status = status;
  out.objective = inner(C0, Z);
  out.gap = relgap;
  out.feas = worst_feas;
  out.iterations = iters;
  return out;
}

LeadingDecomp leading_decomposition(const Mat& Z) {
  const Mat Zs = symmetrized(Z);
  Eigen::SelfAdjointEigenSolver<Mat> es(Zs);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("leading_decomposition: eigensolver failed");
  const int n = static_cast<int>(Zs.rows());
  LeadingDecomp out;
  out.evals.resize(n);
  out.evecs.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.evals[k] = es.eigenvalues()[n - 1 - k];
    Vec v = es.eigenvectors().col(n - 1 - k);
    int best = 0;
    double mx = std::abs(v[0]);
    for (int i = 1; i < n; ++i)
      if (std::abs(v[i]) > mx) {
        mx = std::abs(v[i]);
        best = i;
      }
    if (v[best] < 0.0) v = -v;
    out.evecs.col(k) = v;
  }
  return out;
}

}  // namespace drohs
