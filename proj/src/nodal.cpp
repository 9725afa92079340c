#include "drohs/nodal.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

namespace drohs {

const char* case_tag_name(CaseTag t) {
  switch (t) {
    case CaseTag::Exact: return "exact";
    case CaseTag::Projected: return "projected";
    case CaseTag::Rejected: return "rejected";
  }
  return "?";
}

Candidate candidate_and_epsilon(const Mat& Zxx, const Vec& xcol,
                                const Vec& x_k, double tau) {
  const int nx = static_cast<int>(x_k.size());
  if (Zxx.rows() != nx || Zxx.cols() != nx || xcol.size() != nx)
    throw ModelError("candidate probe: block dimensions disagree");
  Mat aug(nx + 1, nx + 1);
  aug.topLeftCorner(nx, nx) = (Zxx + Zxx.transpose()) / 2.0;
  aug.col(nx).head(nx) = xcol;
  aug.row(nx).head(nx) = xcol.transpose();
  aug(nx, nx) = 1.0;

  Eigen::SelfAdjointEigenSolver<Mat> es(aug);
  Candidate c;
  c.lam1 = es.eigenvalues()[nx];
  c.lam2 = es.eigenvalues()[nx - 1];

  Vec xt(nx + 1);
  xt.head(nx) = x_k;
  xt[nx] = 1.0;
  const double dz = (aug - xt * xt.transpose()).norm();
  const double nxk = x_k.norm();
  c.eps = tau * (std::sqrt(nxk * nxk + dz) - nxk);

  if (c.lam1 > 0.0) {
    const Vec zf = std::sqrt(c.lam1) * es.eigenvectors().col(nx);
    if (std::abs(zf[nx]) > 0.1) {
      c.end_ok = true;
      c.zeta = zf.head(nx) / zf[nx];
    }
  }
  return c;
}

Classified classify(const Candidate& cand, const Vec& x_k) {
  Classified out;
  const bool accepted = cand.lam1 > 0.0 &&
                        cand.lam2 <= 2.0 * cand.lam1 * cand.eps && cand.end_ok;
  if (!accepted) {
    out.zeta_hat = x_k;
    out.tag = CaseTag::Rejected;
    return out;
  }
  out.zeta_hat = cand.zeta;
  out.tag = cand.lam2 <= 1e-9 * cand.lam1 ? CaseTag::Exact : CaseTag::Projected;
  return out;
}

Vec blend(const Vec& x, const Vec& zeta_hat, double delta) {
  return x + delta * (zeta_hat - x);
}

SdpProblem lift_to_sdp_anchored(const StarModel& model, int node,
                                const Vec& anchor, const Vec& z_j) {
  const NodalBasis& nd = model.nodes.at(node);
  const int m = nd.mu_dim;
  const int nx = nd.nx;
  if (anchor.size() != nx || z_j.size() != nx)
    throw ModelError("lift: nodal state dimension mismatch");
  const Vec rho = rho_vector(nd, model.config.rho_power, model.config.rho_voltage);
  const int iend = nd.end_slot();
  const int j = nd.bus;

  SdpProblem p;
  p.n = m;
  Mat C = Mat::Zero(m, m);
  for (size_t t = 0; t < nd.gens.size(); ++t) {
    const int ig = nd.gen_p_slot(static_cast<int>(t));
    C(ig, ig) += nd.gen_cost[t].a;
    C(ig, iend) += nd.gen_cost[t].b;  // trace doubles the off-diagonal pair
    C(iend, ig) += nd.gen_cost[t].b;
  }
  for (int i = 0; i < nx; ++i) {
    C(i, i) += 0.5 * rho[i];
    const double clin = 0.5 * (z_j[i] - rho[i] * anchor[i]);
    C(i, iend) += clin;
    C(iend, i) += clin;
  }
  p.C = std::move(C);

  std::vector<Mat> eqs;
  std::vector<double> eqr;
  Mat one = Mat::Zero(m, m);
  one(iend, iend) = 1.0;
  eqs.push_back(std::move(one));
  eqr.push_back(1.0);
  eqs.push_back(nd.pis.pi_s.dense());
  eqr.push_back(-model.demand_p[j]);
  eqs.push_back(nd.pis.pi_sbar.dense());
  eqr.push_back(-model.demand_q[j]);
  for (int i = 0; i < nd.nl; ++i) {
    eqs.push_back(nd.pis.pi_f[i].dense());
    eqr.push_back(0.0);
    eqs.push_back(nd.pis.pi_fbar[i].dense());
    eqr.push_back(0.0);
  }

  std::vector<Mat> ins;
  std::vector<double> inr;
  for (int i = 0; i < nd.nl; ++i) {
    const int br = nd.lines[i].first;
    if (model.adm.flow_cap[br]) {
      const double cap = *model.adm.flow_cap[br];
      ins.push_back(nd.pis.pi_flowmax[i].dense());
      inr.push_back(cap * cap);
    }
  }
  for (size_t t = 0; t < nd.gens.size(); ++t) {
    ins.push_back(nd.pis.pi_g[t].dense());
    inr.push_back(0.0);
    ins.push_back(nd.pis.pi_gm[t].dense());
    inr.push_back(0.0);
  }
  const BusRecord& bus = model.net.buses[j];
  const Mat pe = nd.pis.pi_e.dense();
  ins.push_back(pe);
  inr.push_back(bus.vmax * bus.vmax);
  ins.push_back(-pe);
  inr.push_back(-bus.vmin * bus.vmin);

  p.eq_rhs = Eigen::Map<Vec>(eqr.data(), static_cast<Eigen::Index>(eqr.size()));
  p.ineq_rhs = Eigen::Map<Vec>(inr.data(), static_cast<Eigen::Index>(inr.size()));
  p.eq_mats = std::move(eqs);
  p.ineq_mats = std::move(ins);
  return p;
}

SdpProblem lift_to_sdp(const StarModel& model, int node, const Vec& y,
                       const Vec& z_j) {
  return lift_to_sdp_anchored(model, node,
                              pull_from_center(y, model.nodes.at(node)), z_j);
}

double lift_constant(const StarModel& model, int node, const Vec& anchor) {
  const NodalBasis& nd = model.nodes.at(node);
  const Vec rho = rho_vector(nd, model.config.rho_power, model.config.rho_voltage);
  double c = 0.5 * anchor.dot((rho.array() * anchor.array()).matrix());
  for (const CostCoeff& gc : nd.gen_cost) c += gc.c0;
  return c;
}

NodeResult solve_node(const StarModel& model, int node, const Vec& y,
                      const Vec& z_j, double tau, const SdpOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const NodalBasis& nd = model.nodes.at(node);
  const Vec anchor = pull_from_center(y, nd);

  NodeResult r;
  const SdpProblem prob = lift_to_sdp_anchored(model, node, anchor, z_j);
  const SdpSolution sol = solve_sdp(prob, opts);
  r.status = sol.status;
  r.sdp_value = sol.objective;
  r.h = sol.objective + lift_constant(model, node, anchor);

  if (sol.status == SdpStatus::Optimal || sol.status == SdpStatus::MaxIter) {
    const int nx = nd.nx;
    r.cand = candidate_and_epsilon(sol.Z.topLeftCorner(nx, nx),
                                   sol.Z.col(nd.end_slot()).head(nx), anchor,
                                   tau);
    Classified cl = classify(r.cand, anchor);
    r.zeta_hat = std::move(cl.zeta_hat);
    r.tag = cl.tag;
  } else {
    r.zeta_hat = anchor;
    r.tag = CaseTag::Rejected;
  }

  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

RankOnePoint rank_one_point(const Mat& Z) {
  RankOnePoint r;
  const LeadingDecomp d = leading_decomposition(Z);
  if (d.evals[0] <= 0.0) return r;
  const Vec zf = std::sqrt(d.evals[0]) * d.evecs.col(0);
  const Eigen::Index last = zf.size() - 1;
  if (std::abs(zf[last]) <= 0.1) return r;
  r.mu = zf / zf[last];
  r.ok = true;
  return r;
}

double lifted_residual(const StarModel& model, int node, const Vec& mu) {
  const NodalBasis& nd = model.nodes.at(node);
  if (mu.size() != nd.mu_dim)
    throw ModelError("lifted residual: mu dimension mismatch");
  const int j = nd.bus;
  double worst = std::abs(mu[nd.end_slot()] - 1.0);
  worst = std::max(worst, std::abs(nd.pis.pi_s.quad(mu) + model.demand_p[j]));
  worst = std::max(worst, std::abs(nd.pis.pi_sbar.quad(mu) + model.demand_q[j]));
  for (int i = 0; i < nd.nl; ++i) {
    worst = std::max(worst, std::abs(nd.pis.pi_f[i].quad(mu)));
    worst = std::max(worst, std::abs(nd.pis.pi_fbar[i].quad(mu)));
    const int br = nd.lines[i].first;
    if (model.adm.flow_cap[br]) {
      const double cap = *model.adm.flow_cap[br];
      worst = std::max(worst, nd.pis.pi_flowmax[i].quad(mu) - cap * cap);
    }
  }
  for (size_t t = 0; t < nd.gens.size(); ++t) {
    worst = std::max(worst, nd.pis.pi_g[t].quad(mu));
    worst = std::max(worst, nd.pis.pi_gm[t].quad(mu));
  }
  const BusRecord& bus = model.net.buses[j];
  const double e = nd.pis.pi_e.quad(mu);
  worst = std::max(worst, e - bus.vmax * bus.vmax);
  worst = std::max(worst, bus.vmin * bus.vmin - e);
  return worst;
}

}  // namespace drohs
