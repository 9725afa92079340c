#pragma once

#include "drohs/sdp.hpp"
#include "drohs/tensor.hpp"

namespace drohs {

enum class CaseTag { Exact, Projected, Rejected };

const char* case_tag_name(CaseTag t);

// Rank-one probe of a lifted solution, restricted to the x block plus the
// homogenizing coordinate. lam1/lam2 are the two largest eigenvalues of
//   [ sym(Zxx)  xcol ]
//   [ xcol^T      1  ]
// and eps is the state-aware acceptance radius
//   tau * (sqrt(||x||^2 + ||aug - xx^T||_F) - ||x||).
struct Candidate {
  double lam1 = 0.0;
  double lam2 = 0.0;
  double eps = 0.0;
  Vec zeta;             // defined only when end_ok
  bool end_ok = false;  // homogenizing entry of the top eigenvector > 0.1
};

Candidate candidate_and_epsilon(const Mat& Zxx, const Vec& xcol,
                                const Vec& x_k, double tau);

// Exact when the probe is rank one to machine precision, Projected when the
// second eigenvalue fits inside the acceptance radius, Rejected otherwise.
// Rejected hands back x_k itself, bit for bit.
struct Classified {
  Vec zeta_hat;
  CaseTag tag = CaseTag::Rejected;
};

Classified classify(const Candidate& cand, const Vec& x_k);

// x + delta (zeta_hat - x); with zeta_hat == x this returns x unchanged.
Vec blend(const Vec& x, const Vec& zeta_hat, double delta);

// Builds the lifted subproblem of one node over
//   mu = [ x | f_1..f_nl | fbar_1..fbar_nl | g_1..g_ng | gbar_1..gbar_ng | end ]:
// minimize generator cost plus the proximal row 0.5 rho x.x + (z - rho a).x,
// subject to the balance/flow/box/magnitude quadratics in trace form.
SdpProblem lift_to_sdp(const StarModel& model, int node, const Vec& y,
                       const Vec& z_j);
SdpProblem lift_to_sdp_anchored(const StarModel& model, int node,
                                const Vec& anchor, const Vec& z_j);

// Constant dropped by the lift: 0.5 a.(rho a) plus the fixed generator cost
// offsets. The node objective is h = sdp value + this. The cross term z.a is
// omitted on purpose; the dual-aggregate identity cancels it in the network
// sum, so H stays exact while per-node h is cheap to form.
double lift_constant(const StarModel& model, int node, const Vec& anchor);

struct NodeResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  double sdp_value = 0.0;
  double h = 0.0;
  Candidate cand;
  CaseTag tag = CaseTag::Rejected;
  Vec zeta_hat;
  double wall_ms = 0.0;
};

// One full nodal step: pull the anchor from the center state, lift, solve,
// probe, classify. Solver statuses Infeasible and NumericalFailure come back
// as Rejected with zeta_hat = anchor.
NodeResult solve_node(const StarModel& model, int node, const Vec& y,
                      const Vec& z_j, double tau, const SdpOptions& opts = {});

// Rank-one reading of a full lifted solution (all mu coordinates), used to
// audit accepted candidates against the original constraints.
struct RankOnePoint {
  Vec mu;
  bool ok = false;
};

RankOnePoint rank_one_point(const Mat& Z);

// Worst violation of the node's feasible set at the rank-one point mu:
// balance and flow-definition residuals, cap/box/magnitude overshoots and
// the drift of the homogenizing entry from 1.
double lifted_residual(const StarModel& model, int node, const Vec& mu);

}  // namespace drohs
