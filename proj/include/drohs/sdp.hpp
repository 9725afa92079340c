#pragma once

#include <Eigen/Dense>
#include <vector>

namespace drohs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// min tr(C Z)  s.t.  tr(A_i Z) = b_i,  tr(B_l Z) <= c_l,  Z >= 0 (psd).
// All matrices are dense symmetric n x n; callers symmetrize before handing
// them over. The nodal problems stay small (n below ~90) so dense is right.
struct SdpProblem {
  int n = 0;
  Mat C;
  std::vector<Mat> eq_mats;
  Vec eq_rhs;
  std::vector<Mat> ineq_mats;
  Vec ineq_rhs;
};

struct SdpOptions {
  double tol_gap = 1e-8;   // relative duality gap
  double tol_feas = 1e-8;  // relative primal/dual residuals
  int max_iter = 100;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

const char* sdp_status_name(SdpStatus s);

// Multiplier convention: the Lagrangian is
//   tr(C Z) - sum_i y_i (tr(A_i Z) - b_i) - sum_l w_l (tr(B_l Z) - c_l)
// so eq_duals is free and ineq_duals is nonpositive at optimality. The dual
// objective is eq_rhs . eq_duals + ineq_rhs . ineq_duals.
struct SdpSolution {
  Mat Z;
  Vec eq_duals;
  Vec ineq_duals;
  SdpStatus status = SdpStatus::NumericalFailure;
  double objective = 0.0;  // tr(C Z) in the caller's scaling
  double gap = 0.0;        // relative duality gap at exit
  double feas = 0.0;       // worst relative residual at exit
  int iterations = 0;
};

// Nesterov-Todd scaled Mehrotra predictor-corrector. Deterministic: dense
// factorizations only, no randomized or threaded kernels.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

// Full spectrum of a symmetric matrix, eigenvalues descending. Each
// eigenvector is sign-fixed the way the tensor module fixes its columns:
// largest-magnitude entry positive, first such index wins.
struct LeadingDecomp {
  Vec evals;
  Mat evecs;  // column k pairs with evals[k]
};

LeadingDecomp leading_decomposition(const Mat& Z);

}  // namespace drohs
