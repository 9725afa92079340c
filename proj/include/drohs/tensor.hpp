#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "drohs/admittance.hpp"
#include "drohs/case.hpp"
#include "drohs/cost.hpp"

namespace drohs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One symmetric generator pair contributing u w^T + w u^T to a quantity
// matrix. Every physical quadratic form here is a sum of two of these.
struct GenPair {
  Vec u, w;
};

enum class QuantityKind { P_inj, Q_inj, P_flow, Q_flow, Vmag };

// Scaled eigenbasis of one quantity matrix M: cols carry sqrt|lambda| and
// signs the eigenvalue signs, so M = cols * diag(signs) * cols^T.
//
// Column convention, shared verbatim with tests/oracle/startensor.py:
//   * order by |lambda| descending; ties compare sign-fixed unit columns
//     lexicographically (first entry differing by > 1e-9, larger first)
//   * inside a repeated eigenvalue the basis is rebuilt by projecting
//     standard basis vectors (in index order) onto the eigenspace, so the
//     result never depends on how the eigensolver spans the group
//   * each unit column is sign-fixed: largest-magnitude entry positive,
//     first such index wins
struct QuantityDecomp {
  Mat cols;             // dim x r
  Vec signs;            // r entries of +-1
  double recon_rel = 0; // Frobenius reconstruction error relative to ||M||

  int rank() const { return static_cast<int>(cols.cols()); }
  // v^T M v evaluated through the decomposition
  double value(const Vec& v) const;
};

// Eigendecomposition of sum(u w^T + w u^T) without ever forming the dense
// matrix; errors if the numerical rank differs from expected_rank.
QuantityDecomp decompose_pairs(const std::vector<GenPair>& pairs,
                               int expected_rank);

// Same convention on an explicitly given symmetric matrix.
QuantityDecomp low_rank_decompose(const Mat& M, int expected_rank);

// Generator pairs of the named quantity; the dense builder and the model
// build both start from these.
std::vector<GenPair> quantity_pairs(const AdmittanceModel& adm,
                                    QuantityKind kind, int node, int line = -1);

// Dense 2Nb x 2Nb symmetric matrix whose quadratic form in v = (v_x; v_y)
// equals the named quantity. Test and diagnostic path; the model build never
// materializes these.
Mat symmetric_quadratic_matrix(const AdmittanceModel& adm, QuantityKind kind,
                               int node, int line = -1);

// 0/1 selector extracting a named sub-vector of mu: column c has its single
// 1 at row map[c].
struct Selector {
  int rows = 0;
  std::vector<int> map;

  int cols() const { return static_cast<int>(map.size()); }
  Mat dense() const;
};

// Selectors over the lifted coordinate vector mu_j, laid out as
//   [ x_j (8nl+10) | f_1..f_nl | fbar_1..fbar_nl | g_1..g_ng | gbar_1..gbar_ng | end ].
struct SelectorSet {
  Selector a_alpha_beta;              // own-bus power coordinates (8)
  std::vector<Selector> a_gamma_delta; // per line: its gamma then delta block
  Selector a_omega;                   // magnitude coordinates (2)
  std::vector<Selector> a_fl;         // per line: (f, fbar) slots
  std::vector<Selector> a_g;          // per generator: active output slot
  std::vector<Selector> a_gm;         // per generator: reactive output slot
  Selector a_j;                       // whole x_j prefix
};

// Sparse symmetric matrix in coordinate form (upper triangle); nodal
// constraint matrices are diagonal-plus-arrow so this stays tiny.
struct SymCoord {
  int dim = 0;
  std::vector<std::tuple<int, int, double>> entries;  // (i, j, v) with i <= j

  void add(int i, int j, double v);
  Mat dense() const;
  double quad(const Vec& mu) const;  // mu^T M mu
};

// Constraint quadratics of one node's lifted problem. Conventions:
//   * pi_s / pi_sbar: quad + demand = 0 is the power balance
//   * pi_f / pi_fbar: quad = 0 defines the line-flow slots
//   * pi_flowmax: quad <= rate^2 caps a line (only built when a cap exists;
//     the matrix is present regardless, the cap flag lives in the model)
//   * pi_g / pi_gm: quad <= 0 encodes the generator box
//   * pi_e: vmin^2 <= quad <= vmax^2
struct PiSet {
  SymCoord pi_s, pi_sbar;
  std::vector<SymCoord> pi_f, pi_fbar;
  std::vector<SymCoord> pi_flowmax;
  std::vector<SymCoord> pi_g, pi_gm;
  SymCoord pi_e;
};

// Everything one node contributes to the star: its quantity eigenbases, the
// stacked footprint Phi_L, selectors and constraint quadratics of the lifted
// coordinates, plus local cost data.
struct NodalBasis {
  int bus = 0;               // dense bus index
  int bus_id = 0;            // external id, for messages
  int nl = 0, ng = 0;
  int nx = 0;                // 8 nl + 10
  int mu_dim = 0;            // 10 nl + 2 ng + 11

  std::vector<std::pair<int, int>> lines;  // (branch index, 0 = from end)
  std::vector<int> gens;                   // generator indices at this bus

  QuantityDecomp inj_p, inj_q, mag;
  std::vector<QuantityDecomp> flow_p, flow_q;

  Mat phi_L;        // 2Nb x (8nl+8): [inj_p | inj_q | flow_p blocks | flow_q blocks]
  Mat phi_M;        // 2Nb x 2, unit columns e_j and e_{j+Nb}
  Vec signature_L;  // +-1 per phi_L column
  Mat power_rowspace;  // (8nl+8) x r orthonormal basis of phi_L's row space
  int rank = 0;        // r above

  std::vector<CostCoeff> gen_cost;  // aligned with gens
  SelectorSet selectors;
  PiSet pis;

  // x_j coordinate layout: (alpha, beta, gamma_1.., delta_1.., omega)
  int gamma_at(int i) const { return 8 + 4 * i; }
  int delta_at(int i) const { return 8 + 4 * nl + 4 * i; }
  int omega_at() const { return nx - 2; }
  // lifted slots past x_j
  int flow_slot(int i) const { return nx + i; }
  int flow_bar_slot(int i) const { return nx + nl + i; }
  int gen_p_slot(int t) const { return nx + 2 * nl + t; }
  int gen_q_slot(int t) const { return nx + 2 * nl + ng + t; }
  int end_slot() const { return mu_dim - 1; }
};

struct ModelConfig {
  double rho_power = 20.0;
  double rho_voltage = 200.0;
};

struct StarModel {
  NetworkCase net;
  AdmittanceModel adm;
  ModelConfig config;
  int nb = 0;
  std::vector<NodalBasis> nodes;
  Vec demand_p, demand_q;  // per bus, p.u.

  // Gram matrix of the voltage pool, sum_j rho_power Phi_L Phi_L^T, with its
  // factorization; the center solve reuses it every iteration.
  Mat center_gram;
  Eigen::LLT<Mat> center_llt;

  int n_var_max() const;  // largest mu_dim over nodes
};

StarModel build_star_model(const NetworkCase& c, const AdmittanceModel& adm,
                           const ModelConfig& cfg = {});

// x_j = [Phi_L^T v; v_j, v_{j+Nb}]
Vec project_to_nodal(const Vec& v, const NodalBasis& nd);

// Same pull from the stacked center state y = [v_L; v_M] (4Nb): power
// coordinates read the pooled voltage, magnitude coordinates the relay.
Vec pull_from_center(const Vec& y, const NodalBasis& nd);

struct NodeQuantities {
  double p = 0, q = 0, e = 0;
  std::vector<std::pair<double, double>> flows;  // (f, fbar) per local line
};
NodeQuantities evaluate_quantities(const Vec& x, const NodalBasis& nd);

// Penalty diagonal over x_j: rho_power on power coordinates, rho_voltage on
// the two magnitude coordinates.
Vec rho_vector(const NodalBasis& nd, double rho_p, double rho_v);

// Admissible dual start: power coordinates projected off phi_L's row space,
// magnitude coordinates zeroed. Keeps the aggregate dual identity exact.
Vec dual_init(const NodalBasis& nd, const Vec& raw);

}  // namespace drohs
