#include "drohs/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace drohs {
namespace {

// Column convention tolerances. tests/oracle/startensor.py carries the same
// three values; a change here without one there breaks every frozen fixture.
constexpr double kRankCut = 1e-9;
constexpr double kGroupTol = 1e-10;
constexpr double kLexTol = 1e-9;

// Gram-Schmidt with one reorthogonalization pass, dropping near-dependent
// vectors. Two passes keep the basis orthonormal to machine precision even
// when the span has sharp angles.
std::vector<Vec> orth(const std::vector<Vec>& vectors, double tol = 1e-12) {
  std::vector<Vec> basis;
  for (const Vec& s : vectors) {
    Vec t = s;
    const double ns = t.norm();
    for (const Vec& q : basis) t -= q.dot(t) * q;
    for (const Vec& q : basis) t -= q.dot(t) * q;
    const double n = t.norm();
    if (n > tol * std::max(1.0, ns)) basis.push_back(t / n);
  }
  return basis;
}

void sign_fix(Vec& col) {
  int k = 0;
  double best = std::abs(col[0]);
  for (int i = 1; i < col.size(); ++i) {
    const double a = std::abs(col[i]);
    if (a > best) {
      best = a;
      k = i;
    }
  }
  if (col[k] < 0) col = -col;
}

bool lex_before(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kLexTol) return a[i] > b[i];
  return false;
}

struct Entry {
  double lam;
  Vec col;  // ambient unit eigencolumn, sign-fixed
};

// Rebuilds each repeated-eigenvalue group from standard basis seeds so the
// columns do not depend on how the eigensolver happened to span the group.
// lam must already be sorted descending; V holds the matching eigenvectors in
// the coordinates of Qm's columns (Qm = identity for the dense path).
std::vector<Entry> canonical_entries(const Vec& lam, const Mat& V,
                                     const Mat& Qm, double lmax) {
  const int rank = static_cast<int>(lam.size());
  const int dim = static_cast<int>(Qm.rows());
  Vec rownorm(dim);
  for (int i = 0; i < dim; ++i) rownorm[i] = Qm.row(i).norm();

  std::vector<Entry> entries;
  entries.reserve(rank);
  int i = 0;
  while (i < rank) {
    int j = i + 1;
    while (j < rank && std::abs(lam[j] - lam[i]) <= kGroupTol * lmax) ++j;
    const int g = j - i;
    const Mat Vg = V.middleCols(i, g);
    const Mat P = Vg * Vg.transpose();

    std::vector<Vec> chosen;
    for (int idx = 0; idx < dim && static_cast<int>(chosen.size()) < g; ++idx) {
      if (rownorm[idx] <= 1e-13) continue;
      Vec t = P * Qm.row(idx).transpose();
      const double nt0 = t.norm();
      if (nt0 <= 1e-10) continue;
      for (const Vec& q : chosen) t -= q.dot(t) * q;
      for (const Vec& q : chosen) t -= q.dot(t) * q;
      const double n = t.norm();
      if (n > 1e-6 * nt0) chosen.push_back(t / n);
    }
    if (static_cast<int>(chosen.size()) != g)
      throw ModelError("eigenspace seed basis incomplete");
    for (const Vec& q : chosen) {
      Vec c = Qm * q;
      sign_fix(c);
      entries.push_back({lam[i], std::move(c)});
    }
    i = j;
  }
  return entries;
}

QuantityDecomp finish_decomp(std::vector<Entry> entries, double lmax, int dim) {
  std::stable_sort(entries.begin(), entries.end(),
                   [&](const Entry& a, const Entry& b) {
                     if (std::abs(std::abs(a.lam) - std::abs(b.lam)) >
                         kLexTol * std::max(lmax, 1.0))
                       return std::abs(a.lam) > std::abs(b.lam);
                     return lex_before(a.col, b.col);
                   });
  QuantityDecomp out;
  const int r = static_cast<int>(entries.size());
  out.cols = Mat(dim, r);
  out.signs = Vec(r);
  for (int k = 0; k < r; ++k) {
    out.cols.col(k) = entries[k].col * std::sqrt(std::abs(entries[k].lam));
    out.signs[k] = entries[k].lam > 0 ? 1.0 : -1.0;
  }
  return out;
}

Vec half_stack(const Vec& e, bool x_half) {
  const int nb = static_cast<int>(e.size());
  Vec v = Vec::Zero(2 * nb);
  v.segment(x_half ? 0 : nb, nb) = e;
  return v;
}

std::vector<GenPair> injection_like_pairs(int j, const Eigen::RowVectorXcd& row,
                                          bool reactive) {
  const int nb = static_cast<int>(row.size());
  Vec g = row.real().transpose();
  Vec b = row.imag().transpose();
  Vec e = Vec::Zero(nb);
  e[j] = 1.0;
  GenPair p1, p2;
  p1.u = half_stack(e, true);
  p2.u = half_stack(e, false);
  p1.w = Vec(2 * nb);
  p2.w = Vec(2 * nb);
  if (!reactive) {
    p1.w << g, -b;
    p2.w << b, g;
  } else {
    p1.w << -b, -g;
    p2.w << g, -b;
  }
  p1.w *= 0.5;
  p2.w *= 0.5;
  return {p1, p2};
}

std::vector<GenPair> magnitude_pairs(int j, int nb) {
  Vec e = Vec::Zero(nb);
  e[j] = 1.0;
  GenPair p1, p2;
  p1.u = half_stack(e, true);
  p1.w = p1.u / 2.0;
  p2.u = half_stack(e, false);
  p2.w = p2.u / 2.0;
  return {p1, p2};
}

}  // namespace

double QuantityDecomp::value(const Vec& v) const {
  const Vec a = cols.transpose() * v;
  return (signs.array() * a.array().square()).sum();
}

QuantityDecomp decompose_pairs(const std::vector<GenPair>& pairs,
                               int expected_rank) {
  std::vector<Vec> span;
  span.reserve(2 * pairs.size());
  for (const GenPair& p : pairs) {
    span.push_back(p.u);
    span.push_back(p.w);
  }
  const std::vector<Vec> Q = orth(span);
  const int dim = pairs.empty() ? 0 : static_cast<int>(pairs[0].u.size());
  if (Q.empty()) {
    if (expected_rank != 0)
      throw ModelError("zero matrix, nonzero expected rank");
    QuantityDecomp out;
    out.cols = Mat::Zero(dim, 0);
    out.signs = Vec::Zero(0);
    return out;
  }
  const int s = static_cast<int>(Q.size());
  Mat Qm(dim, s);
  for (int i = 0; i < s; ++i) Qm.col(i) = Q[i];

  Mat H = Mat::Zero(s, s);
  for (const GenPair& p : pairs) {
    const Vec a = Qm.transpose() * p.u;
    const Vec b = Qm.transpose() * p.w;
    H += a * b.transpose() + b * a.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw ModelError("eigensolver failed");
  const Vec lam_all = es.eigenvalues();
  const Mat V_all = es.eigenvectors();
  const double lmax = lam_all.cwiseAbs().maxCoeff();

  std::vector<int> kept;
  for (int i = 0; i < s; ++i)
    if (std::abs(lam_all[i]) > kRankCut * std::max(lmax, 1e-300))
      kept.push_back(i);
  if (static_cast<int>(kept.size()) != expected_rank)
    throw ModelError("rank " + std::to_string(kept.size()) + ", expected " +
                     std::to_string(expected_rank));
  std::stable_sort(kept.begin(), kept.end(),
                   [&](int a, int b) { return lam_all[a] > lam_all[b]; });
  Vec lam(kept.size());
  Mat V(s, kept.size());
  for (size_t k = 0; k < kept.size(); ++k) {
    lam[k] = lam_all[kept[k]];
    V.col(k) = V_all.col(kept[k]);
  }

  QuantityDecomp out =
      finish_decomp(canonical_entries(lam, V, Qm, lmax), lmax, dim);
  // Residual measured inside the span, where both M and its reconstruction
  // live: the subtraction happens entrywise on the small compression, so the
  // result is not drowned by cancellation between near-equal norms.
  const Mat C = Qm.transpose() * out.cols;
  const Mat Hr = C * out.signs.asDiagonal() * C.transpose();
  out.recon_rel = (Hr - H).norm() / H.norm();
  return out;
}

QuantityDecomp low_rank_decompose(const Mat& M, int expected_rank) {
  if (M.rows() != M.cols()) throw ModelError("matrix not square");
  const int dim = static_cast<int>(M.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) throw ModelError("eigensolver failed");
  const Vec lam_all = es.eigenvalues();
  const Mat V_all = es.eigenvectors();
  const double lmax = lam_all.cwiseAbs().maxCoeff();

  std::vector<int> kept;
  for (int i = 0; i < dim; ++i)
    if (std::abs(lam_all[i]) > kRankCut * std::max(lmax, 1e-300))
      kept.push_back(i);
  if (static_cast<int>(kept.size()) != expected_rank)
    throw ModelError("rank " + std::to_string(kept.size()) + ", expected " +
                     std::to_string(expected_rank));
  std::stable_sort(kept.begin(), kept.end(),
                   [&](int a, int b) { return lam_all[a] > lam_all[b]; });
  Vec lam(kept.size());
  Mat V(dim, kept.size());
  for (size_t k = 0; k < kept.size(); ++k) {
    lam[k] = lam_all[kept[k]];
    V.col(k) = V_all.col(kept[k]);
  }

  QuantityDecomp out = finish_decomp(
      canonical_entries(lam, V, Mat::Identity(dim, dim), lmax), lmax, dim);
  const Mat recon = out.cols * out.signs.asDiagonal() * out.cols.transpose();
  out.recon_rel = (recon - M).norm() / M.norm();
  return out;
}

std::vector<GenPair> quantity_pairs(const AdmittanceModel& adm,
                                    QuantityKind kind, int node, int line) {
  const int nb = adm.n_bus();
  if (node < 0 || node >= nb) throw ModelError("node index out of range");
  switch (kind) {
    case QuantityKind::P_inj:
    case QuantityKind::Q_inj:
      return injection_like_pairs(node, adm.ybus.row(node),
                                  kind == QuantityKind::Q_inj);
    case QuantityKind::P_flow:
    case QuantityKind::Q_flow: {
      if (line < 0 || line >= adm.n_branch())
        throw ModelError("flow kind needs a valid line index");
      const bool reactive = kind == QuantityKind::Q_flow;
      if (adm.from_idx[line] == node)
        return injection_like_pairs(node, adm.yf.row(line), reactive);
      if (adm.to_idx[line] == node)
        return injection_like_pairs(node, adm.yt.row(line), reactive);
      throw ModelError("line " + std::to_string(line) +
                       " not incident to node " + std::to_string(node));
    }
    case QuantityKind::Vmag:
      return magnitude_pairs(node, nb);
  }
  throw ModelError("unknown quantity kind");
}

Mat symmetric_quadratic_matrix(const AdmittanceModel& adm, QuantityKind kind,
                               int node, int line) {
  const auto pairs = quantity_pairs(adm, kind, node, line);
  const int dim = 2 * adm.n_bus();
  Mat M = Mat::Zero(dim, dim);
  for (const GenPair& p : pairs)
    M += p.u * p.w.transpose() + p.w * p.u.transpose();
  return M;
}

Mat Selector::dense() const {
  Mat m = Mat::Zero(rows, cols());
  for (int c = 0; c < cols(); ++c) m(map[c], c) = 1.0;
  return m;
}

void SymCoord::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  entries.emplace_back(i, j, v);
}

Mat SymCoord::dense() const {
  Mat m = Mat::Zero(dim, dim);
  for (const auto& [i, j, v] : entries) {
    m(i, j) += v;
    if (i != j) m(j, i) += v;
  }
  return m;
}

double SymCoord::quad(const Vec& mu) const {
  double s = 0;
  for (const auto& [i, j, v] : entries)
    s += (i == j) ? v * mu[i] * mu[i] : 2.0 * v * mu[i] * mu[j];
  return s;
}

namespace {

Selector make_selector(int rows, std::vector<int> ix) {
  Selector s;
  s.rows = rows;
  s.map = std::move(ix);
  return s;
}

void build_selectors(NodalBasis& nd) {
  const int m = nd.mu_dim;
  std::vector<int> ab(8), xall(nd.nx);
  for (int k = 0; k < 8; ++k) ab[k] = k;
  for (int k = 0; k < nd.nx; ++k) xall[k] = k;
  nd.selectors.a_alpha_beta = make_selector(m, ab);
  nd.selectors.a_j = make_selector(m, xall);
  nd.selectors.a_omega = make_selector(m, {nd.omega_at(), nd.omega_at() + 1});
  for (int i = 0; i < nd.nl; ++i) {
    std::vector<int> gd(8);
    for (int k = 0; k < 4; ++k) {
      gd[k] = nd.gamma_at(i) + k;
      gd[4 + k] = nd.delta_at(i) + k;
    }
    nd.selectors.a_gamma_delta.push_back(make_selector(m, gd));
    nd.selectors.a_fl.push_back(
        make_selector(m, {nd.flow_slot(i), nd.flow_bar_slot(i)}));
  }
  for (int t = 0; t < nd.ng; ++t) {
    nd.selectors.a_g.push_back(make_selector(m, {nd.gen_p_slot(t)}));
    nd.selectors.a_gm.push_back(make_selector(m, {nd.gen_q_slot(t)}));
  }
}

void build_pis(NodalBasis& nd, const NetworkCase& c) {
  const int m = nd.mu_dim;
  const int end = nd.end_slot();

  nd.pis.pi_s.dim = m;
  nd.pis.pi_sbar.dim = m;
  for (int k = 0; k < 4; ++k) {
    nd.pis.pi_s.add(k, k, nd.inj_p.signs[k]);
    nd.pis.pi_sbar.add(4 + k, 4 + k, nd.inj_q.signs[k]);
  }
  for (int t = 0; t < nd.ng; ++t) {
    nd.pis.pi_s.add(nd.gen_p_slot(t), end, -0.5);
    nd.pis.pi_sbar.add(nd.gen_q_slot(t), end, -0.5);
  }

  for (int i = 0; i < nd.nl; ++i) {
    SymCoord f, fb, fm;
    f.dim = fb.dim = fm.dim = m;
    for (int k = 0; k < 4; ++k) {
      f.add(nd.gamma_at(i) + k, nd.gamma_at(i) + k, nd.flow_p[i].signs[k]);
      fb.add(nd.delta_at(i) + k, nd.delta_at(i) + k, nd.flow_q[i].signs[k]);
    }
    f.add(nd.flow_slot(i), end, -0.5);
    fb.add(nd.flow_bar_slot(i), end, -0.5);
    fm.add(nd.flow_slot(i), nd.flow_slot(i), 1.0);
    fm.add(nd.flow_bar_slot(i), nd.flow_bar_slot(i), 1.0);
    nd.pis.pi_f.push_back(std::move(f));
    nd.pis.pi_fbar.push_back(std::move(fb));
    nd.pis.pi_flowmax.push_back(std::move(fm));
  }

  for (int t = 0; t < nd.ng; ++t) {
    const GenRecord& g = c.generators[nd.gens[t]];
    SymCoord gp, gq;
    gp.dim = gq.dim = m;
    gp.add(nd.gen_p_slot(t), nd.gen_p_slot(t), 1.0);
    gp.add(nd.gen_p_slot(t), end, -(g.pmax + g.pmin) / 2.0);
    gp.add(end, end, g.pmax * g.pmin);
    gq.add(nd.gen_q_slot(t), nd.gen_q_slot(t), 1.0);
    gq.add(nd.gen_q_slot(t), end, -(g.qmax + g.qmin) / 2.0);
    gq.add(end, end, g.qmax * g.qmin);
    nd.pis.pi_g.push_back(std::move(gp));
    nd.pis.pi_gm.push_back(std::move(gq));
  }

  nd.pis.pi_e.dim = m;
  nd.pis.pi_e.add(nd.omega_at(), nd.omega_at(), 1.0);
  nd.pis.pi_e.add(nd.omega_at() + 1, nd.omega_at() + 1, 1.0);
}

}  // namespace

StarModel build_star_model(const NetworkCase& c, const AdmittanceModel& adm,
                           const ModelConfig& cfg) {
  const int nb = c.n_bus();
  if (adm.n_bus() != nb || adm.n_branch() != c.n_branch())
    throw ModelError("admittance model does not match the case");
  if (!(cfg.rho_power > 0) || !(cfg.rho_voltage > 0))
    throw ModelError("penalty weights must be positive");

  StarModel m;
  m.net = c;
  m.adm = adm;
  m.config = cfg;
  m.nb = nb;
  m.demand_p = Vec(nb);
  m.demand_q = Vec(nb);
  for (int j = 0; j < nb; ++j) {
    m.demand_p[j] = c.buses[j].pd;
    m.demand_q[j] = c.buses[j].qd;
  }

  std::vector<std::vector<std::pair<int, int>>> lines_at(nb);
  for (int l = 0; l < c.n_branch(); ++l) {
    lines_at[adm.from_idx[l]].emplace_back(l, 0);
    lines_at[adm.to_idx[l]].emplace_back(l, 1);
  }
  const auto gens_at = c.gens_at_bus();
  const auto costs = cost_coefficients(c);

  m.nodes.resize(nb);
  for (int j = 0; j < nb; ++j) {
    NodalBasis& nd = m.nodes[j];
    nd.bus = j;
    nd.bus_id = c.buses[j].id;
    nd.lines = lines_at[j];
    nd.gens = gens_at[j];
    nd.nl = static_cast<int>(nd.lines.size());
    nd.ng = static_cast<int>(nd.gens.size());
    nd.nx = 8 * nd.nl + 10;
    nd.mu_dim = 10 * nd.nl + 2 * nd.ng + 11;

    try {
      nd.inj_p = decompose_pairs(quantity_pairs(adm, QuantityKind::P_inj, j), 4);
      nd.inj_q = decompose_pairs(quantity_pairs(adm, QuantityKind::Q_inj, j), 4);
      for (const auto& [l, side] : nd.lines) {
        (void)side;
        nd.flow_p.push_back(
            decompose_pairs(quantity_pairs(adm, QuantityKind::P_flow, j, l), 4));
        nd.flow_q.push_back(
            decompose_pairs(quantity_pairs(adm, QuantityKind::Q_flow, j, l), 4));
      }
      nd.mag = decompose_pairs(quantity_pairs(adm, QuantityKind::Vmag, j), 2);
    } catch (const ModelError& e) {
      throw ModelError("node " + std::to_string(j) + " (bus " +
                       std::to_string(nd.bus_id) + "): " + e.what());
    }

    nd.phi_L = Mat(2 * nb, 8 * nd.nl + 8);
    nd.signature_L = Vec(8 * nd.nl + 8);
    nd.phi_L.leftCols<4>() = nd.inj_p.cols;
    nd.phi_L.middleCols<4>(4) = nd.inj_q.cols;
    nd.signature_L.head<4>() = nd.inj_p.signs;
    nd.signature_L.segment<4>(4) = nd.inj_q.signs;
    for (int i = 0; i < nd.nl; ++i) {
      nd.phi_L.middleCols<4>(8 + 4 * i) = nd.flow_p[i].cols;
      nd.phi_L.middleCols<4>(8 + 4 * nd.nl + 4 * i) = nd.flow_q[i].cols;
      nd.signature_L.segment<4>(8 + 4 * i) = nd.flow_p[i].signs;
      nd.signature_L.segment<4>(8 + 4 * nd.nl + 4 * i) = nd.flow_q[i].signs;
    }
    nd.phi_M = Mat::Zero(2 * nb, 2);
    nd.phi_M(j, 0) = 1.0;
    nd.phi_M(nb + j, 1) = 1.0;

    Eigen::BDCSVD<Mat> svd(nd.phi_L, Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    int r = 0;
    const double smax = std::max(sv.size() ? sv[0] : 0.0, 1e-300);
    for (int k = 0; k < sv.size(); ++k)
      if (sv[k] > 1e-10 * smax) ++r;
    nd.rank = r;
    nd.power_rowspace = svd.matrixV().leftCols(r);

    for (int t : nd.gens) nd.gen_cost.push_back(costs[t]);
    build_selectors(nd);
    build_pis(nd, c);
  }

  m.center_gram = Mat::Zero(2 * nb, 2 * nb);
  for (const NodalBasis& nd : m.nodes)
    m.center_gram.noalias() += cfg.rho_power * nd.phi_L * nd.phi_L.transpose();
  m.center_llt.compute(m.center_gram);
  if (m.center_llt.info() != Eigen::Success)
    throw ModelError("voltage pool gram matrix is not positive definite");
  return m;
}

int StarModel::n_var_max() const {
  int m = 0;
  for (const NodalBasis& nd : nodes) m = std::max(m, nd.mu_dim);
  return m;
}

Vec project_to_nodal(const Vec& v, const NodalBasis& nd) {
  const int nb = static_cast<int>(v.size()) / 2;
  Vec x(nd.nx);
  x.head(nd.nx - 2) = nd.phi_L.transpose() * v;
  x[nd.nx - 2] = v[nd.bus];
  x[nd.nx - 1] = v[nb + nd.bus];
  return x;
}

Vec pull_from_center(const Vec& y, const NodalBasis& nd) {
  const int nb = static_cast<int>(nd.phi_L.rows()) / 2;
  if (y.size() != 4 * nb) throw ModelError("center state dimension mismatch");
  Vec x(nd.nx);
  x.head(nd.nx - 2) = nd.phi_L.transpose() * y.head(2 * nb);
  x[nd.nx - 2] = y[2 * nb + nd.bus];
  x[nd.nx - 1] = y[3 * nb + nd.bus];
  return x;
}

NodeQuantities evaluate_quantities(const Vec& x, const NodalBasis& nd) {
  if (x.size() != nd.nx) throw ModelError("state dimension mismatch");
  NodeQuantities out;
  const auto quad = [&](const Vec& signs, int at) {
    const auto seg = x.segment<4>(at);
    return (signs.array() * seg.array().square()).sum();
  };
  out.p = quad(nd.inj_p.signs, 0);
  out.q = quad(nd.inj_q.signs, 4);
  for (int i = 0; i < nd.nl; ++i)
    out.flows.emplace_back(quad(nd.flow_p[i].signs, nd.gamma_at(i)),
                           quad(nd.flow_q[i].signs, nd.delta_at(i)));
  out.e = x[nd.nx - 2] * x[nd.nx - 2] + x[nd.nx - 1] * x[nd.nx - 1];
  return out;
}

Vec rho_vector(const NodalBasis& nd, double rho_p, double rho_v) {
  Vec r = Vec::Constant(nd.nx, rho_p);
  r[nd.nx - 2] = rho_v;
  r[nd.nx - 1] = rho_v;
  return r;
}

Vec dual_init(const NodalBasis& nd, const Vec& raw) {
  if (raw.size() != nd.nx) throw ModelError("dual dimension mismatch");
  const Vec head = raw.head(nd.nx - 2);
  Vec z(nd.nx);
  z.head(nd.nx - 2) =
      head - nd.power_rowspace * (nd.power_rowspace.transpose() * head);
  z[nd.nx - 2] = 0.0;
  z[nd.nx - 1] = 0.0;
  return z;
}

}  // namespace drohs
