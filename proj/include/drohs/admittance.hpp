#pragma once

#include <Eigen/Dense>
#include <complex>

#include "drohs/case.hpp"

namespace drohs {

using cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Bus admittance matrix plus the branch-end admittance rows of the standard
// pi model with off-nominal taps and phase shifts.
struct AdmittanceModel {
  CMat ybus;  // Nb x Nb
  CMat yf;    // Nl x Nb, from-end branch currents: i_f = yf * v
  CMat yt;    // Nl x Nb, to-end
  std::vector<std::optional<double>> flow_cap;  // p.u. MVA cap, nullopt = none
  std::vector<int> from_idx, to_idx;            // branch endpoints as bus indices

  int n_bus() const { return static_cast<int>(ybus.rows()); }
  int n_branch() const { return static_cast<int>(yf.rows()); }
};

AdmittanceModel build_admittance(const NetworkCase& c);

// Complex net injections v .* conj(ybus * v) for a complex voltage vector.
// This is the plain power-flow arithmetic; diagnostics lean on it as a route
// independent of any quadratic-form machinery.
CVec complex_injections(const AdmittanceModel& adm, const CVec& v);

}  // namespace drohs
