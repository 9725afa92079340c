#include "drohs/admittance.hpp"

#include <cmath>

namespace drohs {

AdmittanceModel build_admittance(const NetworkCase& c) {
  const int nb = c.n_bus();
  const int nl = c.n_branch();
  AdmittanceModel m;
  m.ybus = CMat::Zero(nb, nb);
  m.yf = CMat::Zero(nl, nb);
  m.yt = CMat::Zero(nl, nb);
  m.flow_cap.resize(nl);
  m.from_idx.resize(nl);
  m.to_idx.resize(nl);

  for (int l = 0; l < nl; ++l) {
    const auto& br = c.branches[l];
    const int f = c.bus_index(br.from_bus);
    const int t = c.bus_index(br.to_bus);
    m.from_idx[l] = f;
    m.to_idx[l] = t;
    const cx ys = 1.0 / cx(br.r, br.x);
    const cx bc(0.0, br.b / 2.0);
    const double theta = br.shift_deg * M_PI / 180.0;
    const cx tap = std::polar(br.tap, theta);

    // Standard pi model seen from each end; the tap sits on the from side.
    const cx yff = (ys + bc) / (tap * std::conj(tap));
    const cx yft = -ys / std::conj(tap);
    const cx ytf = -ys / tap;
    const cx ytt = ys + bc;

    m.yf(l, f) = yff;
    m.yf(l, t) = yft;
    m.yt(l, f) = ytf;
    m.yt(l, t) = ytt;

    m.ybus(f, f) += yff;
    m.ybus(f, t) += yft;
    m.ybus(t, f) += ytf;
    m.ybus(t, t) += ytt;

    m.flow_cap[l] = br.rate_a > 0 ? std::optional<double>(br.rate_a) : std::nullopt;
  }

  for (int i = 0; i < nb; ++i) m.ybus(i, i) += cx(c.buses[i].gs, c.buses[i].bs);
  return m;
}

CVec complex_injections(const AdmittanceModel& adm, const CVec& v) {
  return v.array() * (adm.ybus * v).array().conjugate();
}

}  // namespace drohs
