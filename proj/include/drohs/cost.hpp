#pragma once

#include <vector>

#include "drohs/case.hpp"

namespace drohs {

// Per-unit generation cost f(g) = a g^2 + 2 b g + c0 with g in p.u.
struct CostCoeff {
  double a = 0.0;
  double b = 0.0;
  double c0 = 0.0;  // $/h offset, carried through to reported objectives
};

// The single place where file cost coefficients (over MW) become per-unit
// quadratics in the internal 2b convention. Everything downstream uses this.
std::vector<CostCoeff> cost_coefficients(const NetworkCase& c);

}  // namespace drohs
