#include "drohs/cost.hpp"

namespace drohs {

std::vector<CostCoeff> cost_coefficients(const NetworkCase& c) {
  // Files quote f(P) = c2 P^2 + c1 P + c0 with P in MW. With g = P / base the
  // same money value is a g^2 + 2 b g + c0 where a = c2 base^2 and
  // b = c1 base / 2. The half on the linear term is deliberate: internal
  // objectives pair every linear coefficient with a factor 2, and this is the
  // only site allowed to know about it.
  std::vector<CostCoeff> out(c.n_gen());
  const double base = c.base_mva;
  for (int t = 0; t < c.n_gen(); ++t) {
    const GenCost& gc = c.generators[t].cost;
    out[t].a = gc.c2 * base * base;
    out[t].b = gc.c1 * base / 2.0;
    out[t].c0 = gc.c0;
  }
  return out;
}

}  // namespace drohs
