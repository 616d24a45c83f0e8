#include "irsrelay/taylor.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace irsrelay {

namespace {

void require_positive(double S, double I) {
  if (!(S > 0.0) || !(I > 0.0) || !std::isfinite(S) || !std::isfinite(I)) {
    throw NonPositiveLocalPointError("local point must be positive and finite (S=" + std::to_string(S) +
                                     ", I=" + std::to_string(I) + ")");
  }
}

}  // namespace

double rate_surrogate_u(double S, double I, double C) { return std::log2(C + 1.0 / (S * I)); }

AffineBound taylor_bound_u(double S_loc, double I_loc, double C) {
  require_positive(S_loc, I_loc);
  const double q = 1.0 / (S_loc * I_loc);
  const double denom = (C + q) * std::numbers::ln2;
  AffineBound b;
  b.S_loc = S_loc;
  b.I_loc = I_loc;
  b.constant = std::log2(C + q);
  b.coeff_S = -q / (S_loc * denom);
  b.coeff_I = -q / (I_loc * denom);
  return b;
}

double sinr_surrogate_v(double S, double I) { return 1.0 / (S * I); }

AffineBound taylor_bound_v(double S_loc, double I_loc) {
  require_positive(S_loc, I_loc);
  const double q = 1.0 / (S_loc * I_loc);
  AffineBound b;
  b.S_loc = S_loc;
  b.I_loc = I_loc;
  b.constant = q;
  b.coeff_S = -q / S_loc;
  b.coeff_I = -q / I_loc;
  return b;
}

double rate_surrogate_u3(double S1, double I1, double S2, double I2) {
  return std::log2(1.0 + 1.0 / (S1 * I1) + 1.0 / (S2 * I2));
}

AffineBound4 taylor_bound_u3(double S1_loc, double I1_loc, double S2_loc, double I2_loc) {
  require_positive(S1_loc, I1_loc);
  require_positive(S2_loc, I2_loc);
  // Partial derivatives in (S1, I1) are those of u with C = 1 + v(S2, I2), and vice versa.
  const AffineBound first = taylor_bound_u(S1_loc, I1_loc, 1.0 + sinr_surrogate_v(S2_loc, I2_loc));
  const AffineBound second = taylor_bound_u(S2_loc, I2_loc, 1.0 + sinr_surrogate_v(S1_loc, I1_loc));
  AffineBound4 b;
  b.constant = first.constant;
  b.coeff_S1 = first.coeff_S;
  b.coeff_I1 = first.coeff_I;
  b.coeff_S2 = second.coeff_S;
  b.coeff_I2 = second.coeff_I;
  b.S1_loc = S1_loc;
  b.I1_loc = I1_loc;
  b.S2_loc = S2_loc;
  b.I2_loc = I2_loc;
  return b;
}

}  // namespace irsrelay
