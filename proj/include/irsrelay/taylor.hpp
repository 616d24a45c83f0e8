#pragma once

#include <stdexcept>

namespace irsrelay {

class NonPositiveLocalPointError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// R_low(S, I) = constant + coeff_S (S - S_loc) + coeff_I (I - I_loc).
struct AffineBound {
  double constant = 0.0;
  double coeff_S = 0.0;
  double coeff_I = 0.0;
  double S_loc = 1.0;
  double I_loc = 1.0;

  double operator()(double S, double I) const {
    return constant + coeff_S * (S - S_loc) + coeff_I * (I - I_loc);
  }
};

/// u(S, I) = log2(C + 1 / (S I)), convex on the positive orthant for C >= 0.
double rate_surrogate_u(double S, double I, double C);

/// First-order expansion of u at (S_loc, I_loc); a global underestimator.
AffineBound taylor_bound_u(double S_loc, double I_loc, double C);

/// v(S, I) = 1 / (S I).
double sinr_surrogate_v(double S, double I);

AffineBound taylor_bound_v(double S_loc, double I_loc);

/// Expansion of u3 = log2(1 + 1/(S1 I1) + 1/(S2 I2)) at a local point.
struct AffineBound4 {
  double constant = 0.0;
  double coeff_S1 = 0.0, coeff_I1 = 0.0, coeff_S2 = 0.0, coeff_I2 = 0.0;
  double S1_loc = 1.0, I1_loc = 1.0, S2_loc = 1.0, I2_loc = 1.0;

  double operator()(double S1, double I1, double S2, double I2) const {
    return constant + coeff_S1 * (S1 - S1_loc) + coeff_I1 * (I1 - I1_loc) + coeff_S2 * (S2 - S2_loc) +
           coeff_I2 * (I2 - I2_loc);
  }
};

double rate_surrogate_u3(double S1, double I1, double S2, double I2);

AffineBound4 taylor_bound_u3(double S1_loc, double I1_loc, double S2_loc, double I2_loc);

}  // namespace irsrelay
