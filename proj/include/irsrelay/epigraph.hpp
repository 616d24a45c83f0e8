#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "irsrelay/conic_problem.hpp"

namespace irsrelay::conic {

class MalformedHandleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Block entries of a 2x2 PSD block [[u, w], [w, v]]: u v >= w^2, u, v >= 0.
struct HyperbolicBlock {
  int block;
  Var u, v, w;
};

/// Emits [[u, w], [w, v]] >= 0. An argument left empty leaves that block entry
/// unconstrained, so the entry itself acts as a fresh variable.
HyperbolicBlock emit_hyperbolic(ProblemBuilder& b, const std::optional<AffineExpr>& u,
                                const std::optional<AffineExpr>& v,
                                const std::optional<AffineExpr>& w);

/// t^2 * S >= 1 with t >= 0, through an auxiliary r: [[t, 1], [1, r]] >= 0 and
/// [[S, r], [r, 1]] >= 0.
struct SquaredLinearBlocks {
  HyperbolicBlock t_block;
  HyperbolicBlock s_block;
  Var s;  // the S entry
  Var r;
};

SquaredLinearBlocks emit_squared_linear(ProblemBuilder& b, const AffineExpr& t,
                                        const std::optional<AffineExpr>& s);

/// ||a||^2 <= t for real affine a_1..a_n via the Schur block [[I, a], [a^T, t]] >= 0.
struct QuadraticFormBlock {
  int block;
  Var t;
};

QuadraticFormBlock emit_quadratic_form(ProblemBuilder& b, const std::vector<AffineExpr>& a,
                                       const std::optional<AffineExpr>& t);

/// Numeric value of the hyperbolic block for given scalars.
RMat hyperbolic_block_value(double u, double v, double w);

}  // namespace irsrelay::conic
