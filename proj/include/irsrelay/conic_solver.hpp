#pragma once

#include <string>
#include <vector>

#include "irsrelay/conic_problem.hpp"

namespace irsrelay::conic {

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double gap_tol = 1e-7;
  double feas_tol = 1e-7;
  int max_iter = 100;
  double step_fraction = 0.98;
  /// Dual objective magnitude treated as divergent by the infeasibility test.
  double divergence_threshold = 1e8;
  /// Iterations of non-decreasing primal residual that confirm divergence.
  int stall_window = 10;
};

class ConicSolution {
 public:
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec x;                          // flat primal vector (ConeSpec layout)
  std::vector<RMat> psd_blocks;    // full symmetric primal blocks
  RVec eq_duals;                   // multipliers of equality rows
  RVec ineq_duals;                 // multipliers of <= rows, >= 0
  double primal_objective = 0.0;   // maximization sense, offset included
  double dual_objective = 0.0;
  double duality_gap = 0.0;        // relative: max(|p - d|, <X,S>) / (1 + |p| + |d|)
  double primal_residual = 0.0;    // relative
  double dual_residual = 0.0;      // relative
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Returns an empty list for a well-formed problem, otherwise one message per
/// violation ("index out of range", "rank-deficient equalities", ...).
std::vector<std::string> validate(const ConicProblem& p);

/// Primal-dual interior-point method with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector steps. Inequalities get internal nonnegative slacks;
/// free scalars enter the Newton system through an augmented (saddle-point)
/// block.
ConicSolution solve(const ConicProblem& p, const SolveOptions& opts = {});

}  // namespace irsrelay::conic
