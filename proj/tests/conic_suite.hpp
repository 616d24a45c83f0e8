#pragma once

// Analytic conic test problems with independently computed optima.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "irsrelay/conic_problem.hpp"
#include "irsrelay/conic_solver.hpp"
#include "irsrelay/epigraph.hpp"

namespace conic_suite {

using namespace irsrelay;
using namespace irsrelay::conic;

struct Case {
  std::string name;
  ConicProblem problem;
  double expected;
};

// maximize c^T x over {A x <= b, x >= 0} in two variables, by vertex enumeration.
inline double lp2_vertex_oracle(const std::vector<std::array<double, 3>>& rows, double c0, double c1) {
  std::vector<std::array<double, 3>> all = rows;  // a0 x + a1 y <= b
  all.push_back({-1.0, 0.0, 0.0});
  all.push_back({0.0, -1.0, 0.0});
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double det = all[i][0] * all[j][1] - all[i][1] * all[j][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (all[i][2] * all[j][1] - all[i][1] * all[j][2]) / det;
      const double y = (all[i][0] * all[j][2] - all[i][2] * all[j][0]) / det;
      bool ok = true;
      for (const auto& r : all) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-9;
      if (ok) best = std::max(best, c0 * x + c1 * y);
    }
  }
  return best;
}

inline double herm2_lambda_max(double a, double d, std::complex<double> b) {
  return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
}

inline std::vector<Case> analytic_cases() {
  std::vector<Case> out;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  std::normal_distribution<double> nd;

  {
    ProblemBuilder b;
    const Var x = b.add_nonneg();
    b.add_less_equal(x, 3.0);
    b.set_objective(x);
    out.push_back({"lp: max x, x <= 3", b.build(), 3.0});
  }
  for (int t = 0; t < 6; ++t) {
    ProblemBuilder b;
    const Var x = b.add_nonneg();
    const Var y = b.add_nonneg();
    std::vector<std::array<double, 3>> rows;
    for (int r = 0; r < 3; ++r) {
      rows.push_back({pos(rng), pos(rng), pos(rng)});
      AffineExpr lhs;
      lhs.add(x, rows.back()[0]).add(y, rows.back()[1]);
      b.add_less_equal(lhs, rows.back()[2]);
    }
    const double c0 = pos(rng), c1 = pos(rng);
    AffineExpr obj;
    obj.add(x, c0).add(y, c1);
    b.set_objective(obj);
    out.push_back({"lp: random 2-variable corner " + std::to_string(t), b.build(), lp2_vertex_oracle(rows, c0, c1)});
  }
  {
    // max y s.t. y <= x + 1, y <= 3 - x with x, y free: apex at (1, 2).
    ProblemBuilder b;
    const Var x = b.add_free();
    const Var y = b.add_free();
    b.add_less_equal(y, AffineExpr(x) + AffineExpr(1.0));
    b.add_less_equal(AffineExpr(y) + AffineExpr(x), 3.0);
    b.set_objective(y);
    out.push_back({"lp: free variables apex", b.build(), 2.0});
  }
  {
    // max -tr(X) s.t. X11 = 1: tr(X) >= X11 = 1.
    ProblemBuilder b;
    const int blk = b.add_psd_block(2);
    b.add_equality(b.entry(blk, 0, 0), 1.0);
    b.set_objective(-1.0 * b.trace(blk, RMat::Identity(2, 2)));
    out.push_back({"sdp: min trace with X11 = 1", b.build(), -1.0});
  }
  {
    ProblemBuilder b;
    const int blk = b.add_psd_block(2);
    b.add_equality(b.trace(blk, RMat::Identity(2, 2)), 1.0);
    RMat c = RMat::Zero(2, 2);
    c(0, 0) = 1.0;
    c(1, 1) = 2.0;
    b.set_objective(b.trace(blk, c));
    out.push_back({"sdp: spectraplex diag(1,2)", b.build(), 2.0});
  }
  for (int t = 0; t < 6; ++t) {
    const int n = 2 + t;
    RMat z(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) z(i, j) = nd(rng);
    const RMat c = 0.5 * (z + z.transpose());
    ProblemBuilder b;
    const int blk = b.add_psd_block(n);
    b.add_equality(b.trace(blk, RMat::Identity(n, n)), 1.0);
    b.set_objective(b.trace(blk, c));
    Eigen::SelfAdjointEigenSolver<RMat> es(c, Eigen::EigenvaluesOnly);
    out.push_back({"sdp: spectraplex lambda_max n=" + std::to_string(n), b.build(), es.eigenvalues()(n - 1)});
  }
  for (int t = 0; t < 3; ++t) {
    const double a = nd(rng), d = nd(rng);
    const std::complex<double> off(nd(rng), nd(rng));
    CMat c(2, 2);
    c << a, off, std::conj(off), d;
    ProblemBuilder b;
    const int blk = b.add_psd_block(4);
    b.add_equality(b.embedded_trace(blk, HermMat::identity(2)), 1.0);
    b.set_objective(b.embedded_trace(blk, HermMat(c)));
    out.push_back({"sdp: complex spectraplex " + std::to_string(t), b.build(), herm2_lambda_max(a, d, off)});
  }
  for (int t = 0; t < 4; ++t) {
    const double u = pos(rng), v = pos(rng);
    ProblemBuilder b;
    const HyperbolicBlock h = emit_hyperbolic(b, AffineExpr(u), AffineExpr(v), std::nullopt);
    b.set_objective(h.w);
    out.push_back({"hyperbolic: max w with uv >= w^2 " + std::to_string(t), b.build(), std::sqrt(u * v)});
  }
  {
    // min S s.t. t^2 S >= 1 at t = 2.
    ProblemBuilder b;
    const SquaredLinearBlocks q = emit_squared_linear(b, AffineExpr(2.0), std::nullopt);
    b.set_objective(-1.0 * AffineExpr(q.s));
    out.push_back({"squared linear: min S at t = 2", b.build(), -0.25});
  }
  {
    // min t s.t. ||(x - 1, x + 1)||^2 <= t over free x: x = 0, t = 2.
    ProblemBuilder b;
    const Var x = b.add_free();
    const QuadraticFormBlock q =
        emit_quadratic_form(b, {AffineExpr(x) - AffineExpr(1.0), AffineExpr(x) + AffineExpr(1.0)}, std::nullopt);
    b.set_objective(-1.0 * AffineExpr(q.t));
    out.push_back({"quadratic form: min over free x", b.build(), -2.0});
  }
  {
    ProblemBuilder b;
    const QuadraticFormBlock q = emit_quadratic_form(b, {AffineExpr(1.0), AffineExpr(2.0)}, std::nullopt);
    b.set_objective(-1.0 * AffineExpr(q.t));
    out.push_back({"quadratic form: fixed vector", b.build(), -5.0});
  }
  return out;
}

}  // namespace conic_suite
