#include "irsrelay/epigraph.hpp"

#include <cmath>
#include <string>

namespace irsrelay::conic {

namespace {

void check(const ProblemBuilder& b, const std::optional<AffineExpr>& e, const char* what) {
  if (!e) return;
  for (const auto& [v, c] : e->terms()) {
    if (!b.owns(v)) throw MalformedHandleError(std::string(what) + ": handle does not belong to this problem");
    if (!std::isfinite(c)) throw MalformedHandleError(std::string(what) + ": non-finite coefficient");
  }
  if (!std::isfinite(e->constant())) throw MalformedHandleError(std::string(what) + ": non-finite constant");
}

}  // namespace

HyperbolicBlock emit_hyperbolic(ProblemBuilder& b, const std::optional<AffineExpr>& u,
                                const std::optional<AffineExpr>& v,
                                const std::optional<AffineExpr>& w) {
  check(b, u, "emit_hyperbolic");
  check(b, v, "emit_hyperbolic");
  check(b, w, "emit_hyperbolic");
  const int blk = b.add_psd_block(2);
  HyperbolicBlock h{blk, b.entry(blk, 0, 0), b.entry(blk, 1, 1), b.entry(blk, 0, 1)};
  if (u) b.add_equality(h.u, *u);
  if (v) b.add_equality(h.v, *v);
  if (w) b.add_equality(h.w, *w);
  return h;
}

SquaredLinearBlocks emit_squared_linear(ProblemBuilder& b, const AffineExpr& t,
                                        const std::optional<AffineExpr>& s) {
  check(b, t, "emit_squared_linear");
  check(b, s, "emit_squared_linear");
  // t * r >= 1 and S * 1 >= r^2 together give t^2 S >= 1.
  HyperbolicBlock tb = emit_hyperbolic(b, t, std::nullopt, AffineExpr(1.0));
  HyperbolicBlock sb = emit_hyperbolic(b, s, AffineExpr(1.0), AffineExpr(tb.v));
  return SquaredLinearBlocks{tb, sb, sb.u, tb.v};
}

QuadraticFormBlock emit_quadratic_form(ProblemBuilder& b, const std::vector<AffineExpr>& a,
                                       const std::optional<AffineExpr>& t) {
  if (a.empty()) throw MalformedHandleError("emit_quadratic_form: empty vector");
  for (const auto& e : a) check(b, e, "emit_quadratic_form");
  check(b, t, "emit_quadratic_form");
  const int n = static_cast<int>(a.size());
  const int blk = b.add_psd_block(n + 1);
  for (int i = 0; i < n; ++i) {
    b.add_equality(b.entry(blk, i, i), AffineExpr(1.0));
    for (int j = i + 1; j < n; ++j) b.add_equality(b.entry(blk, i, j), AffineExpr(0.0));
    b.add_equality(b.entry(blk, i, n), a[i]);
  }
  const Var tv = b.entry(blk, n, n);
  if (t) b.add_equality(tv, *t);
  return QuadraticFormBlock{blk, tv};
}

RMat hyperbolic_block_value(double u, double v, double w) {
  RMat m(2, 2);
  m << u, w, w, v;
  return m;
}

}  // namespace irsrelay::conic
