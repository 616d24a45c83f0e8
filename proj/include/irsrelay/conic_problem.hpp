#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irsrelay/matrix_core.hpp"

namespace irsrelay::conic {

/// Cone layout. Flat variable indices enumerate, in order: the upper triangle
/// (row-major, i <= j) of each PSD block, then the nonnegative scalars, then
/// the free scalars.
struct ConeSpec {
  std::vector<int> psd_block_dims;
  int nonneg_count = 0;
  int free_count = 0;

  int block_size(int b) const { return psd_block_dims[b] * (psd_block_dims[b] + 1) / 2; }
  int block_offset(int b) const;
  int nonneg_offset() const;
  int free_offset() const { return nonneg_offset() + nonneg_count; }
  int total_dim() const { return free_offset() + free_count; }
  /// Flat index of entry (i, j) of block b; order of i, j does not matter.
  int psd_index(int b, int i, int j) const;
};

struct Term {
  int index;
  double coef;
};

/// Sum of coef * value(index). For an off-diagonal PSD entry the value is X_ij
/// itself, so tr(C X) carries coefficient 2 C_ij on index (i, j), i < j.
struct LinearFunctional {
  std::vector<Term> terms;

  double evaluate(const RVec& x) const;
};

struct Constraint {
  LinearFunctional lhs;
  double rhs = 0.0;
};

/// maximize objective(x) + objective_offset
/// s.t. eq.lhs(x) == eq.rhs, ineq.lhs(x) <= ineq.rhs, x in the cone.
struct ConicProblem {
  ConeSpec spec;
  LinearFunctional objective;
  double objective_offset = 0.0;
  std::vector<Constraint> equalities;
  std::vector<Constraint> inequalities;
};

enum class VarKind : std::uint8_t { PsdEntry, Nonneg, Free };

/// Handle to one scalar decision variable inside a ProblemBuilder.
struct Var {
  VarKind kind = VarKind::Free;
  int block = -1;  // PSD block id, or scalar id for Nonneg/Free
  int row = 0;
  int col = 0;
};

class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT(implicit)
  AffineExpr(Var v) { add(v, 1.0); }                    // NOLINT(implicit)

  AffineExpr& add(Var v, double coef);
  AffineExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(double s);

  const std::vector<std::pair<Var, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

 private:
  std::vector<std::pair<Var, double>> terms_;
  double constant_ = 0.0;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double s, AffineExpr a);

class ConicSolution;

/// Incrementally assembles a ConicProblem from typed variable handles.
class ProblemBuilder {
 public:
  int add_psd_block(int dim);
  Var entry(int block, int i, int j) const;
  int block_dim(int block) const { return block_dims_.at(block); }
  int block_count() const { return static_cast<int>(block_dims_.size()); }

  Var add_nonneg();
  Var add_free();
  /// True if `v` was issued by this builder.
  bool owns(Var v) const;

  /// tr(C X_block) for real symmetric C of the block's dimension.
  AffineExpr trace(int block, const RMat& c) const;
  /// tr(C H) where the block holds real_embedding(H), i.e. 1/2 tr(embed(C) X).
  AffineExpr embedded_trace(int block, const HermMat& c) const;
  /// Real part of tr(Q H) for a general complex Q, with the block holding real_embedding(H).
  AffineExpr embedded_trace_re(int block, const CMat& q) const;
  /// Imaginary part of tr(Q H).
  AffineExpr embedded_trace_im(int block, const CMat& q) const;
  /// Diagonal entry H_nn of the embedded Hermitian matrix.
  AffineExpr embedded_diag(int block, int n) const;

  void add_equality(const AffineExpr& lhs, const AffineExpr& rhs = AffineExpr());
  void add_less_equal(const AffineExpr& lhs, const AffineExpr& rhs);
  void add_greater_equal(const AffineExpr& lhs, const AffineExpr& rhs) { add_less_equal(rhs, lhs); }

  void set_objective(const AffineExpr& obj) { objective_ = obj; }
  const AffineExpr& objective() const { return objective_; }

  ConeSpec spec() const;
  int flat_index(Var v) const;
  ConicProblem build() const;

  double value(const ConicSolution& sol, Var v) const;
  double value(const ConicSolution& sol, const AffineExpr& e) const;
  /// Returns the Hermitian matrix encoded by an embedded block of the solution.
  HermMat embedded_value(const ConicSolution& sol, int block) const;

 private:
  LinearFunctional to_functional(const AffineExpr& e) const;

  std::vector<int> block_dims_;
  int nonneg_count_ = 0;
  int free_count_ = 0;
  AffineExpr objective_;
  std::vector<std::pair<AffineExpr, bool>> rows_;  // (lhs - rhs, is_equality)
};

/// Text dump: a header describing cone blocks, then one line per objective /
/// constraint with `==` or `<=` and coefficients in scientific notation.
void write_problem(std::ostream& os, const ConicProblem& p);

}  // namespace irsrelay::conic
