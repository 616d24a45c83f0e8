#include "irsrelay/conic_problem.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "irsrelay/conic_solver.hpp"

namespace irsrelay::conic {

int ConeSpec::block_offset(int b) const {
  int off = 0;
  for (int i = 0; i < b; ++i) off += block_size(i);
  return off;
}

int ConeSpec::nonneg_offset() const {
  return block_offset(static_cast<int>(psd_block_dims.size()));
}

int ConeSpec::psd_index(int b, int i, int j) const {
  if (i > j) std::swap(i, j);
  const int d = psd_block_dims[b];
  // Row-major upper triangle: rows 0..i-1 contribute d, d-1, ..., d-i+1 entries.
  return block_offset(b) + i * d - i * (i - 1) / 2 + (j - i);
}

double LinearFunctional::evaluate(const RVec& x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * x(t.index);
  return s;
}

AffineExpr& AffineExpr::add(Var v, double coef) {
  if (coef != 0.0) terms_.emplace_back(v, coef);
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  for (const auto& [v, c] : o.terms_) terms_.emplace_back(v, -c);
  constant_ -= o.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  for (auto& t : terms_) t.second *= s;
  constant_ *= s;
  return *this;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

int ProblemBuilder::add_psd_block(int dim) {
  if (dim < 1) throw std::invalid_argument("add_psd_block: dimension must be >= 1");
  block_dims_.push_back(dim);
  return static_cast<int>(block_dims_.size()) - 1;
}

Var ProblemBuilder::entry(int block, int i, int j) const {
  const int d = block_dims_.at(block);
  if (i < 0 || j < 0 || i >= d || j >= d) throw std::out_of_range("ProblemBuilder::entry");
  if (i > j) std::swap(i, j);
  return Var{VarKind::PsdEntry, block, i, j};
}

Var ProblemBuilder::add_nonneg() { return Var{VarKind::Nonneg, nonneg_count_++, 0, 0}; }

Var ProblemBuilder::add_free() { return Var{VarKind::Free, free_count_++, 0, 0}; }

bool ProblemBuilder::owns(Var v) const {
  switch (v.kind) {
    case VarKind::PsdEntry:
      return v.block >= 0 && v.block < block_count() && v.row >= 0 && v.col >= 0 &&
             v.row < block_dims_[v.block] && v.col < block_dims_[v.block];
    case VarKind::Nonneg:
      return v.block >= 0 && v.block < nonneg_count_;
    case VarKind::Free:
      return v.block >= 0 && v.block < free_count_;
  }
  return false;
}

namespace {

// Sum_{p,q} w(p,q) X(p,q) over the full symmetric matrix, folded to the upper triangle.
AffineExpr full_weights(const ProblemBuilder& b, int block, const RMat& w) {
  AffineExpr e;
  const int d = b.block_dim(block);
  for (int p = 0; p < d; ++p) {
    if (w(p, p) != 0.0) e.add(b.entry(block, p, p), w(p, p));
    for (int q = p + 1; q < d; ++q) {
      const double c = w(p, q) + w(q, p);
      if (c != 0.0) e.add(b.entry(block, p, q), c);
    }
  }
  return e;
}

}  // namespace

AffineExpr ProblemBuilder::trace(int block, const RMat& c) const {
  if (c.rows() != block_dim(block) || c.cols() != block_dim(block)) {
    throw std::invalid_argument("ProblemBuilder::trace: dimension mismatch");
  }
  return full_weights(*this, block, c.transpose());
}

AffineExpr ProblemBuilder::embedded_trace(int block, const HermMat& c) const {
  return embedded_trace_re(block, c.mat());
}

AffineExpr ProblemBuilder::embedded_trace_re(int block, const CMat& q) const {
  const Eigen::Index n = q.rows();
  if (q.cols() != n || 2 * n != block_dim(block)) {
    throw std::invalid_argument("embedded_trace_re: dimension mismatch");
  }
  // H = Hr + j Hi with Hr = (X11 + X22)/2, Hi = (X21 - X12)/2.
  RMat w = RMat::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = 0.5 * q(i, j).real();
      const double im = 0.5 * q(i, j).imag();
      w(j, i) += re;
      w(n + j, n + i) += re;
      w(n + j, i) -= im;
      w(j, n + i) += im;
    }
  }
  return full_weights(*this, block, w);
}

AffineExpr ProblemBuilder::embedded_trace_im(int block, const CMat& q) const {
  const Eigen::Index n = q.rows();
  if (q.cols() != n || 2 * n != block_dim(block)) {
    throw std::invalid_argument("embedded_trace_im: dimension mismatch");
  }
  RMat w = RMat::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = 0.5 * q(i, j).real();
      const double im = 0.5 * q(i, j).imag();
      w(n + j, i) += re;
      w(j, n + i) -= re;
      w(j, i) += im;
      w(n + j, n + i) += im;
    }
  }
  return full_weights(*this, block, w);
}

AffineExpr ProblemBuilder::embedded_diag(int block, int n) const {
  const int half = block_dim(block) / 2;
  AffineExpr e;
  e.add(entry(block, n, n), 0.5);
  e.add(entry(block, half + n, half + n), 0.5);
  return e;
}

void ProblemBuilder::add_equality(const AffineExpr& lhs, const AffineExpr& rhs) {
  rows_.emplace_back(lhs - rhs, true);
}

void ProblemBuilder::add_less_equal(const AffineExpr& lhs, const AffineExpr& rhs) {
  rows_.emplace_back(lhs - rhs, false);
}

ConeSpec ProblemBuilder::spec() const { return ConeSpec{block_dims_, nonneg_count_, free_count_}; }

int ProblemBuilder::flat_index(Var v) const {
  const ConeSpec s = spec();
  switch (v.kind) {
    case VarKind::PsdEntry:
      return s.psd_index(v.block, v.row, v.col);
    case VarKind::Nonneg:
      return s.nonneg_offset() + v.block;
    case VarKind::Free:
      return s.free_offset() + v.block;
  }
  return -1;
}

LinearFunctional ProblemBuilder::to_functional(const AffineExpr& e) const {
  // Precompute offsets once; flat_index() recomputes the spec per call.
  const ConeSpec s = spec();
  std::vector<int> offsets(block_dims_.size());
  for (std::size_t b = 0; b < block_dims_.size(); ++b) offsets[b] = s.block_offset(static_cast<int>(b));
  std::vector<std::pair<int, double>> acc;
  acc.reserve(e.terms().size());
  for (const auto& [v, c] : e.terms()) {
    int idx = 0;
    switch (v.kind) {
      case VarKind::PsdEntry: {
        const int d = block_dims_[v.block];
        idx = offsets[v.block] + v.row * d - v.row * (v.row - 1) / 2 + (v.col - v.row);
        break;
      }
      case VarKind::Nonneg:
        idx = s.nonneg_offset() + v.block;
        break;
      case VarKind::Free:
        idx = s.free_offset() + v.block;
        break;
    }
    acc.emplace_back(idx, c);
  }
  std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (out > 0 && acc[out - 1].first == acc[i].first) {
      acc[out - 1].second += acc[i].second;
    } else {
      acc[out++] = acc[i];
    }
  }
  acc.resize(out);
  LinearFunctional f;
  f.terms.reserve(acc.size());
  for (const auto& [i, c] : acc) {
    if (c != 0.0) f.terms.push_back({i, c});
  }
  return f;
}

ConicProblem ProblemBuilder::build() const {
  ConicProblem p;
  p.spec = spec();
  p.objective = to_functional(objective_);
  p.objective_offset = objective_.constant();
  for (const auto& [expr, is_eq] : rows_) {
    Constraint c{to_functional(expr), -expr.constant()};
    (is_eq ? p.equalities : p.inequalities).push_back(std::move(c));
  }
  return p;
}

double ProblemBuilder::value(const ConicSolution& sol, Var v) const {
  return sol.x(flat_index(v));
}

double ProblemBuilder::value(const ConicSolution& sol, const AffineExpr& e) const {
  double s = e.constant();
  for (const auto& [v, c] : e.terms()) s += c * value(sol, v);
  return s;
}

HermMat ProblemBuilder::embedded_value(const ConicSolution& sol, int block) const {
  return complex_from_embedding(sol.psd_blocks.at(block));
}

void write_problem(std::ostream& os, const ConicProblem& p) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::scientific << std::setprecision(9);
  os << "# conic problem: maximize objective subject to rows\n";
  os << "blocks psd";
  for (int d : p.spec.psd_block_dims) os << ' ' << d;
  os << "\nnonneg " << p.spec.nonneg_count << "\nfree " << p.spec.free_count << "\nvars "
     << p.spec.total_dim() << '\n';
  auto write_row = [&](const LinearFunctional& f) {
    for (const auto& t : f.terms) os << ' ' << t.coef << "*x" << t.index;
  };
  os << "objective";
  write_row(p.objective);
  os << " + " << p.objective_offset << '\n';
  for (const auto& c : p.equalities) {
    write_row(c.lhs);
    os << " == " << c.rhs << '\n';
  }
  for (const auto& c : p.inequalities) {
    write_row(c.lhs);
    os << " <= " << c.rhs << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace irsrelay::conic
