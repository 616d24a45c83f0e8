#include "irsrelay/conic_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace irsrelay::conic {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::MaxIter:
      return "MaxIter";
    case SolveStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

std::vector<std::string> validate(const ConicProblem& p) {
  std::vector<std::string> out;
  const ConeSpec& s = p.spec;
  for (std::size_t b = 0; b < s.psd_block_dims.size(); ++b) {
    if (s.psd_block_dims[b] < 1) out.push_back("psd block " + std::to_string(b) + " has dimension < 1");
  }
  if (s.nonneg_count < 0 || s.free_count < 0) out.push_back("negative scalar count");
  if (!out.empty()) return out;

  const int n = s.total_dim();
  auto check = [&](const LinearFunctional& f, double rhs, const std::string& what) {
    for (const auto& t : f.terms) {
      if (t.index < 0 || t.index >= n) {
        out.push_back(what + ": index out of range (" + std::to_string(t.index) + ")");
      }
      if (!std::isfinite(t.coef)) out.push_back(what + ": non-finite coefficient");
    }
    if (!std::isfinite(rhs)) out.push_back(what + ": non-finite rhs");
  };
  check(p.objective, p.objective_offset, "objective");
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    check(p.equalities[i].lhs, p.equalities[i].rhs, "equality " + std::to_string(i));
  }
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    check(p.inequalities[i].lhs, p.inequalities[i].rhs, "inequality " + std::to_string(i));
  }
  if (!out.empty() || p.equalities.empty()) return out;

  RMat a = RMat::Zero(static_cast<Eigen::Index>(p.equalities.size()), n);
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    for (const auto& t : p.equalities[i].lhs.terms) a(static_cast<Eigen::Index>(i), t.index) += t.coef;
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double nrm = a.row(i).norm();
    if (nrm == 0.0) {
      out.push_back("equality " + std::to_string(i) + " has no terms");
      return out;
    }
    a.row(i) /= nrm;
  }
  Eigen::ColPivHouseholderQR<RMat> qr(a.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < a.rows()) out.push_back("rank-deficient equalities");
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SymEntry {
  int p;
  int q;
  double v;  // A(p,q) = A(q,p) = v
};

struct BlockRow {
  int row = 0;
  std::vector<SymEntry> entries;
  RMat dense;  // materialized when entries are many
  bool is_dense = false;
  // Dense rows of low rank are also kept as U diag(s) U^T for the Schur
  // complement.
  RMat lr_u;
  RVec lr_s;
  bool low_rank = false;
};

template <class M>
double inner(const BlockRow& a, const M& y) {
  if (a.is_dense) return (a.dense.array() * y.array()).sum();
  double s = 0.0;
  for (const auto& e : a.entries) s += (e.p == e.q ? 1.0 : 2.0) * e.v * y(e.p, e.q);
  return s;
}

void add_scaled(const BlockRow& a, double c, RMat& y) {
  if (a.is_dense) {
    y.noalias() += c * a.dense;
    return;
  }
  for (const auto& e : a.entries) {
    y(e.p, e.q) += c * e.v;
    if (e.p != e.q) y(e.q, e.p) += c * e.v;
  }
}

// <A, W B W> for two sparse symmetric rows.
double sparse_pair(const BlockRow& a, const BlockRow& b, const RMat& w) {
  double s = 0.0;
  for (const auto& e : a.entries) {
    for (const auto& f : b.entries) {
      // A = v (e_p e_q^T + e_q e_p^T) off the diagonal, v e_p e_p^T on it.
      double t = w(e.q, f.p) * w(f.q, e.p);
      if (e.p != e.q) t += w(e.p, f.p) * w(f.q, e.q);
      if (f.p != f.q) {
        t += w(e.q, f.q) * w(f.p, e.p);
        if (e.p != e.q) t += w(e.p, f.q) * w(f.p, e.q);
      }
      s += e.v * f.v * t;
    }
  }
  return s;
}

// SVD of B = R^T L. Near the central path B is well conditioned even when X
// and S are not, so the eigendecomposition of B^T B is accurate and much
// cheaper than a Jacobi SVD; badly conditioned or tiny blocks take the SVD.
bool svd_of_product(const RMat& rl, RVec& sig, RMat& u, RMat& v) {
  const Eigen::Index d = rl.rows();
  if (d > 8) {
    Eigen::SelfAdjointEigenSolver<RMat> es(rl.transpose() * rl);
    if (es.info() == Eigen::Success && es.eigenvalues()(0) > 0.0) {
      const RVec ev = es.eigenvalues().reverse();
      if (ev(0) < 1e6 * ev(d - 1)) {
        sig = ev.cwiseSqrt();
        v = es.eigenvectors().rowwise().reverse();
        u = rl * v * sig.cwiseInverse().asDiagonal();
        return sig.allFinite();
      }
    }
  }
  Eigen::JacobiSVD<RMat> svd(rl, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sig = svd.singularValues();
  if (!(sig.minCoeff() > 0.0) || !sig.allFinite()) return false;
  u = svd.matrixU();
  v = svd.matrixV();
  return true;
}

struct LpColumn {
  std::vector<std::pair<int, double>> rows;
};

struct BlockScaling {
  RMat g;       // W = G G^T
  RMat g_inv_t; // G^{-T}
  RMat w;
  RVec lambda;  // scaled point
};

struct Direction {
  std::vector<RMat> dx, ds;      // unscaled
  std::vector<RMat> dx_s, ds_s;  // scaled
  RVec dxl, dsl, dxl_s, dsl_s;
  RVec dxf, dy;
};

class IpmSolver {
 public:
  IpmSolver(const ConicProblem& p, const SolveOptions& o) : prob_(p), opts_(o) { setup(); }
  ConicSolution run();

 private:
  void setup();
  RVec apply_a(const std::vector<RMat>& xs, const RVec& xl, const RVec& xf) const;
  void apply_at(const RVec& y, std::vector<RMat>& zs, RVec& zl, RVec& zf) const;
  bool compute_scaling();
  bool factor();
  bool solve_direction(const std::vector<RMat>& d_blocks, const RVec& d_lp, Direction& dir) const;
  double max_step_blocks(const std::vector<RMat>& scaled, const RVec& lp_scaled) const;
  ConicSolution finish(SolveStatus status, int iters);

  const ConicProblem& prob_;
  SolveOptions opts_;

  int nb_ = 0;
  std::vector<int> dims_;
  int m_ = 0;
  int nl_ = 0;  // nonneg incl. inequality slacks
  int nf_ = 0;
  int nu_ = 0;  // user nonneg count
  std::vector<std::vector<BlockRow>> block_rows_;
  // Per block: indices of the dense rows and their vectorized data, column j
  // holding rows[dense_idx_[b][j]].dense.
  std::vector<std::vector<int>> dense_idx_;
  std::vector<std::vector<int>> lowrank_idx_;
  std::vector<RMat> dense_vec_;
  std::vector<LpColumn> lp_cols_;
  RMat af_;  // m x nf
  std::vector<RMat> c_blocks_;
  RVec cl_, cf_, b_;
  RVec row_scale_;
  double c_norm_ = 0.0, b_norm_ = 0.0;

  // iterate
  std::vector<RMat> x_, s_;
  RVec xl_, sl_, xf_, y_;
  // residuals
  RVec rp_;
  std::vector<RMat> rd_;
  RVec rdl_, rf_;

  std::vector<BlockScaling> scal_;
  RVec wl_, lamb_l_;
  Eigen::LLT<RMat> llt_;
  Eigen::PartialPivLU<RMat> lu_;
  bool use_llt_ = true;
  double pobj_ = 0.0, dobj_ = 0.0, gap_ = 0.0, pinf_ = 0.0, dinf_ = 0.0;
};

void IpmSolver::setup() {
  const ConeSpec& s = prob_.spec;
  dims_ = s.psd_block_dims;
  nb_ = static_cast<int>(dims_.size());
  nu_ = s.nonneg_count;
  nl_ = nu_ + static_cast<int>(prob_.inequalities.size());
  nf_ = s.free_count;
  m_ = static_cast<int>(prob_.equalities.size() + prob_.inequalities.size());

  // Map flat index -> (block, p, q).
  std::vector<int> offset(nb_ + 1, 0);
  for (int b = 0; b < nb_; ++b) offset[b + 1] = offset[b] + s.block_size(b);
  std::vector<std::array<int, 3>> where(offset[nb_]);
  for (int b = 0; b < nb_; ++b) {
    int k = offset[b];
    for (int i = 0; i < dims_[b]; ++i)
      for (int j = i; j < dims_[b]; ++j) where[k++] = {b, i, j};
  }
  const int nl_off = s.nonneg_offset();
  const int nf_off = s.free_offset();

  block_rows_.assign(nb_, {});
  lp_cols_.assign(nl_, {});
  af_ = RMat::Zero(m_, nf_);
  b_ = RVec::Zero(m_);
  row_scale_ = RVec::Ones(m_);

  auto add_row = [&](int row, const LinearFunctional& f, double rhs, bool ineq) {
    // Row norm in the trace inner product (off-diagonal entries count twice at half weight).
    double nrm2 = ineq ? 1.0 : 0.0;
    for (const auto& t : f.terms) {
      if (t.index < nl_off) {
        const auto [b, p, q] = where[t.index];
        nrm2 += (p == q) ? t.coef * t.coef : 0.5 * t.coef * t.coef;
      } else {
        nrm2 += t.coef * t.coef;
      }
    }
    const double sc = nrm2 > 0.0 ? 1.0 / std::sqrt(nrm2) : 1.0;
    row_scale_(row) = sc;
    b_(row) = rhs * sc;
    std::vector<int> touched;
    std::vector<BlockRow*> brow(nb_, nullptr);
    for (const auto& t : f.terms) {
      const double c = t.coef * sc;
      if (t.index < nl_off) {
        const auto [b, p, q] = where[t.index];
        if (!brow[b]) {
          block_rows_[b].push_back(BlockRow{row, {}, {}, false, {}, {}});
          brow[b] = &block_rows_[b].back();
          touched.push_back(b);
        }
        brow[b]->entries.push_back({p, q, p == q ? c : 0.5 * c});
      } else if (t.index < nf_off) {
        lp_cols_[t.index - nl_off].rows.emplace_back(row, c);
      } else {
        af_(row, t.index - nf_off) += c;
      }
    }
    for (int b : touched) {
      BlockRow& br = block_rows_[b].back();
      if (static_cast<int>(br.entries.size()) > dims_[b]) {
        br.dense = RMat::Zero(dims_[b], dims_[b]);
        for (const auto& e : br.entries) {
          br.dense(e.p, e.q) += e.v;
          if (e.p != e.q) br.dense(e.q, e.p) += e.v;
        }
        br.is_dense = true;
      }
    }
  };
  int row = 0;
  for (const auto& c : prob_.equalities) add_row(row++, c.lhs, c.rhs, false);
  for (std::size_t i = 0; i < prob_.inequalities.size(); ++i) {
    const int r = row++;
    add_row(r, prob_.inequalities[i].lhs, prob_.inequalities[i].rhs, true);
    lp_cols_[nu_ + static_cast<int>(i)].rows.emplace_back(r, row_scale_(r));
  }
  dense_idx_.assign(nb_, {});
  lowrank_idx_.assign(nb_, {});
  dense_vec_.assign(nb_, RMat());
  for (int b = 0; b < nb_; ++b) {
    auto& rows = block_rows_[b];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      BlockRow& r = rows[i];
      if (!r.is_dense) continue;
      Eigen::SelfAdjointEigenSolver<RMat> es(r.dense);
      const RVec& ev = es.eigenvalues();
      const double cut = 1e-13 * std::max(1e-300, ev.cwiseAbs().maxCoeff());
      std::vector<Eigen::Index> keep;
      for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (std::abs(ev(k)) > cut) keep.push_back(k);
      if (4 * static_cast<int>(keep.size()) <= dims_[b]) {
        r.low_rank = true;
        r.lr_u.resize(dims_[b], static_cast<Eigen::Index>(keep.size()));
        r.lr_s.resize(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) {
          r.lr_u.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
          r.lr_s(static_cast<Eigen::Index>(k)) = ev(keep[k]);
        }
        lowrank_idx_[b].push_back(static_cast<int>(i));
      } else {
        dense_idx_[b].push_back(static_cast<int>(i));
      }
    }
    const Eigen::Index d2 = static_cast<Eigen::Index>(dims_[b]) * dims_[b];
    dense_vec_[b].resize(d2, static_cast<Eigen::Index>(dense_idx_[b].size()));
    for (std::size_t j = 0; j < dense_idx_[b].size(); ++j)
      dense_vec_[b].col(static_cast<Eigen::Index>(j)) = rows[dense_idx_[b][j]].dense.reshaped();
  }


  // Minimize c^T x with c = -objective.
  c_blocks_.assign(nb_, RMat());
  for (int b = 0; b < nb_; ++b) c_blocks_[b] = RMat::Zero(dims_[b], dims_[b]);
  cl_ = RVec::Zero(nl_);
  cf_ = RVec::Zero(nf_);
  for (const auto& t : prob_.objective.terms) {
    const double c = -t.coef;
    if (t.index < nl_off) {
      const auto [b, p, q] = where[t.index];
      if (p == q) {
        c_blocks_[b](p, p) += c;
      } else {
        c_blocks_[b](p, q) += 0.5 * c;
        c_blocks_[b](q, p) += 0.5 * c;
      }
    } else if (t.index < nf_off) {
      cl_(t.index - nl_off) += c;
    } else {
      cf_(t.index - nf_off) += c;
    }
  }
  double cn2 = cl_.squaredNorm() + cf_.squaredNorm();
  for (const auto& c : c_blocks_) cn2 += c.squaredNorm();
  c_norm_ = std::sqrt(cn2);
  b_norm_ = b_.norm();
}

RVec IpmSolver::apply_a(const std::vector<RMat>& xs, const RVec& xl, const RVec& xf) const {
  RVec out = RVec::Zero(m_);
  for (int b = 0; b < nb_; ++b)
    for (const auto& br : block_rows_[b]) out(br.row) += inner(br, xs[b]);
  for (int k = 0; k < nl_; ++k)
    for (const auto& [r, c] : lp_cols_[k].rows) out(r) += c * xl(k);
  if (nf_ > 0) out.noalias() += af_ * xf;
  return out;
}

void IpmSolver::apply_at(const RVec& y, std::vector<RMat>& zs, RVec& zl, RVec& zf) const {
  zs.resize(nb_);
  for (int b = 0; b < nb_; ++b) {
    zs[b] = RMat::Zero(dims_[b], dims_[b]);
    for (const auto& br : block_rows_[b]) add_scaled(br, y(br.row), zs[b]);
  }
  zl = RVec::Zero(nl_);
  for (int k = 0; k < nl_; ++k)
    for (const auto& [r, c] : lp_cols_[k].rows) zl(k) += c * y(r);
  zf = nf_ > 0 ? RVec(af_.transpose() * y) : RVec::Zero(0);
}

bool IpmSolver::compute_scaling() {
  scal_.resize(nb_);
  for (int b = 0; b < nb_; ++b) {
    Eigen::LLT<RMat> lx(x_[b]);
    Eigen::LLT<RMat> ls(s_[b]);
    if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
    const RMat l = lx.matrixL();
    const RMat r = ls.matrixL();
    const RMat rl = r.transpose() * l;
    RVec sig;
    RMat u, v;
    if (!svd_of_product(rl, sig, u, v)) return false;
    const RVec isq = sig.cwiseSqrt().cwiseInverse();
    BlockScaling& sc = scal_[b];
    sc.g = l * v * isq.asDiagonal();
    sc.g_inv_t = r * u * isq.asDiagonal();
    sc.w = sc.g * sc.g.transpose();
    sc.lambda = sig;
  }
  wl_ = (xl_.array() / sl_.array()).sqrt();
  lamb_l_ = (xl_.array() * sl_.array()).sqrt();
  return true;
}

bool IpmSolver::factor() {
  RMat mat = RMat::Zero(m_, m_);
  for (int b = 0; b < nb_; ++b) {
    const auto& rows = block_rows_[b];
    const RMat& w = scal_[b].w;
    const auto& didx = dense_idx_[b];
    const auto& lidx = lowrank_idx_[b];
    const RMat& avec = dense_vec_[b];
    const Eigen::Index d = w.rows();
    auto add = [&](const BlockRow& ri, const BlockRow& rj, double v) {
      mat(ri.row, rj.row) += v;
      if (&ri != &rj) mat(rj.row, ri.row) += v;
    };

    RMat tvec(avec.rows(), avec.cols());
    for (std::size_t k = 0; k < didx.size(); ++k) {
      const RMat& a = rows[didx[k]].dense;
      tvec.col(static_cast<Eigen::Index>(k)) = (w * a * w).reshaped();
    }
    auto tmat = [&](std::size_t k) {
      return Eigen::Map<const RMat>(tvec.col(static_cast<Eigen::Index>(k)).data(), d, d);
    };
    std::vector<RMat> pl(lidx.size());
    for (std::size_t k = 0; k < lidx.size(); ++k) pl[k] = w * rows[lidx[k]].lr_u;

    // full x full
    if (!didx.empty()) {
      const RMat dd = avec.transpose() * tvec;
      for (std::size_t i = 0; i < didx.size(); ++i)
        for (std::size_t j = i; j < didx.size(); ++j)
          add(rows[didx[i]], rows[didx[j]], 0.5 * (dd(i, j) + dd(j, i)));
    }
    // low-rank x (full, low-rank)
    for (std::size_t i = 0; i < lidx.size(); ++i) {
      const BlockRow& a = rows[lidx[i]];
      for (std::size_t k = 0; k < didx.size(); ++k) {
        const RMat ut = a.lr_u.transpose() * tmat(k) * a.lr_u;
        add(a, rows[didx[k]], ut.diagonal().dot(a.lr_s));
      }
      for (std::size_t j = i; j < lidx.size(); ++j) {
        const BlockRow& c = rows[lidx[j]];
        const RMat x = a.lr_u.transpose() * pl[j];
        add(a, c, a.lr_s.dot(x.cwiseAbs2() * c.lr_s));
      }
    }
    // sparse x everything
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const BlockRow& a = rows[i];
      if (a.is_dense) continue;
      for (std::size_t k = 0; k < didx.size(); ++k) add(a, rows[didx[k]], inner(a, tmat(k)));
      for (std::size_t k = 0; k < lidx.size(); ++k) {
        const BlockRow& c = rows[lidx[k]];
        double v = 0.0;
        for (const auto& e : a.entries) {
          const double pq = (pl[k].row(e.p).cwiseProduct(pl[k].row(e.q)) * c.lr_s)(0);
          v += (e.p == e.q ? 1.0 : 2.0) * e.v * pq;
        }
        add(a, c, v);
      }
      for (std::size_t j = i; j < rows.size(); ++j) {
        if (rows[j].is_dense) continue;
        add(a, rows[j], sparse_pair(a, rows[j], w));
      }
    }
  }
  for (int k = 0; k < nl_; ++k) {
    const double w2 = wl_(k) * wl_(k);
    const auto& col = lp_cols_[k].rows;
    for (const auto& [ri, ci] : col)
      for (const auto& [rj, cj] : col) mat(ri, rj) += w2 * ci * cj;
  }
  const double reg = 1e-14 * std::max(1.0, mat.diagonal().cwiseAbs().maxCoeff());
  mat.diagonal().array() += reg;
  if (nf_ == 0) {
    use_llt_ = true;
    llt_.compute(mat);
    if (llt_.info() == Eigen::Success) return true;
  }
  use_llt_ = false;
  RMat kkt = RMat::Zero(m_ + nf_, m_ + nf_);
  kkt.topLeftCorner(m_, m_) = mat;
  kkt.topRightCorner(m_, nf_) = af_;
  kkt.bottomLeftCorner(nf_, m_) = af_.transpose();
  kkt.bottomRightCorner(nf_, nf_).diagonal().setConstant(-reg);
  lu_.compute(kkt);
  return true;
}

// Given the scaled complementarity solutions D (per block) and d_lp, solve for
// the full Newton direction.
bool IpmSolver::solve_direction(const std::vector<RMat>& d_blocks, const RVec& d_lp,
                                Direction& dir) const {
  std::vector<RMat> z(nb_);
  for (int b = 0; b < nb_; ++b) {
    const BlockScaling& sc = scal_[b];
    z[b] = sc.g * d_blocks[b] * sc.g.transpose() - sc.w * rd_[b] * sc.w;
  }
  const RVec w2 = wl_.cwiseProduct(wl_);
  const RVec zl = wl_.cwiseProduct(d_lp) - w2.cwiseProduct(rdl_);
  const RVec rhs_y = rp_ - apply_a(z, zl, RVec::Zero(nf_));

  RVec sol;
  if (use_llt_) {
    sol = llt_.solve(rhs_y);
  } else {
    RVec rhs(m_ + nf_);
    rhs << rhs_y, rf_;
    sol = lu_.solve(rhs);
  }
  if (!sol.allFinite()) return false;
  dir.dy = sol.head(m_);
  dir.dxf = nf_ > 0 ? RVec(sol.tail(nf_)) : RVec::Zero(0);

  std::vector<RMat> aty;
  RVec atyl, atyf;
  apply_at(dir.dy, aty, atyl, atyf);
  dir.ds.resize(nb_);
  dir.dx.resize(nb_);
  dir.ds_s.resize(nb_);
  dir.dx_s.resize(nb_);
  for (int b = 0; b < nb_; ++b) {
    const BlockScaling& sc = scal_[b];
    dir.ds[b] = rd_[b] - aty[b];
    dir.ds_s[b] = sc.g.transpose() * dir.ds[b] * sc.g;
    dir.ds_s[b] = 0.5 * (dir.ds_s[b] + dir.ds_s[b].transpose()).eval();
    dir.dx_s[b] = d_blocks[b] - dir.ds_s[b];
    dir.dx[b] = sc.g * dir.dx_s[b] * sc.g.transpose();
    dir.dx[b] = 0.5 * (dir.dx[b] + dir.dx[b].transpose()).eval();
  }
  dir.dsl = rdl_ - atyl;
  dir.dsl_s = dir.dsl.cwiseProduct(wl_);
  dir.dxl_s = d_lp - dir.dsl_s;
  dir.dxl = dir.dxl_s.cwiseProduct(wl_);
  return true;
}

// Largest alpha with lambda + alpha * scaled >= 0 in every block.
double IpmSolver::max_step_blocks(const std::vector<RMat>& scaled, const RVec& lp_scaled) const {
  double alpha = kInf;
  for (int b = 0; b < nb_; ++b) {
    const RVec isq = scal_[b].lambda.cwiseSqrt().cwiseInverse();
    const RMat t = isq.asDiagonal() * scaled[b] * isq.asDiagonal();
    double emin;
    if (t.rows() == 1) {
      emin = t(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<RMat> es(t, Eigen::EigenvaluesOnly);
      emin = es.eigenvalues()(0);
    }
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  }
  for (int k = 0; k < nl_; ++k) {
    if (lp_scaled(k) < 0.0) alpha = std::min(alpha, -lamb_l_(k) / lp_scaled(k));
  }
  return alpha;
}

ConicSolution IpmSolver::run() {
  // Infeasible start: scaled identities (SDPT3-style balance of residual magnitudes).
  x_.resize(nb_);
  s_.resize(nb_);
  double max_b_ratio = 0.0;
  for (int i = 0; i < m_; ++i) max_b_ratio = std::max(max_b_ratio, 1.0 + std::abs(b_(i)));
  for (int b = 0; b < nb_; ++b) {
    const double n = dims_[b];
    double max_a = 0.0;
    for (const auto& br : block_rows_[b]) {
      RMat z = RMat::Zero(dims_[b], dims_[b]);
      add_scaled(br, 1.0, z);
      max_a = std::max(max_a, z.norm());
    }
    const double xi = std::max({10.0, std::sqrt(n), n * max_b_ratio / (1.0 + max_a)});
    const double eta = std::max({10.0, std::sqrt(n), max_a, c_blocks_[b].norm()});
    x_[b] = xi * RMat::Identity(dims_[b], dims_[b]);
    s_[b] = eta * RMat::Identity(dims_[b], dims_[b]);
  }
  {
    const double xi = std::max(10.0, max_b_ratio);
    const double eta = std::max(10.0, cl_.size() > 0 ? cl_.cwiseAbs().maxCoeff() : 0.0);
    xl_ = RVec::Constant(nl_, xi);
    sl_ = RVec::Constant(nl_, eta);
  }
  xf_ = RVec::Zero(nf_);
  y_ = RVec::Zero(m_);

  int nu = nl_;
  for (int d : dims_) nu += d;
  const double nu_d = std::max(1, nu);

  double best_rp = kInf;
  int rp_stall = 0;

  for (int iter = 0; iter <= opts_.max_iter; ++iter) {
    // Residuals and objectives.
    rp_ = b_ - apply_a(x_, xl_, xf_);
    std::vector<RMat> aty;
    RVec atyl, atyf;
    apply_at(y_, aty, atyl, atyf);
    rd_.resize(nb_);
    double rd2 = 0.0;
    double xs = 0.0;
    pobj_ = 0.0;
    for (int b = 0; b < nb_; ++b) {
      rd_[b] = c_blocks_[b] - aty[b] - s_[b];
      rd2 += rd_[b].squaredNorm();
      xs += (x_[b].array() * s_[b].array()).sum();
      pobj_ += (c_blocks_[b].array() * x_[b].array()).sum();
    }
    rdl_ = cl_ - atyl - sl_;
    rf_ = cf_ - atyf;
    rd2 += rdl_.squaredNorm() + rf_.squaredNorm();
    xs += xl_.dot(sl_);
    pobj_ += cl_.dot(xl_) + cf_.dot(xf_);
    dobj_ = b_.dot(y_);
    const double mu = xs / nu_d;
    pinf_ = rp_.norm() / (1.0 + b_norm_);
    dinf_ = std::sqrt(rd2) / (1.0 + c_norm_);
    gap_ = std::max(std::abs(pobj_ - dobj_), std::abs(xs)) / (1.0 + std::abs(pobj_) + std::abs(dobj_));

    const bool finite = std::isfinite(pobj_) && std::isfinite(dobj_) && std::isfinite(mu);
    if (!finite) return finish(SolveStatus::NumericalFailure, iter);
    if (gap_ <= opts_.gap_tol && pinf_ <= opts_.feas_tol && dinf_ <= opts_.feas_tol) {
      return finish(SolveStatus::Optimal, iter);
    }

    // Divergent dual objective with a stalled primal residual signals infeasibility.
    const double rp_norm = rp_.norm();
    if (rp_norm < 0.999 * best_rp) {
      best_rp = rp_norm;
      rp_stall = 0;
    } else {
      ++rp_stall;
    }
    if (dobj_ > opts_.divergence_threshold && rp_stall >= opts_.stall_window) {
      return finish(SolveStatus::Infeasible, iter);
    }
    if (iter == opts_.max_iter) break;

    if (!compute_scaling() || !factor()) return finish(SolveStatus::NumericalFailure, iter);

    // Predictor: D = -Lambda.
    std::vector<RMat> d_blocks(nb_);
    for (int b = 0; b < nb_; ++b) d_blocks[b] = -RMat(scal_[b].lambda.asDiagonal());
    RVec d_lp = -lamb_l_;
    Direction aff;
    if (!solve_direction(d_blocks, d_lp, aff)) return finish(SolveStatus::NumericalFailure, iter);
    const double ap_aff = std::min(1.0, max_step_blocks(aff.dx_s, aff.dxl_s));
    const double ad_aff = std::min(1.0, max_step_blocks(aff.ds_s, aff.dsl_s));
    double xs_aff = 0.0;
    for (int b = 0; b < nb_; ++b) {
      xs_aff += ((x_[b] + ap_aff * aff.dx[b]).array() * (s_[b] + ad_aff * aff.ds[b]).array()).sum();
    }
    xs_aff += (xl_ + ap_aff * aff.dxl).dot(sl_ + ad_aff * aff.dsl);
    const double mu_aff = std::max(0.0, xs_aff / nu_d);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector: Lambda D + D Lambda = 2 sigma mu I - 2 Lambda^2 - (dXa dSa + dSa dXa).
    for (int b = 0; b < nb_; ++b) {
      const RVec& lam = scal_[b].lambda;
      const RMat cross = aff.dx_s[b] * aff.ds_s[b];
      RMat rhs = -(cross + cross.transpose());
      for (int i = 0; i < dims_[b]; ++i) rhs(i, i) += 2.0 * sigma * mu - 2.0 * lam(i) * lam(i);
      for (int i = 0; i < dims_[b]; ++i)
        for (int j = 0; j < dims_[b]; ++j) rhs(i, j) /= (lam(i) + lam(j));
      d_blocks[b] = rhs;
    }
    d_lp = (RVec::Constant(nl_, sigma * mu) - lamb_l_.cwiseProduct(lamb_l_) -
            aff.dxl_s.cwiseProduct(aff.dsl_s))
               .cwiseQuotient(lamb_l_);
    Direction dir;
    if (!solve_direction(d_blocks, d_lp, dir)) return finish(SolveStatus::NumericalFailure, iter);
    const double ap = std::min(1.0, opts_.step_fraction * max_step_blocks(dir.dx_s, dir.dxl_s));
    const double ad = std::min(1.0, opts_.step_fraction * max_step_blocks(dir.ds_s, dir.dsl_s));
    if (!(ap > 0.0) || !(ad > 0.0)) return finish(SolveStatus::NumericalFailure, iter);

    for (int b = 0; b < nb_; ++b) {
      x_[b] += ap * dir.dx[b];
      s_[b] += ad * dir.ds[b];
    }
    xl_ += ap * dir.dxl;
    sl_ += ad * dir.dsl;
    xf_ += ap * dir.dxf;
    y_ += ad * dir.dy;
  }
  return finish(SolveStatus::MaxIter, opts_.max_iter);
}

ConicSolution IpmSolver::finish(SolveStatus status, int iters) {
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iters;
  const ConeSpec& s = prob_.spec;
  sol.x = RVec::Zero(s.total_dim());
  sol.psd_blocks = x_;
  int k = 0;
  for (int b = 0; b < nb_; ++b)
    for (int i = 0; i < dims_[b]; ++i)
      for (int j = i; j < dims_[b]; ++j) sol.x(k++) = x_[b](i, j);
  for (int i = 0; i < nu_; ++i) sol.x(s.nonneg_offset() + i) = xl_(i);
  for (int i = 0; i < nf_; ++i) sol.x(s.free_offset() + i) = xf_(i);

  // Undo row scaling; internal multipliers belong to the minimization of -objective.
  const RVec y = y_.cwiseProduct(row_scale_);
  const int neq = static_cast<int>(prob_.equalities.size());
  sol.eq_duals = -y.head(neq);
  sol.ineq_duals = -y.tail(m_ - neq);
  sol.primal_objective = -pobj_ + prob_.objective_offset;
  sol.dual_objective = -dobj_ + prob_.objective_offset;
  sol.duality_gap = gap_;
  sol.primal_residual = pinf_;
  sol.dual_residual = dinf_;
  return sol;
}

}  // namespace

ConicSolution solve(const ConicProblem& p, const SolveOptions& opts) {
  IpmSolver solver(p, opts);
  return solver.run();
}

}  // namespace irsrelay::conic
