#include "irsrelay/matrix_core.hpp"

#include <cmath>
#include <limits>

namespace irsrelay {

double hermitian_deviation(const CMat& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

HermMat::HermMat(CMat a) : m_(std::move(a)) {
  if (m_.rows() != m_.cols()) {
    throw NonHermitianError("HermMat: matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()) + ", not square");
  }
  if (!m_.allFinite()) throw NonHermitianError("HermMat: non-finite entry");
  if (m_.size() == 0) return;
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double dev = hermitian_deviation(m_);
  if (dev > kHermitianTol * scale) {
    throw NonHermitianError("HermMat: max |A - A^H| = " + std::to_string(dev));
  }
  // Clean rounding-level asymmetry so downstream kernels see an exact Hermitian.
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
}

HermMat HermMat::symmetrized(const CMat& a) {
  if (a.rows() != a.cols()) throw NonHermitianError("HermMat::symmetrized: not square");
  return HermMat((0.5 * (a + a.adjoint())).eval(), Unchecked{});
}

HermMat HermMat::identity(Eigen::Index n) { return HermMat(CMat::Identity(n, n), Unchecked{}); }

HermMat HermMat::zero(Eigen::Index n) { return HermMat(CMat::Zero(n, n), Unchecked{}); }

HermMat HermMat::outer(const CVec& x) { return symmetrized(x * x.adjoint()); }

HermMat HermMat::operator+(const HermMat& o) const { return HermMat(m_ + o.m_, Unchecked{}); }

HermMat HermMat::operator-(const HermMat& o) const { return HermMat(m_ - o.m_, Unchecked{}); }

HermMat HermMat::operator*(double s) const { return HermMat(m_ * s, Unchecked{}); }

HermEigen eig_hermitian(const HermMat& a) {
  if (a.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw NoConvergenceError("eig_hermitian: QR iteration did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const HermMat& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NoConvergenceError("min_eigenvalue: QR iteration did not converge");
  }
  return es.eigenvalues()(0);
}

bool is_psd(const HermMat& a, double tol) {
  if (a.dim() == 0) return true;
  const double scale = std::max(1.0, a.mat().diagonal().real().maxCoeff());
  return min_eigenvalue(a) >= -tol * scale;
}

RMat real_embedding(const HermMat& a) {
  const Eigen::Index n = a.dim();
  RMat out(2 * n, 2 * n);
  const RMat re = a.mat().real();
  const RMat im = a.mat().imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return out;
}

HermMat complex_from_embedding(const RMat& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0) {
    throw NonHermitianError("complex_from_embedding: expected square matrix of even dimension");
  }
  const Eigen::Index n = x.rows() / 2;
  const RMat re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  const RMat im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  CMat h(n, n);
  h.real() = re;
  h.imag() = im;
  return HermMat::symmetrized(h);
}

double trace_product(const HermMat& a, const HermMat& b) {
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.mat().array() * b.mat().conjugate().array()).sum().real();
}

}  // namespace irsrelay
