#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irsrelay {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Symmetry tolerance for Hermitian checks, relative to max(1, max |a_ij|).
inline constexpr double kHermitianTol = 1e-12;
/// A matrix is PSD iff lambda_min >= -kPsdTol * max(1, max diagonal entry).
inline constexpr double kPsdTol = 1e-8;

class NonHermitianError : public std::invalid_argument {
 public:
  explicit NonHermitianError(const std::string& what) : std::invalid_argument(what) {}
};

class NoConvergenceError : public std::runtime_error {
 public:
  explicit NoConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Square complex matrix that is Hermitian within kHermitianTol and has a real diagonal.
class HermMat {
 public:
  HermMat() = default;

  /// Throws NonHermitianError if `a` is not square or not Hermitian.
  explicit HermMat(CMat a);

  /// Hermitian part (A + A^H)/2 of a square matrix; never throws for square input.
  static HermMat symmetrized(const CMat& a);
  static HermMat identity(Eigen::Index n);
  static HermMat zero(Eigen::Index n);
  /// x x^H
  static HermMat outer(const CVec& x);

  Eigen::Index dim() const { return m_.rows(); }
  const CMat& mat() const { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermMat operator+(const HermMat& o) const;
  HermMat operator-(const HermMat& o) const;
  HermMat operator*(double s) const;

 private:
  struct Unchecked {};
  HermMat(CMat a, Unchecked) : m_(std::move(a)) {}

  CMat m_;
};

/// Max elementwise |A - A^H|; +inf for non-square input.
double hermitian_deviation(const CMat& a);

struct HermEigen {
  RVec values;   // ascending
  CMat vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

HermEigen eig_hermitian(const HermMat& a);
double min_eigenvalue(const HermMat& a);
bool is_psd(const HermMat& a, double tol = kPsdTol);

/// [[Re A, -Im A], [Im A, Re A]]
RMat real_embedding(const HermMat& a);

/// Inverse of real_embedding for arbitrary symmetric X of even dimension:
/// returns the Hermitian H with tr(C H) = 1/2 tr(embed(C) X) for all Hermitian C.
/// PSD X maps to PSD H.
HermMat complex_from_embedding(const RMat& x);

/// Real trace inner product tr(A B) of two Hermitian matrices.
double trace_product(const HermMat& a, const HermMat& b);

}  // namespace irsrelay
