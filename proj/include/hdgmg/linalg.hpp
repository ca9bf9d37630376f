#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <string>

namespace hdgmg {

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Bad user input or violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Singular factorizations, non-convergence, divergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense LU with partial pivoting and an explicit singularity check.
template <typename Scalar>
class DenseLu {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DenseLu() = default;
  explicit DenseLu(const Matrix& a);

  Vec solve(const Vec& b) const { return lu_.solve(b); }
  Matrix solve(const Matrix& b) const { return lu_.solve(b); }
  Matrix inverse() const { return lu_.inverse(); }
  Eigen::Index size() const { return lu_.rows(); }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
};

extern template class DenseLu<double>;
extern template class DenseLu<std::complex<double>>;

Vector lu_solve(const DenseMatrix& a, const Vector& b);
ComplexVector lu_solve(const ComplexMatrix& a, const ComplexVector& b);

double spectral_radius(const ComplexMatrix& a);

/// Fill-reducing sparse LDLT for symmetric positive definite systems.
class SparseDirectSolver {
 public:
  explicit SparseDirectSolver(const SparseMatrix& a);
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  Vector solve(const Vector& b) const;
  Eigen::Index size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Eigen::Index n_ = 0;
};

Vector sparse_direct_solve(const SparseMatrix& a, const Vector& b);

double max_abs(const SparseMatrix& a);
double symmetry_defect(const SparseMatrix& a);

/// Drops |a_ij| <= tol and compresses.
SparseMatrix pruned(const SparseMatrix& a, double tol);

void write_matrix_market(const SparseMatrix& a, const std::string& path);

}  // namespace hdgmg
