#include "hdgmg/linalg.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace hdgmg {

template <typename Scalar>
DenseLu<Scalar>::DenseLu(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ValidationError("lu: matrix must be square and non-empty");
  }
  lu_.compute(a);
  double amax = a.cwiseAbs().maxCoeff();
  const Matrix& f = lu_.matrixLU();
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    if (!(std::abs(f(i, i)) > 1e-14 * amax)) {
      std::ostringstream msg;
      msg << "lu: singular matrix (pivot " << std::abs(f(i, i)) << " at step " << i << ")";
      throw NumericalError(msg.str());
    }
  }
}

template class DenseLu<double>;
template class DenseLu<std::complex<double>>;

Vector lu_solve(const DenseMatrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw ValidationError("lu_solve: dimension mismatch");
  return DenseLu<double>(a).solve(b);
}

ComplexVector lu_solve(const ComplexMatrix& a, const ComplexVector& b) {
  if (a.rows() != b.size()) throw ValidationError("lu_solve: dimension mismatch");
  return DenseLu<std::complex<double>>(a).solve(b);
}

double spectral_radius(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("spectral_radius: matrix not square");
  if (a.rows() == 0) return 0.0;
  const lapack_int n = static_cast<lapack_int>(a.rows());
  ComplexMatrix work = a;
  std::vector<std::complex<double>> w(n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("spectral_radius: QR iteration did not converge (zgeev info " + std::to_string(info) + ")");
  double m = 0.0;
  for (const auto& z : w) m = std::max(m, std::abs(z));
  return m;
}

struct SparseDirectSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

SparseDirectSolver::SparseDirectSolver(const SparseMatrix& a) : impl_(std::make_unique<Impl>()), n_(a.rows()) {
  if (a.rows() != a.cols()) throw ValidationError("sparse_direct_solve: matrix not square");
  Eigen::SparseMatrix<double> col = a;
  impl_->ldlt.compute(col);
  if (impl_->ldlt.info() != Eigen::Success) throw NumericalError("sparse_direct_solve: factorization failed");
  const auto& d = impl_->ldlt.vectorD();
  if (d.size() > 0 && d.minCoeff() <= 0.0) throw NumericalError("sparse_direct_solve: matrix is not positive definite");
}

SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

Vector SparseDirectSolver::solve(const Vector& b) const {
  if (b.size() != n_) throw ValidationError("sparse_direct_solve: dimension mismatch");
  return impl_->ldlt.solve(b);
}

Vector sparse_direct_solve(const SparseMatrix& a, const Vector& b) { return SparseDirectSolver(a).solve(b); }

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double symmetry_defect(const SparseMatrix& a) {
  SparseMatrix t = a.transpose();
  SparseMatrix d = a - t;
  return max_abs(d);
}

SparseMatrix pruned(const SparseMatrix& a, double tol) {
  SparseMatrix out = a;
  out.prune([tol](int, int, double v) { return std::abs(v) > tol; });
  out.makeCompressed();
  return out;
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path);
  int nnz = 0;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() <= r) ++nnz;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.rows() << " " << a.cols() << " " << nnz << "\n";
  out.precision(17);
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() <= r) out << r + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

}  // namespace hdgmg
