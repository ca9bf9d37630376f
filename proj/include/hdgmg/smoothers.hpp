#pragma once

#include "hdgmg/linalg.hpp"
#include "hdgmg/mesh.hpp"

#include <string>
#include <vector>

namespace hdgmg {

enum class SmootherKind { vertex_wise, element_wise, jacobi, lt_vertex_wise, lt_element_wise, gauss_seidel };

inline constexpr SmootherKind kAllSmoothers[] = {SmootherKind::vertex_wise,    SmootherKind::element_wise,
                                                 SmootherKind::jacobi,         SmootherKind::lt_vertex_wise,
                                                 SmootherKind::lt_element_wise, SmootherKind::gauss_seidel};

std::string to_string(SmootherKind k);
SmootherKind parse_smoother(const std::string& s);
bool is_vanka(SmootherKind k);
bool is_lower_triangular(SmootherKind k);

struct VankaPatch {
  std::vector<int> dofs;  // in patch order (group, slot, k1, k2)
  Vector weights;         // 1 / multiplicity
  DenseLu<double> lu;     // full variants
  DenseMatrix lower;      // LT variants: lower triangle of K_i
};

struct VankaPatchSet {
  SmootherKind flavor = SmootherKind::vertex_wise;
  int size = 0;
  std::vector<VankaPatch> patches;

  /// sum_i V_i^T W_i K_i^{-1} V_i r
  Vector apply(const Vector& r) const;
  /// max over DOFs of |sum of weights - 1|
  double partition_defect() const;
};

/// Geometric patch membership, without factorizations.
std::vector<std::vector<int>> vanka_patch_dofs(const DofMap& dofs, SmootherKind flavor);

VankaPatchSet build_vanka_patches(const SparseMatrix& K, const DofMap& dofs, SmootherKind flavor);

class Smoother {
 public:
  Smoother(SmootherKind kind, const SparseMatrix& K, const DofMap& dofs, double omega);

  SmootherKind kind() const { return kind_; }
  double omega() const { return omega_; }
  int size() const { return size_; }
  const VankaPatchSet& patches() const { return vanka_; }

  /// M^{-1} r
  Vector precondition(const Vector& r) const;
  /// x <- x + omega M^{-1} (b - K x)
  void sweep(const SparseMatrix& K, Vector& x, const Vector& b) const;
  Vector apply_sweep(const SparseMatrix& K, const Vector& x, const Vector& b) const;

 private:
  SmootherKind kind_;
  double omega_;
  int size_;
  VankaPatchSet vanka_;
  Vector inv_diag_;
  SparseMatrix lower_;  // L + D for Gauss-Seidel
};

DenseMatrix error_propagation_matrix(const Smoother& s, const SparseMatrix& K);
/// Explicit M^{-1} (test sizes only).
DenseMatrix preconditioner_matrix(const Smoother& s);

}  // namespace hdgmg
