#pragma once

#include "hdgmg/basis.hpp"
#include "hdgmg/linalg.hpp"
#include "hdgmg/mesh.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace hdgmg {

/// Blocks of the element matrix. Interior index b*(k+1)+a; facet index face*(k+1)+node with
/// faces bottom, top, left, right and nodes ordered by increasing coordinate.
struct ElementMatrices {
  DenseMatrix A;          // interior x interior
  DenseMatrix B;          // facet x interior
  DenseMatrix C;          // facet x facet
  DenseMatrix stiffness;  // volume gradient term only (the CG element matrix)

  DenseMatrix condensed() const;
};

struct DiscretizationOptions {
  double penalty = 0.0;  // <= 0 selects 6k^2
  NodeFamily nodes = NodeFamily::equispaced;

  double penalty_for(int k) const { return penalty > 0.0 ? penalty : 6.0 * k * k; }
};

ElementMatrices local_bilinear(Method method, int k, double h, double alpha,
                               NodeFamily nodes = NodeFamily::equispaced);

struct PoissonProblem {
  std::function<double(double, double)> source;
  std::function<double(double, double)> exact;  // optional
};

struct TraceSystem {
  Method method = Method::hdg;
  int degree = 1;
  double penalty = 6.0;
  NodeFamily nodes = NodeFamily::equispaced;
  MeshLevel level;
  SparseMatrix K;
  Vector f;
  ElementMatrices element;
  std::shared_ptr<const DenseLu<double>> interior_solver;  // A_K, shared: all elements are congruent
  std::vector<Vector> interior_load;                       // G1 per element, index i + n*j
};

TraceSystem assemble_trace_system(const DofMap& dofs, const PoissonProblem& problem,
                                  const DiscretizationOptions& options = {});

/// Operator only (zero source).
TraceSystem assemble_operator(const DofMap& dofs, const DiscretizationOptions& options = {});

/// Interior nodal coefficients per element (index i + n*j). For CG these are the gathered nodal values.
std::vector<Vector> reconstruct_interior(const Vector& trace, const TraceSystem& system, const DofMap& dofs);

double l2_error(const std::vector<Vector>& interior, const TraceSystem& system,
                const std::function<double(double, double)>& exact);

/// Uncondensed system: unknowns [trace (dofs.size()); interior element by element].
struct BlockSystem {
  SparseMatrix matrix;
  Vector rhs;
  int trace_size = 0;
};

BlockSystem assemble_block_system(const DofMap& dofs, const PoissonProblem& problem,
                                  const DiscretizationOptions& options = {});

}  // namespace hdgmg
