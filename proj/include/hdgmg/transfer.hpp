#pragma once

#include "hdgmg/basis.hpp"
#include "hdgmg/linalg.hpp"
#include "hdgmg/mesh.hpp"

#include <vector>

namespace hdgmg {

struct LevelTransfer {
  SparseMatrix P;  // fine x coarse
  SparseMatrix R;  // P^T
  SparseMatrix PB;  // B rows of P, zero rows elsewhere
  std::vector<char> boundary;  // per fine DOF: 1 if on a coarse-element boundary face (F^B)
};

/// 1 for fine DOFs on coarse-element boundaries, 0 for DOFs interior to a coarse element.
std::vector<char> face_split(const DofMap& fine);

/// Face-wise L2 projection of coarse traces onto the fine B faces.
SparseMatrix build_pb(const DofMap& fine, const DofMap& coarse, NodeFamily nodes = NodeFamily::equispaced);

/// P = [-K_II^{-1} K_IB P_B; P_B] with the I-block solved per coarse element.
LevelTransfer build_dtn_prolongation(const SparseMatrix& K_fine, const DofMap& fine, const DofMap& coarse,
                                     const SparseMatrix& PB, const std::vector<char>& split);

/// Nested Q^k interpolation (CG).
LevelTransfer build_interpolation(const DofMap& fine, const DofMap& coarse, NodeFamily nodes = NodeFamily::equispaced);

/// Interpolation for CG, DtN otherwise.
LevelTransfer build_transfer(const SparseMatrix& K_fine, const DofMap& fine, const DofMap& coarse,
                             NodeFamily nodes = NodeFamily::equispaced);

SparseMatrix galerkin_coarse(const SparseMatrix& K_fine, const LevelTransfer& t);

}  // namespace hdgmg
