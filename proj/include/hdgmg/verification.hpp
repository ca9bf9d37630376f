#pragma once

#include "hdgmg/lfa.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hdgmg {

struct CheckResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return error <= tolerance; }
};

/// K_h applied to sampled Fourier modes vs the symbol, over all lattice frequencies of a periodic n mesh.
CheckResult check_fourier_modes(Method m, int k, int n = 16, int vectors = 10, std::uint64_t seed = 7);
/// K~(theta + 2 pi eta) = D_eta K~(theta) D_eta^{-1}
CheckResult check_aliasing_signs(Method m, int k, int samples = 20, std::uint64_t seed = 11);
/// v^T K_H v = (Pv)^T K_h (Pv)
CheckResult check_energy_identity(Method m, int k, int n = 8, int vectors = 20, std::uint64_t seed = 13);
/// condensed solve vs block solve on a 4x4 mesh
CheckResult check_schur_equivalence(Method m, int k);
/// sum_i V_i^T W_i V_i = I
CheckResult check_partition_of_unity(Method m, int k, SmootherKind flavor);
/// (I - P K_H^{-1} R K)^2 = (I - P K_H^{-1} R K) on a 4x4 mesh
CheckResult check_cgc_idempotent_mesh(Method m, int k);
/// same in symbol space over a sample grid
CheckResult check_cgc_idempotent_symbol(Method m, int k, int samples = 8);
/// two-grid symbol vs the dense periodic two-level operator on the harmonic subspaces
CheckResult check_two_grid_oracle(Method m, int k, SmootherKind s, double omega, int n = 8);

std::vector<CheckResult> run_property_suites();

}  // namespace hdgmg
