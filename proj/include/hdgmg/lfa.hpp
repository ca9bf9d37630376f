#pragma once

#include "hdgmg/discretization.hpp"
#include "hdgmg/smoothers.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hdgmg {

struct SlotId {
  DofType type;
  int slot;
  std::string label() const;  // e.g. "X1"
  bool operator==(const SlotId&) const = default;
};

/// Slots in global order: N, X slots, Y slots, C slots.
std::vector<SlotId> slot_list(const DofMap& dofs);

struct StencilEntry {
  int row;  // target slot
  int col;  // source slot
  int dx2;  // doubled offset of the source relative to the target
  int dy2;
  double value;
};

class StencilSet {
 public:
  StencilSet() = default;
  StencilSet(std::vector<SlotId> slots, std::vector<StencilEntry> entries);

  const std::vector<SlotId>& slots() const { return slots_; }
  const std::vector<StencilEntry>& entries() const { return entries_; }
  int rank() const { return static_cast<int>(slots_.size()); }

  /// sum_kappa s_kappa exp(i theta . kappa)
  ComplexMatrix symbol(double theta1, double theta2) const;
  /// Lines "<alpha_i> <beta_j> <2*k1> <2*k2> <value>".
  std::string dump() const;
  int max_offset() const;

 private:
  std::vector<SlotId> slots_;
  std::vector<StencilEntry> entries_;  // sorted by (row, col, dx2, dy2)
};

using LinearMap = std::function<Vector(const Vector&)>;

/// Impulse responses at two reference positions of a periodic DofMap; throws if they disagree.
StencilSet extract_stencils(const LinearMap& op, const DofMap& dofs);
StencilSet extract_stencils(const SparseMatrix& op, const DofMap& dofs);
StencilSet extract_stencils(const DenseMatrix& op, const DofMap& dofs);

/// K^- for forward Gauss-Seidel: couplings to sources at or before the target in the global order.
StencilSet gauss_seidel_lower(const StencilSet& k);

struct ProlongationEntry {
  int fine_slot;
  int parity;  // c1 + 2*c2, parity of the fine lattice position
  int coarse_slot;
  int dx2;  // doubled fine-spacing offset of the coarse source relative to the fine target
  int dy2;
  double value;
};

class ProlongationStencil {
 public:
  ProlongationStencil() = default;
  ProlongationStencil(std::vector<SlotId> slots, std::vector<ProlongationEntry> entries);

  const std::vector<SlotId>& slots() const { return slots_; }
  const std::vector<ProlongationEntry>& entries() const { return entries_; }
  /// 4r x r, harmonic blocks in the order (0,0), (1,0), (0,1), (1,1).
  ComplexMatrix harmonic_symbol(double theta1, double theta2) const;

 private:
  std::vector<SlotId> slots_;
  std::vector<ProlongationEntry> entries_;
};

ProlongationStencil extract_prolongation(const SparseMatrix& P, const DofMap& fine, const DofMap& coarse);

inline constexpr std::array<std::array<int, 2>, 4> kHarmonics = {{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

struct LfaOptions {
  int periodic_n = 16;
  DiscretizationOptions disc;
};

struct LfaConfig {
  int samples = 32;
  double epsilon = 0.04908738521234052;  // pi/64
  int nu1 = 1;
  int nu2 = 0;

  std::vector<double> thetas() const;
};

struct HarmonicSymbol {
  ComplexMatrix K;   // 4r x 4r block diagonal
  ComplexMatrix MK;  // 4r x 4r block diagonal M~^{-1} K~
  ComplexMatrix P;   // 4r x r
  ComplexMatrix R;   // r x 4r
  ComplexMatrix KH;  // r x r at 2 theta
  ComplexMatrix cgc() const;  // I - P KH^{-1} R K
};

class LfaModel {
 public:
  /// Operator, Galerkin coarse operator and prolongation stencils of (method, k).
  static LfaModel build(Method method, int degree, const LfaOptions& options = {});

  /// Adds the smoother stencil. Returns a copy sharing the operator stencils.
  LfaModel with_smoother(SmootherKind kind) const;

  Method method() const { return method_; }
  int degree() const { return degree_; }
  int rank() const { return k_.rank(); }
  SmootherKind smoother() const { return kind_; }
  bool has_smoother() const { return has_smoother_; }

  const StencilSet& operator_stencil() const { return k_; }
  const StencilSet& coarse_stencil() const { return kh_; }
  const StencilSet& smoother_stencil() const { return m_; }
  const ProlongationStencil& prolongation() const { return p_; }

  /// M~^{-1}(theta)
  ComplexMatrix approximate_inverse(double t1, double t2) const;
  /// I - omega M~^{-1} K~
  ComplexMatrix smoother_symbol(double t1, double t2, double omega) const;
  HarmonicSymbol harmonic(double t1, double t2) const;
  ComplexMatrix two_grid_symbol(double t1, double t2, double omega, int nu1, int nu2) const;

 private:
  Method method_ = Method::hdg;
  int degree_ = 1;
  SmootherKind kind_ = SmootherKind::jacobi;
  bool has_smoother_ = false;
  StencilSet k_, kh_, m_;  // m_: M^{-1}, or K^- for Gauss-Seidel
  ProlongationStencil p_;
  LfaOptions options_;
};

struct RhoResult {
  double rho = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

RhoResult rho_asp(const LfaModel& model, const LfaConfig& config, double omega);

struct OmegaResult {
  double omega = 0.0;
  double rho = 0.0;
};

/// Precomputed coarse-grid correction and smoother parts over the sample grid.
class FrequencySweep {
 public:
  FrequencySweep(const LfaModel& model, const LfaConfig& config);

  int size() const { return static_cast<int>(theta_.size()); }
  RhoResult rho(double omega) const;
  double rho_at(int index, double omega) const;
  /// argmin over lo, lo+step, ..., hi; smallest omega on ties
  OmegaResult optimize(double lo, double hi, double step) const;

 private:
  int nu_;
  std::vector<std::array<double, 2>> theta_;
  std::vector<ComplexMatrix> c_;   // I - P KH^{-1} R K
  std::vector<ComplexMatrix> mk_;  // blockdiag M~^{-1} K~
};

OmegaResult optimize_omega(const LfaModel& model, const LfaConfig& config, double lo = 0.5, double hi = 1.6,
                           double step = 0.02);

}  // namespace hdgmg
