#pragma once

#include "hdgmg/discretization.hpp"
#include "hdgmg/smoothers.hpp"
#include "hdgmg/transfer.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace hdgmg {

enum class CycleType { v, w, f };

std::string to_string(CycleType c);
CycleType parse_cycle(const std::string& s);

struct MultigridOptions {
  SmootherKind smoother = SmootherKind::vertex_wise;
  double omega = 1.0;
  int nu1 = 1;
  int nu2 = 0;
  CycleType cycle = CycleType::v;
};

struct MgLevel {
  DofMap dofs;
  SparseMatrix K;
  std::unique_ptr<Smoother> smoother;
  std::optional<LevelTransfer> transfer;  // to the next coarser level
};

class MgHierarchy {
 public:
  /// Rediscretizes on the finest level only; coarse operators are Galerkin.
  MgHierarchy(Method method, int degree, int n_finest, int levels, BoundaryMode mode, const MultigridOptions& options,
              const DiscretizationOptions& disc = {});
  MgHierarchy(DofMap finest, SparseMatrix K, int levels, const MultigridOptions& options,
              NodeFamily nodes = NodeFamily::equispaced);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MgLevel& level(int l) const { return levels_.at(l); }
  const MultigridOptions& options() const { return options_; }

  /// Changes smoothing parameters and rebuilds the smoothers; transfers are kept.
  void set_smoother(SmootherKind kind, double omega);
  void set_sweeps(int nu1, int nu2);
  void set_cycle(CycleType c) { options_.cycle = c; }
  /// Use only the first `depth` levels, with a direct solve on level depth-1. depth=2 is the two-grid method.
  void set_depth(int depth);
  int depth() const { return depth_; }

  void cycle(Vector& x, const Vector& b) const { cycle(0, x, b, options_.cycle); }
  void cycle(int level, Vector& x, const Vector& b, CycleType type) const;

  /// Dense error operator of one cycle, by column probes (test sizes only).
  DenseMatrix error_operator() const;

 private:
  void build(int levels, NodeFamily nodes);
  void factor_coarsest();

  MultigridOptions options_;
  std::vector<MgLevel> levels_;
  int depth_ = 0;
  std::unique_ptr<SparseDirectSolver> coarse_;
};

struct MeasureOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-14;
  double stagnation_ratio = 0.999;
  int stagnation_steps = 5;
  int divergence_steps = 10;
  bool zero_initial_guess = false;
};

struct ConvergenceReport {
  std::vector<double> residual_history;
  double rho_last = 0.0;
  double rho_geo = 0.0;
  int iterations = 0;
  bool diverged = false;
  bool stagnated = false;
  bool oscillating = false;
  std::uint64_t seed = 0;
};

/// Uniform [0, 100) components from a seeded 64-bit Mersenne twister.
Vector random_initial_guess(int size, std::uint64_t seed);

ConvergenceReport measure_rho(const MgHierarchy& mg, std::uint64_t seed, const MeasureOptions& options = {});

}  // namespace hdgmg
