#include "hdgmg/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hdgmg {

std::string to_string(CycleType c) {
  switch (c) {
    case CycleType::v: return "v";
    case CycleType::w: return "w";
    case CycleType::f: return "f";
  }
  return "?";
}

CycleType parse_cycle(const std::string& s) {
  if (s == "v" || s == "V") return CycleType::v;
  if (s == "w" || s == "W") return CycleType::w;
  if (s == "f" || s == "F") return CycleType::f;
  throw ValidationError("unknown cycle '" + s + "' (expected v, w or f)");
}

MgHierarchy::MgHierarchy(Method method, int degree, int n_finest, int levels, BoundaryMode mode,
                         const MultigridOptions& options, const DiscretizationOptions& disc)
    : options_(options) {
  auto meshes = build_hierarchy(n_finest, levels, mode);
  DofMap fine(meshes[0], method, degree);
  TraceSystem sys = assemble_operator(fine, disc);
  levels_.push_back(MgLevel{fine, std::move(sys.K), nullptr, std::nullopt});
  build(levels, disc.nodes);
}

MgHierarchy::MgHierarchy(DofMap finest, SparseMatrix K, int levels, const MultigridOptions& options, NodeFamily nodes)
    : options_(options) {
  build_hierarchy(finest.n(), levels, finest.level().boundary);
  if (K.rows() != finest.size()) throw ValidationError("multigrid: operator does not match dof map");
  levels_.push_back(MgLevel{std::move(finest), std::move(K), nullptr, std::nullopt});
  build(levels, nodes);
}

void MgHierarchy::build(int levels, NodeFamily nodes) {
  if (options_.nu1 < 0 || options_.nu2 < 0) throw ValidationError("multigrid: sweep counts must be >= 0");
  for (int l = 1; l < levels; ++l) {
    MgLevel& f = levels_.back();
    DofMap coarse(f.dofs.level().coarser(), f.dofs.method(), f.dofs.degree());
    f.transfer = build_transfer(f.K, f.dofs, coarse, nodes);
    SparseMatrix kh = galerkin_coarse(f.K, *f.transfer);
    levels_.push_back(MgLevel{std::move(coarse), std::move(kh), nullptr, std::nullopt});
  }
  set_smoother(options_.smoother, options_.omega);
  set_depth(levels);
}

void MgHierarchy::set_smoother(SmootherKind kind, double omega) {
  options_.smoother = kind;
  options_.omega = omega;
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l)
    levels_[l].smoother = std::make_unique<Smoother>(kind, levels_[l].K, levels_[l].dofs, omega);
}

void MgHierarchy::set_sweeps(int nu1, int nu2) {
  if (nu1 < 0 || nu2 < 0) throw ValidationError("multigrid: sweep counts must be >= 0");
  options_.nu1 = nu1;
  options_.nu2 = nu2;
}

void MgHierarchy::set_depth(int depth) {
  if (depth < 1 || depth > num_levels()) throw ValidationError("multigrid: invalid depth");
  if (depth == depth_ && coarse_) return;
  depth_ = depth;
  coarse_ = std::make_unique<SparseDirectSolver>(levels_[depth - 1].K);
}

void MgHierarchy::cycle(int l, Vector& x, const Vector& b, CycleType type) const {
  const int last = depth_ - 1;
  if (l == last) {
    x = coarse_->solve(b);
    return;
  }
  const MgLevel& lv = levels_[l];
  for (int s = 0; s < options_.nu1; ++s) lv.smoother->sweep(lv.K, x, b);
  Vector r = b - lv.K * x;
  Vector rc = lv.transfer->R * r;
  Vector xc = Vector::Zero(rc.size());
  if (l + 1 == last) {
    cycle(l + 1, xc, rc, type);
  } else if (type == CycleType::f) {
    cycle(l + 1, xc, rc, CycleType::f);
    cycle(l + 1, xc, rc, CycleType::v);
  } else {
    const int gamma = type == CycleType::w ? 2 : 1;
    for (int g = 0; g < gamma; ++g) cycle(l + 1, xc, rc, type);
  }
  x += lv.transfer->P * xc;
  for (int s = 0; s < options_.nu2; ++s) lv.smoother->sweep(lv.K, x, b);
}

DenseMatrix MgHierarchy::error_operator() const {
  const int n = levels_[0].dofs.size();
  if (n > 5000) throw ValidationError("error_operator: dimension too large");
  DenseMatrix e(n, n);
  Vector zero = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    Vector x = Vector::Zero(n);
    x[j] = 1.0;
    cycle(x, zero);
    e.col(j) = x;
  }
  return e;
}

Vector random_initial_guess(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector x(size);
  for (int i = 0; i < size; ++i) x[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 100.0;
  return x;
}

ConvergenceReport measure_rho(const MgHierarchy& mg, std::uint64_t seed, const MeasureOptions& opt) {
  const SparseMatrix& K = mg.level(0).K;
  const int n = static_cast<int>(K.rows());
  ConvergenceReport rep;
  rep.seed = seed;
  Vector b = Vector::Zero(n);
  Vector x = opt.zero_initial_guess ? Vector::Zero(n) : random_initial_guess(n, seed);
  double d0 = (b - K * x).norm();
  rep.residual_history.push_back(d0);
  if (d0 == 0.0) return rep;

  int stagnant = 0, growing = 0;
  for (int j = 1; j <= opt.max_iterations; ++j) {
    mg.cycle(x, b);
    double d = (b - K * x).norm();
    double prev = rep.residual_history.back();
    rep.residual_history.push_back(d);
    rep.iterations = j;
    if (!std::isfinite(d)) {
      rep.diverged = true;
      break;
    }
    double ratio = prev > 0.0 ? d / prev : 0.0;
    growing = ratio > 1.0 ? growing + 1 : 0;
    stagnant = (ratio > opt.stagnation_ratio && ratio <= 1.0) ? stagnant + 1 : 0;
    if (growing >= opt.divergence_steps) {
      rep.diverged = true;
      break;
    }
    if (d / d0 < opt.relative_tolerance) break;
    if (stagnant >= opt.stagnation_steps) {
      rep.stagnated = true;
      break;
    }
  }
  const auto& h = rep.residual_history;
  const int j = rep.iterations;
  if (j >= 1) {
    rep.rho_last = h[j - 1] > 0.0 ? h[j] / h[j - 1] : 0.0;
    rep.rho_geo = std::pow(h[j] / h[0], 1.0 / j);
  }
  // consecutive ratios alternating around their mean
  if (j >= 6) {
    std::vector<double> ratios;
    for (int i = j - 5; i <= j; ++i) ratios.push_back(h[i] / h[i - 1]);
    auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    rep.oscillating = (*hi - *lo) > 0.1 * std::max(rep.rho_geo, 1e-3);
  }
  return rep;
}

}  // namespace hdgmg
