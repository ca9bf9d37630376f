#include "hdgmg/lfa.hpp"

#include "hdgmg/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace hdgmg {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

int wrap(int v, int period) {
  v %= period;
  if (v < 0) v += period;
  if (v > period / 2) v -= period;
  return v;
}

int slot_index(const DofMap& d, DofType t, int slot) {
  int base = 0;
  for (DofType u : kDofTypes) {
    if (u == t) return base + slot;
    base += d.slots(u);
  }
  return -1;
}

void require_periodic(const DofMap& d) {
  if (!d.periodic()) throw ValidationError("stencil extraction needs a periodic mesh");
  if (d.n() % 2 != 0 || d.n() < 4) throw ValidationError("stencil extraction needs an even periodic mesh with n >= 4");
}

using Response = std::map<std::tuple<int, int, int>, double>;  // (target slot, dx2, dy2)

Response impulse_response(const LinearMap& op, const DofMap& d, int p) {
  const int n = d.n();
  Vector e = Vector::Zero(d.size());
  e[p] = 1.0;
  Vector col = op(e);
  if (col.size() != d.size()) throw ValidationError("extract_stencils: operator dimension mismatch");
  const double tol = 1e-14 * std::max(1.0, col.cwiseAbs().maxCoeff());
  auto xp = d.doubled_position(p);
  Response out;
  for (int q = 0; q < d.size(); ++q) {
    if (std::abs(col[q]) <= tol) continue;
    DofEntry eq = d.entry(q);
    auto xq = d.doubled_position(q);
    int dx = wrap(xp[0] - xq[0], 2 * n), dy = wrap(xp[1] - xq[1], 2 * n);
    if (std::abs(dx) == n || std::abs(dy) == n)
      throw ValidationError("extract_stencils: stencil too wide for the periodic extraction mesh");
    out[{slot_index(d, eq.type, eq.slot), dx, dy}] += col[q];
  }
  return out;
}

double response_gap(const Response& a, const Response& b) {
  double gap = 0.0;
  for (const auto& [key, v] : a) {
    auto it = b.find(key);
    gap = std::max(gap, std::abs(v - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [key, v] : b)
    if (!a.count(key)) gap = std::max(gap, std::abs(v));
  return gap;
}

}  // namespace

std::string SlotId::label() const { return to_string(type) + std::to_string(slot + 1); }

std::vector<SlotId> slot_list(const DofMap& dofs) {
  std::vector<SlotId> out;
  for (DofType t : kDofTypes)
    for (int s = 0; s < dofs.slots(t); ++s) out.push_back({t, s});
  return out;
}

StencilSet::StencilSet(std::vector<SlotId> slots, std::vector<StencilEntry> entries)
    : slots_(std::move(slots)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const StencilEntry& a, const StencilEntry& b) {
    return std::tie(a.row, a.col, a.dx2, a.dy2) < std::tie(b.row, b.col, b.dx2, b.dy2);
  });
}

ComplexMatrix StencilSet::symbol(double t1, double t2) const {
  const int r = rank();
  ComplexMatrix s = ComplexMatrix::Zero(r, r);
  for (const auto& e : entries_) s(e.row, e.col) += e.value * std::polar(1.0, 0.5 * (t1 * e.dx2 + t2 * e.dy2));
  return s;
}

std::string StencilSet::dump() const {
  std::ostringstream out;
  char buf[64];
  for (const auto& e : entries_) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << slots_[e.row].label() << " " << slots_[e.col].label() << " " << e.dx2 << " " << e.dy2 << " " << buf << "\n";
  }
  return out.str();
}

int StencilSet::max_offset() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max({m, std::abs(e.dx2), std::abs(e.dy2)});
  return m;
}

StencilSet extract_stencils(const LinearMap& op, const DofMap& d) {
  require_periodic(d);
  const int c = d.n() / 2;
  auto slots = slot_list(d);
  std::vector<StencilEntry> entries;
  for (int b = 0; b < static_cast<int>(slots.size()); ++b) {
    Response first = impulse_response(op, d, d.find(slots[b].type, c, c, slots[b].slot));
    Response second = impulse_response(op, d, d.find(slots[b].type, c + 1, c + 1, slots[b].slot));
    double scale = 0.0;
    for (const auto& kv : first) scale = std::max(scale, std::abs(kv.second));
    if (response_gap(first, second) > 1e-12 * std::max(1.0, scale))
      throw NumericalError("extract_stencils: operator is not translation-invariant (slot " + slots[b].label() + ")");
    for (const auto& [key, v] : first) entries.push_back({std::get<0>(key), b, std::get<1>(key), std::get<2>(key), v});
  }
  return StencilSet(std::move(slots), std::move(entries));
}

StencilSet extract_stencils(const SparseMatrix& op, const DofMap& d) {
  return extract_stencils([&op](const Vector& x) { return Vector(op * x); }, d);
}

StencilSet extract_stencils(const DenseMatrix& op, const DofMap& d) {
  return extract_stencils([&op](const Vector& x) { return Vector(op * x); }, d);
}

StencilSet gauss_seidel_lower(const StencilSet& k) {
  const auto& slots = k.slots();
  std::vector<StencilEntry> lower;
  for (const auto& e : k.entries()) {
    const int ga = static_cast<int>(slots[e.row].type), gb = static_cast<int>(slots[e.col].type);
    bool before;
    if (gb != ga) {
      before = gb < ga;
    } else if (slots[e.col].slot != slots[e.row].slot) {
      before = slots[e.col].slot < slots[e.row].slot;
    } else {
      before = std::make_pair(e.dx2 / 2, e.dy2 / 2) <= std::make_pair(0, 0);
    }
    if (before) lower.push_back(e);
  }
  return StencilSet(slots, std::move(lower));
}

ProlongationStencil::ProlongationStencil(std::vector<SlotId> slots, std::vector<ProlongationEntry> entries)
    : slots_(std::move(slots)), entries_(std::move(entries)) {}

ComplexMatrix ProlongationStencil::harmonic_symbol(double t1, double t2) const {
  const int r = static_cast<int>(slots_.size());
  // f[parity](fine slot, coarse slot)
  ComplexMatrix f[4];
  for (auto& m : f) m = ComplexMatrix::Zero(r, r);
  for (const auto& e : entries_)
    f[e.parity](e.fine_slot, e.coarse_slot) += e.value * std::polar(1.0, 0.5 * (t1 * e.dx2 + t2 * e.dy2));
  ComplexMatrix out(4 * r, r);
  for (int h = 0; h < 4; ++h) {
    const auto& eta = kHarmonics[h];
    ComplexMatrix acc = ComplexMatrix::Zero(r, r);
    for (int p = 0; p < 4; ++p) {
      const int c1 = p % 2, c2 = p / 2;
      const double sign = ((eta[0] * c1 + eta[1] * c2) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * f[p];
    }
    acc *= 0.25;
    for (int a = 0; a < r; ++a) {
      auto s = subgrid_shift(slots_[a].type);
      cd phase = std::polar(1.0, -0.5 * kPi * (eta[0] * s[0] + eta[1] * s[1]));
      out.row(h * r + a) = phase * acc.row(a);
    }
  }
  return out;
}

ProlongationStencil extract_prolongation(const SparseMatrix& P, const DofMap& fine, const DofMap& coarse) {
  require_periodic(fine);
  require_periodic(coarse);
  if (fine.n() % 4 != 0) throw ValidationError("extract_prolongation: fine periodic mesh size must be a multiple of 4");
  if (P.rows() != fine.size() || P.cols() != coarse.size())
    throw ValidationError("extract_prolongation: dimension mismatch");
  const int n = fine.n();
  const int c = n / 2;
  auto slots = slot_list(fine);
  std::vector<ProlongationEntry> entries;

  auto row_response = [&](int q) {
    Response out;
    auto xq = fine.doubled_position(q);
    for (SparseMatrix::InnerIterator it(P, q); it; ++it) {
      if (std::abs(it.value()) <= 1e-14) continue;
      DofEntry e = coarse.entry(it.col());
      auto xc = coarse.doubled_position(it.col());
      int dx = wrap(2 * xc[0] - xq[0], 2 * n), dy = wrap(2 * xc[1] - xq[1], 2 * n);
      out[{slot_index(coarse, e.type, e.slot), dx, dy}] += it.value();
    }
    return out;
  };

  for (int a = 0; a < static_cast<int>(slots.size()); ++a)
    for (int p = 0; p < 4; ++p) {
      const int c1 = p % 2, c2 = p / 2;
      Response first = row_response(fine.find(slots[a].type, c + c1, c + c2, slots[a].slot));
      Response second = row_response(fine.find(slots[a].type, c + 2 + c1, c + 2 + c2, slots[a].slot));
      if (response_gap(first, second) > 1e-12)
        throw NumericalError("extract_prolongation: prolongation is not translation-invariant");
      for (const auto& [key, v] : first)
        entries.push_back({a, p, std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    }
  return ProlongationStencil(std::move(slots), std::move(entries));
}

std::vector<double> LfaConfig::thetas() const {
  if (samples < 1) throw ValidationError("lfa: need at least one sample per direction");
  if (!(epsilon > 0.0)) throw ValidationError("lfa: epsilon must be positive");
  const double lo = -kPi / 2 + epsilon, hi = kPi / 2 - epsilon;
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = samples == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (samples - 1);
  return t;
}

ComplexMatrix HarmonicSymbol::cgc() const {
  DenseLu<cd> lu;
  try {
    lu = DenseLu<cd>(KH);
  } catch (const NumericalError&) {
    throw NumericalError("two_grid_symbol: coarse symbol is singular at this frequency");
  }
  ComplexMatrix rk = R * K;
  return ComplexMatrix::Identity(K.rows(), K.cols()) - P * lu.solve(rk);
}

LfaModel LfaModel::build(Method method, int degree, const LfaOptions& options) {
  MeshLevel level = MeshLevel::make(options.periodic_n, BoundaryMode::periodic);
  DofMap fine(level, method, degree);
  DofMap coarse(level.coarser(), method, degree);
  TraceSystem sys = assemble_operator(fine, options.disc);
  LevelTransfer t = build_transfer(sys.K, fine, coarse, options.disc.nodes);
  SparseMatrix kh = galerkin_coarse(sys.K, t);

  LfaModel m;
  m.method_ = method;
  m.degree_ = degree;
  m.k_ = extract_stencils(sys.K, fine);
  m.kh_ = extract_stencils(kh, coarse);
  m.p_ = extract_prolongation(t.P, fine, coarse);
  m.options_ = options;
  return m;
}

LfaModel LfaModel::with_smoother(SmootherKind kind) const {
  LfaModel m = *this;
  m.kind_ = kind;
  m.has_smoother_ = true;
  if (kind == SmootherKind::gauss_seidel) {
    m.m_ = gauss_seidel_lower(k_);
    return m;
  }
  MeshLevel level = MeshLevel::make(options_.periodic_n, BoundaryMode::periodic);
  DofMap fine(level, method_, degree_);
  TraceSystem sys = assemble_operator(fine, options_.disc);
  Smoother s(kind, sys.K, fine, 1.0);
  m.m_ = extract_stencils([&s](const Vector& r) { return s.precondition(r); }, fine);
  return m;
}

ComplexMatrix LfaModel::approximate_inverse(double t1, double t2) const {
  if (!has_smoother_) throw ValidationError("lfa: model has no smoother");
  ComplexMatrix s = m_.symbol(t1, t2);
  if (kind_ == SmootherKind::gauss_seidel) return DenseLu<cd>(s).inverse();
  return s;
}

ComplexMatrix LfaModel::smoother_symbol(double t1, double t2, double omega) const {
  ComplexMatrix mk = approximate_inverse(t1, t2) * k_.symbol(t1, t2);
  return ComplexMatrix::Identity(rank(), rank()) - omega * mk;
}

HarmonicSymbol LfaModel::harmonic(double t1, double t2) const {
  const int r = rank();
  HarmonicSymbol h;
  h.K = ComplexMatrix::Zero(4 * r, 4 * r);
  h.MK = ComplexMatrix::Zero(4 * r, 4 * r);
  for (int e = 0; e < 4; ++e) {
    const double a = t1 + kPi * kHarmonics[e][0], b = t2 + kPi * kHarmonics[e][1];
    ComplexMatrix kt = k_.symbol(a, b);
    h.K.block(e * r, e * r, r, r) = kt;
    if (has_smoother_) h.MK.block(e * r, e * r, r, r) = approximate_inverse(a, b) * kt;
  }
  h.P = p_.harmonic_symbol(t1, t2);
  h.R = 4.0 * h.P.adjoint();
  h.KH = kh_.symbol(2 * t1, 2 * t2);
  return h;
}

ComplexMatrix LfaModel::two_grid_symbol(double t1, double t2, double omega, int nu1, int nu2) const {
  if (nu1 < 0 || nu2 < 0) throw ValidationError("lfa: sweep counts must be >= 0");
  HarmonicSymbol h = harmonic(t1, t2);
  ComplexMatrix e = h.cgc();
  if (nu1 + nu2 == 0) return e;
  ComplexMatrix s = ComplexMatrix::Identity(4 * rank(), 4 * rank()) - omega * h.MK;
  for (int i = 0; i < nu1; ++i) e = e * s;
  for (int i = 0; i < nu2; ++i) e = s * e;
  return e;
}

FrequencySweep::FrequencySweep(const LfaModel& model, const LfaConfig& config) : nu_(config.nu1 + config.nu2) {
  if (config.nu1 < 0 || config.nu2 < 0) throw ValidationError("lfa: sweep counts must be >= 0");
  if (nu_ > 0 && !model.has_smoother()) throw ValidationError("lfa: model has no smoother");
  const auto t = config.thetas();
  for (double a : t)
    for (double b : t) {
      HarmonicSymbol h = model.harmonic(a, b);
      theta_.push_back({a, b});
      ComplexMatrix c = h.cgc();
      if (nu_ == 1) {
        mk_.push_back(c * h.MK);
      } else if (nu_ > 1) {
        mk_.push_back(h.MK);
      }
      c_.push_back(std::move(c));
    }
}

double FrequencySweep::rho_at(int i, double omega) const {
  // rho(S^nu2 C S^nu1) = rho(C S^(nu1+nu2))
  if (nu_ == 0) return spectral_radius(c_[i]);
  if (nu_ == 1) return spectral_radius(c_[i] - omega * mk_[i]);
  const int n = static_cast<int>(c_[i].rows());
  ComplexMatrix s = ComplexMatrix::Identity(n, n) - omega * mk_[i];
  ComplexMatrix e = c_[i];
  for (int k = 0; k < nu_; ++k) e = e * s;
  return spectral_radius(e);
}

RhoResult FrequencySweep::rho(double omega) const {
  RhoResult best;
  best.rho = -1.0;
  for (int i = 0; i < size(); ++i) {
    double v = rho_at(i, omega);
    if (v > best.rho) best = {v, theta_[i][0], theta_[i][1]};
  }
  return best;
}

OmegaResult FrequencySweep::optimize(double lo, double hi, double step) const {
  if (!(step > 0.0)) throw ValidationError("optimize_omega: step must be positive");
  if (!(lo > 0.0 && hi < 2.0 && lo <= hi)) throw ValidationError("optimize_omega: range must lie in (0, 2)");
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  auto omega_at = [&](int i) { return lo + step * i; };

  // Lower bounds from a coarse subset of frequencies.
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size()))));
  const int stride = std::max(1, m / 8);
  std::vector<int> subset;
  for (int a = stride / 2; a < m; a += stride)
    for (int b = stride / 2; b < m; b += stride) subset.push_back(a * m + b);
  std::vector<double> bound(count, 0.0);
  for (int i = 0; i < count; ++i)
    for (int t : subset) bound[i] = std::max(bound[i], rho_at(t, omega_at(i)));

  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return bound[a] < bound[b]; });

  double best = std::numeric_limits<double>::infinity();
  int best_i = -1;
  std::vector<int> hot;
  auto loses = [&](double v, int i) { return v > best || (v == best && i > best_i); };
  for (int i : order) {
    if (bound[i] > best) break;
    const double w = omega_at(i);
    double running = 0.0;
    bool aborted = false;
    auto visit = [&](int t) {
      running = std::max(running, rho_at(t, w));
      if (loses(running, i)) {
        aborted = true;
        if (std::find(hot.begin(), hot.end(), t) == hot.end()) {
          hot.insert(hot.begin(), t);
          if (hot.size() > 8) hot.pop_back();
        }
      }
    };
    for (int t : std::vector<int>(hot)) {
      visit(t);
      if (aborted) break;
    }
    for (int t = 0; t < size() && !aborted; ++t) visit(t);
    if (aborted) continue;
    best = running;
    best_i = i;
  }
  return {omega_at(best_i), best};
}

RhoResult rho_asp(const LfaModel& model, const LfaConfig& config, double omega) {
  return FrequencySweep(model, config).rho(omega);
}

OmegaResult optimize_omega(const LfaModel& model, const LfaConfig& config, double lo, double hi, double step) {
  return FrequencySweep(model, config).optimize(lo, hi, step);
}

}  // namespace hdgmg
