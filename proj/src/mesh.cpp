#include "hdgmg/mesh.hpp"

#include "hdgmg/linalg.hpp"

namespace hdgmg {

std::string to_string(Method m) {
  switch (m) {
    case Method::cg: return "cg";
    case Method::edg: return "edg";
    case Method::hdg: return "hdg";
  }
  return "?";
}

std::string to_string(DofType t) {
  static const char* names[] = {"N", "X", "Y", "C"};
  return names[static_cast<int>(t)];
}

Method parse_method(const std::string& s) {
  if (s == "cg" || s == "CG") return Method::cg;
  if (s == "edg" || s == "EDG") return Method::edg;
  if (s == "hdg" || s == "HDG") return Method::hdg;
  throw ValidationError("unknown method '" + s + "' (expected cg, edg or hdg)");
}

std::array<int, 2> subgrid_shift(DofType t) {
  switch (t) {
    case DofType::N: return {0, 0};
    case DofType::X: return {1, 0};
    case DofType::Y: return {0, 1};
    case DofType::C: return {1, 1};
  }
  return {0, 0};
}

MeshLevel MeshLevel::make(int n, BoundaryMode mode) {
  if (n < 1) throw ValidationError("mesh: cells per side must be positive");
  return MeshLevel{n, 1.0 / n, mode};
}

MeshLevel MeshLevel::coarser() const {
  if (cells_per_side % 2 != 0) throw ValidationError("mesh: odd level cannot be coarsened");
  return make(cells_per_side / 2, boundary);
}

MeshLevel MeshLevel::finer() const { return make(2 * cells_per_side, boundary); }

std::vector<MeshLevel> build_hierarchy(int n_finest, int levels, BoundaryMode mode) {
  if (levels < 1) throw ValidationError("build_hierarchy: need at least one level");
  if (n_finest < 1) throw ValidationError("build_hierarchy: n must be positive");
  long factor = 1L << (levels - 1);
  if (n_finest % factor != 0) {
    throw ValidationError("build_hierarchy: n=" + std::to_string(n_finest) + " is not divisible by 2^(levels-1)=" +
                          std::to_string(factor));
  }
  if (n_finest / factor < 2 && levels > 1) {
    throw ValidationError("build_hierarchy: coarsest level would have fewer than 2 cells per side");
  }
  std::vector<MeshLevel> out;
  for (int m = 0; m < levels; ++m) out.push_back(MeshLevel::make(static_cast<int>(n_finest >> m), mode));
  return out;
}

DofMap::DofMap(const MeshLevel& level, Method method, int degree) : level_(level), method_(method), degree_(degree) {
  if (degree < 1) throw ValidationError("dof map: degree must be >= 1");
  const int k = degree;
  switch (method) {
    case Method::hdg: r_ = {0, k + 1, k + 1, 0}; break;
    case Method::edg: r_ = {1, k - 1, k - 1, 0}; break;
    case Method::cg: r_ = {1, k - 1, k - 1, (k - 1) * (k - 1)}; break;
  }
  const int n = level.cells_per_side;
  if (periodic()) {
    for (auto& r : range_) r = {0, n - 1, 0, n - 1};
  } else {
    range_[0] = {1, n - 1, 1, n - 1};  // N
    range_[1] = {0, n - 1, 1, n - 1};  // X: horizontal edges, interior rows
    range_[2] = {1, n - 1, 0, n - 1};  // Y: vertical edges, interior columns
    range_[3] = {0, n - 1, 0, n - 1};  // C
  }
  int off = 0;
  for (int t = 0; t < 4; ++t) {
    offset_[t] = off;
    group_size_[t] = 0;
    if (r_[t] > 0 && range_[t].hi1 >= range_[t].lo1 && range_[t].hi2 >= range_[t].lo2) group_size_[t] = r_[t] * range_[t].count();
    off += group_size_[t];
  }
  size_ = off;
}

int DofMap::find(DofType type, int k1, int k2, int slot) const {
  const int t = static_cast<int>(type);
  if (slot < 0 || slot >= r_[t]) return -1;
  const int n = level_.cells_per_side;
  if (periodic()) {
    k1 = ((k1 % n) + n) % n;
    k2 = ((k2 % n) + n) % n;
  }
  const Range& g = range_[t];
  if (k1 < g.lo1 || k1 > g.hi1 || k2 < g.lo2 || k2 > g.hi2) return -1;
  int n2 = g.hi2 - g.lo2 + 1;
  return offset_[t] + slot * g.count() + (k1 - g.lo1) * n2 + (k2 - g.lo2);
}

DofEntry DofMap::entry(int index) const {
  if (index < 0 || index >= size_) throw ValidationError("dof map: index out of range");
  int t = 3;
  while (t > 0 && (group_size_[t] == 0 || index < offset_[t])) --t;
  const Range& g = range_[t];
  int local = index - offset_[t];
  int slot = local / g.count();
  int pos = local % g.count();
  int n2 = g.hi2 - g.lo2 + 1;
  return DofEntry{index, static_cast<DofType>(t), slot, g.lo1 + pos / n2, g.lo2 + pos % n2};
}

std::vector<DofEntry> DofMap::entries() const {
  std::vector<DofEntry> out;
  out.reserve(size_);
  for (int i = 0; i < size_; ++i) out.push_back(entry(i));
  return out;
}

std::array<int, 2> DofMap::doubled_position(int index) const {
  DofEntry e = entry(index);
  auto s = subgrid_shift(e.type);
  return {2 * e.k1 + s[0], 2 * e.k2 + s[1]};
}

int DofMap::local_size() const {
  const int k = degree_;
  return method_ == Method::cg ? (k + 1) * (k + 1) : 4 * (k + 1);
}

std::vector<int> DofMap::element_dofs(int i, int j) const {
  const int k = degree_;
  std::vector<int> out;
  out.reserve(local_size());
  if (method_ == Method::hdg) {
    const std::array<std::array<int, 3>, 4> faces = {{{1, i, j}, {1, i, j + 1}, {2, i, j}, {2, i + 1, j}}};
    for (const auto& f : faces)
      for (int s = 0; s <= k; ++s) out.push_back(find(static_cast<DofType>(f[0]), f[1], f[2], s));
    return out;
  }
  if (method_ == Method::edg) {
    // face: type, k1, k2, start vertex, end vertex
    const std::array<std::array<int, 7>, 4> faces = {{{1, i, j, i, j, i + 1, j},
                                                      {1, i, j + 1, i, j + 1, i + 1, j + 1},
                                                      {2, i, j, i, j, i, j + 1},
                                                      {2, i + 1, j, i + 1, j, i + 1, j + 1}}};
    for (const auto& f : faces) {
      out.push_back(find(DofType::N, f[3], f[4], 0));
      for (int s = 0; s < k - 1; ++s) out.push_back(find(static_cast<DofType>(f[0]), f[1], f[2], s));
      out.push_back(find(DofType::N, f[5], f[6], 0));
    }
    return out;
  }
  for (int b = 0; b <= k; ++b) {
    for (int a = 0; a <= k; ++a) {
      bool ea = (a == 0 || a == k), eb = (b == 0 || b == k);
      if (ea && eb) out.push_back(find(DofType::N, i + a / k, j + b / k, 0));
      else if (eb) out.push_back(find(DofType::X, i, j + b / k, a - 1));
      else if (ea) out.push_back(find(DofType::Y, i + a / k, j, b - 1));
      else out.push_back(find(DofType::C, i, j, (a - 1) + (k - 1) * (b - 1)));
    }
  }
  return out;
}

}  // namespace hdgmg
