#include "hdgmg/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hdgmg {

namespace {

void check_pair(const DofMap& fine, const DofMap& coarse) {
  if (fine.method() != coarse.method() || fine.degree() != coarse.degree() ||
      fine.level().boundary != coarse.level().boundary || fine.n() != 2 * coarse.n()) {
    throw ValidationError("transfer: fine level is not the uniform refinement of the coarse level");
  }
}

SparseMatrix from_rows(int rows, int cols, const std::vector<std::map<int, double>>& data) {
  std::vector<Triplet> trip;
  for (int r = 0; r < rows; ++r)
    for (const auto& [c, v] : data[r]) trip.emplace_back(r, c, v);
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

void finish(LevelTransfer& t) {
  t.R = t.P.transpose();
  t.R.makeCompressed();
}

// Global facet DOF of node m (0..k) on the face (type, k1, k2). Faces run along x for X, along y for Y.
int facet_node(const DofMap& d, DofType type, int k1, int k2, int m) {
  const int k = d.degree();
  if (d.method() == Method::hdg) return d.find(type, k1, k2, m);
  if (m == 0) return d.find(DofType::N, k1, k2, 0);
  if (m == k) return type == DofType::X ? d.find(DofType::N, k1 + 1, k2, 0) : d.find(DofType::N, k1, k2 + 1, 0);
  return d.find(type, k1, k2, m - 1);
}

}  // namespace

std::vector<char> face_split(const DofMap& fine) {
  std::vector<char> out(fine.size());
  for (int d = 0; d < fine.size(); ++d) {
    DofEntry e = fine.entry(d);
    bool odd1 = e.k1 % 2 != 0, odd2 = e.k2 % 2 != 0;
    switch (e.type) {
      case DofType::N: out[d] = !(odd1 && odd2); break;
      case DofType::X: out[d] = !odd2; break;
      case DofType::Y: out[d] = !odd1; break;
      case DofType::C: out[d] = 0; break;
    }
  }
  return out;
}

SparseMatrix build_pb(const DofMap& fine, const DofMap& coarse, NodeFamily nodes) {
  check_pair(fine, coarse);
  const int k = fine.degree();
  const LagrangeBasis1D basis(lagrange_nodes(k, nodes));
  const Quadrature1D quad = gauss_legendre(k + 2);

  // Reference projection of the coarse face basis onto child c's basis.
  DenseMatrix mass = DenseMatrix::Zero(k + 1, k + 1);
  DenseMatrix g[2] = {DenseMatrix::Zero(k + 1, k + 1), DenseMatrix::Zero(k + 1, k + 1)};
  for (std::size_t q = 0; q < quad.points.size(); ++q) {
    const double t = quad.points[q], w = quad.weights[q];
    auto vf = basis.values(t);
    for (int c = 0; c < 2; ++c) {
      auto vc = basis.values(0.5 * (c + t));
      for (int i = 0; i <= k; ++i)
        for (int m = 0; m <= k; ++m) g[c](i, m) += w * vf[i] * vc[m];
    }
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j) mass(i, j) += w * vf[i] * vf[j];
  }
  DenseMatrix proj[2];
  for (int c = 0; c < 2; ++c) {
    proj[c] = mass.partialPivLu().solve(g[c]);
    for (Eigen::Index i = 0; i < proj[c].size(); ++i)
      if (std::abs(proj[c].data()[i]) < 1e-13) proj[c].data()[i] = 0.0;
  }

  std::vector<std::map<int, double>> rows(fine.size());
  std::vector<char> done(fine.size(), 0);
  const int nc = coarse.n();
  const int hi = coarse.periodic() ? nc - 1 : nc;
  for (DofType type : {DofType::X, DofType::Y}) {
    for (int a = 0; a < nc; ++a) {
      for (int b = 0; b <= hi; ++b) {
        // a runs along the face, b across
        const int I = type == DofType::X ? a : b;
        const int J = type == DofType::X ? b : a;
        std::vector<int> cdofs(k + 1);
        for (int m = 0; m <= k; ++m) cdofs[m] = facet_node(coarse, type, I, J, m);
        for (int c = 0; c < 2; ++c) {
          const int fi = type == DofType::X ? 2 * I + c : 2 * I;
          const int fj = type == DofType::X ? 2 * J : 2 * J + c;
          for (int i = 0; i <= k; ++i) {
            const int fd = facet_node(fine, type, fi, fj, i);
            if (fd < 0 || done[fd]) continue;
            done[fd] = 1;
            for (int m = 0; m <= k; ++m)
              if (cdofs[m] >= 0 && proj[c](i, m) != 0.0) rows[fd][cdofs[m]] += proj[c](i, m);
          }
        }
      }
    }
  }
  return from_rows(fine.size(), coarse.size(), rows);
}

LevelTransfer build_dtn_prolongation(const SparseMatrix& K, const DofMap& fine, const DofMap& coarse,
                                     const SparseMatrix& PB, const std::vector<char>& split) {
  check_pair(fine, coarse);
  if (K.rows() != fine.size() || PB.rows() != fine.size() || PB.cols() != coarse.size() ||
      static_cast<int>(split.size()) != fine.size()) {
    throw ValidationError("build_dtn_prolongation: dimension mismatch");
  }
  const int nc = coarse.n();
  // group I-DOFs by coarse element
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(nc) * nc);
  std::vector<int> owner(fine.size(), -1);
  for (int d = 0; d < fine.size(); ++d) {
    if (split[d]) continue;
    DofEntry e = fine.entry(d);
    int g = (e.k1 / 2) + nc * (e.k2 / 2);
    owner[d] = g;
    groups[g].push_back(d);
  }
  SparseMatrix kpb = (K * PB).pruned();

  std::vector<Triplet> trip;
  for (int r = 0; r < PB.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(PB, r); it; ++it) trip.emplace_back(r, it.col(), it.value());

  std::vector<int> local(fine.size(), -1);
  std::vector<int> ccol(coarse.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& ids = groups[g];
    if (ids.empty()) continue;
    const int m = static_cast<int>(ids.size());
    for (int a = 0; a < m; ++a) local[ids[a]] = a;
    DenseMatrix kii = DenseMatrix::Zero(m, m);
    std::vector<int> cols;
    for (int a = 0; a < m; ++a) {
      for (SparseMatrix::InnerIterator it(K, ids[a]); it; ++it) {
        int c = it.col();
        if (local[c] >= 0) kii(a, local[c]) = it.value();
        else if (owner[c] >= 0 && it.value() != 0.0)
          throw NumericalError("build_dtn_prolongation: interior DOFs of different coarse elements are coupled");
      }
      for (SparseMatrix::InnerIterator it(kpb, ids[a]); it; ++it)
        if (ccol[it.col()] < 0) {
          ccol[it.col()] = static_cast<int>(cols.size());
          cols.push_back(it.col());
        }
    }
    DenseMatrix rhs = DenseMatrix::Zero(m, cols.size());
    for (int a = 0; a < m; ++a)
      for (SparseMatrix::InnerIterator it(kpb, ids[a]); it; ++it) rhs(a, ccol[it.col()]) = it.value();
    DenseMatrix sol;
    try {
      sol = -DenseLu<double>(kii).solve(rhs);
    } catch (const NumericalError&) {
      throw NumericalError("build_dtn_prolongation: singular interior block on coarse element (" +
                           std::to_string(g % nc) + "," + std::to_string(g / nc) + ")");
    }
    for (int a = 0; a < m; ++a)
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (std::abs(sol(a, c)) > 1e-14) trip.emplace_back(ids[a], cols[c], sol(a, c));
    for (int d : ids) local[d] = -1;
    for (int c : cols) ccol[c] = -1;
  }

  LevelTransfer t;
  t.P.resize(fine.size(), coarse.size());
  t.P.setFromTriplets(trip.begin(), trip.end());
  t.P.makeCompressed();
  t.PB = PB;
  t.boundary = split;
  finish(t);
  return t;
}

LevelTransfer build_interpolation(const DofMap& fine, const DofMap& coarse, NodeFamily nodes) {
  check_pair(fine, coarse);
  const int k = fine.degree();
  const auto nd = lagrange_nodes(k, nodes);
  const LagrangeBasis1D basis(nd);
  std::vector<std::map<int, double>> rows(fine.size());
  for (int d = 0; d < fine.size(); ++d) {
    DofEntry e = fine.entry(d);
    double x = e.k1, y = e.k2;
    switch (e.type) {
      case DofType::N: break;
      case DofType::X: x += nd[e.slot + 1]; break;
      case DofType::Y: y += nd[e.slot + 1]; break;
      case DofType::C:
        x += nd[e.slot % (k - 1) + 1];
        y += nd[e.slot / (k - 1) + 1];
        break;
    }
    int I = static_cast<int>(std::floor(x / 2)), J = static_cast<int>(std::floor(y / 2));
    if (!coarse.periodic()) {
      I = std::min(I, coarse.n() - 1);
      J = std::min(J, coarse.n() - 1);
    }
    auto vu = basis.values((x - 2 * I) / 2);
    auto vv = basis.values((y - 2 * J) / 2);
    const auto cd = coarse.element_dofs(I, J);
    for (int b = 0; b <= k; ++b)
      for (int a = 0; a <= k; ++a) {
        int g = cd[b * (k + 1) + a];
        double v = vu[a] * vv[b];
        if (g >= 0 && std::abs(v) > 1e-14) rows[d][g] += v;
      }
  }
  LevelTransfer t;
  t.P = from_rows(fine.size(), coarse.size(), rows);
  t.boundary = face_split(fine);
  t.PB = t.P;
  for (int r = 0; r < t.PB.outerSize(); ++r)
    if (!t.boundary[r])
      for (SparseMatrix::InnerIterator it(t.PB, r); it; ++it) it.valueRef() = 0.0;
  t.PB = pruned(t.PB, 0.0);
  finish(t);
  return t;
}

LevelTransfer build_transfer(const SparseMatrix& K, const DofMap& fine, const DofMap& coarse, NodeFamily nodes) {
  if (fine.method() == Method::cg) return build_interpolation(fine, coarse, nodes);
  return build_dtn_prolongation(K, fine, coarse, build_pb(fine, coarse, nodes), face_split(fine));
}

SparseMatrix galerkin_coarse(const SparseMatrix& K, const LevelTransfer& t) {
  if (K.rows() != t.P.rows()) throw ValidationError("galerkin_coarse: dimension mismatch");
  SparseMatrix kp = K * t.P;
  SparseMatrix kh = t.R * kp;
  SparseMatrix kht = kh.transpose();
  SparseMatrix sym = 0.5 * (kh + kht);
  double tol = 1e-14 * max_abs(sym);
  return pruned(sym, tol);
}

}  // namespace hdgmg
