#include "hdgmg/smoothers.hpp"

#include <algorithm>
#include <tuple>

namespace hdgmg {

std::string to_string(SmootherKind k) {
  switch (k) {
    case SmootherKind::vertex_wise: return "vw";
    case SmootherKind::element_wise: return "ew";
    case SmootherKind::jacobi: return "jac";
    case SmootherKind::lt_vertex_wise: return "ltvw";
    case SmootherKind::lt_element_wise: return "ltew";
    case SmootherKind::gauss_seidel: return "gs";
  }
  return "?";
}

SmootherKind parse_smoother(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t == "vw" || t == "vertex" || t == "vertex_wise") return SmootherKind::vertex_wise;
  if (t == "ew" || t == "element" || t == "element_wise") return SmootherKind::element_wise;
  if (t == "jac" || t == "jacobi") return SmootherKind::jacobi;
  if (t == "ltvw" || t == "lt_vertex_wise") return SmootherKind::lt_vertex_wise;
  if (t == "ltew" || t == "lt_element_wise") return SmootherKind::lt_element_wise;
  if (t == "gs" || t == "gauss_seidel") return SmootherKind::gauss_seidel;
  throw ValidationError("unknown smoother '" + s + "' (expected vw, ew, jac, ltvw, ltew or gs)");
}

bool is_vanka(SmootherKind k) { return k != SmootherKind::jacobi && k != SmootherKind::gauss_seidel; }

bool is_lower_triangular(SmootherKind k) {
  return k == SmootherKind::lt_vertex_wise || k == SmootherKind::lt_element_wise;
}

std::vector<std::vector<int>> vanka_patch_dofs(const DofMap& dofs, SmootherKind flavor) {
  if (!is_vanka(flavor)) throw ValidationError("vanka_patch_dofs: not a Vanka flavor");
  const bool vertex = flavor == SmootherKind::vertex_wise || flavor == SmootherKind::lt_vertex_wise;
  const int n = dofs.n();
  using Key = std::tuple<int, int, int, int>;
  struct Member {
    Key key;
    int dof;
  };
  std::vector<std::vector<int>> out;
  std::vector<Member> members;

  auto add_all = [&](DofType t, int a, int b) {
    for (int s = 0; s < dofs.slots(t); ++s) {
      int d = dofs.find(t, a, b, s);
      if (d >= 0) members.push_back({Key{static_cast<int>(t), s, a, b}, d});
    }
  };
  auto finish = [&]() {
    std::sort(members.begin(), members.end(), [](const Member& x, const Member& y) { return x.key < y.key; });
    std::vector<int> ids;
    for (const auto& m : members)
      if (std::find(ids.begin(), ids.end(), m.dof) == ids.end()) ids.push_back(m.dof);
    if (!ids.empty()) out.push_back(std::move(ids));
    members.clear();
  };

  if (vertex) {
    const int hi = dofs.periodic() ? n - 1 : n;
    for (int i = 0; i <= hi; ++i)
      for (int j = 0; j <= hi; ++j) {
        add_all(DofType::N, i, j);
        add_all(DofType::X, i - 1, j);
        add_all(DofType::X, i, j);
        add_all(DofType::Y, i, j - 1);
        add_all(DofType::Y, i, j);
        add_all(DofType::C, i - 1, j - 1);
        add_all(DofType::C, i, j - 1);
        add_all(DofType::C, i - 1, j);
        add_all(DofType::C, i, j);
        finish();
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        add_all(DofType::N, i, j);
        add_all(DofType::N, i + 1, j);
        add_all(DofType::N, i, j + 1);
        add_all(DofType::N, i + 1, j + 1);
        add_all(DofType::X, i, j);
        add_all(DofType::X, i, j + 1);
        add_all(DofType::Y, i, j);
        add_all(DofType::Y, i + 1, j);
        add_all(DofType::C, i, j);
        finish();
      }
  }
  return out;
}

VankaPatchSet build_vanka_patches(const SparseMatrix& K, const DofMap& dofs, SmootherKind flavor) {
  if (K.rows() != dofs.size()) throw ValidationError("build_vanka_patches: operator does not match dof map");
  VankaPatchSet set;
  set.flavor = flavor;
  set.size = dofs.size();
  auto members = vanka_patch_dofs(dofs, flavor);

  std::vector<int> count(dofs.size(), 0);
  for (const auto& ids : members)
    for (int d : ids) ++count[d];
  for (int d = 0; d < dofs.size(); ++d)
    if (count[d] == 0) throw ValidationError("build_vanka_patches: DOF " + std::to_string(d) + " not covered");

  const bool lt = is_lower_triangular(flavor);
  std::vector<int> local(dofs.size(), -1);
  set.patches.reserve(members.size());
  for (auto& ids : members) {
    VankaPatch p;
    p.dofs = std::move(ids);
    const int m = static_cast<int>(p.dofs.size());
    p.weights.resize(m);
    for (int a = 0; a < m; ++a) {
      p.weights[a] = 1.0 / count[p.dofs[a]];
      local[p.dofs[a]] = a;
    }
    DenseMatrix ki = DenseMatrix::Zero(m, m);
    for (int a = 0; a < m; ++a)
      for (SparseMatrix::InnerIterator it(K, p.dofs[a]); it; ++it)
        if (local[it.col()] >= 0) ki(a, local[it.col()]) = it.value();
    for (int d : p.dofs) local[d] = -1;
    if (lt) {
      p.lower = ki.triangularView<Eigen::Lower>();
      for (int a = 0; a < m; ++a)
        if (!(std::abs(ki(a, a)) > 0.0)) throw NumericalError("build_vanka_patches: zero diagonal in patch");
    } else {
      p.lu = DenseLu<double>(ki);
    }
    set.patches.push_back(std::move(p));
  }
  return set;
}

Vector VankaPatchSet::apply(const Vector& r) const {
  Vector out = Vector::Zero(size);
  Vector local;
  const bool lt = is_lower_triangular(flavor);
  for (const auto& p : patches) {
    const int m = static_cast<int>(p.dofs.size());
    local.resize(m);
    for (int a = 0; a < m; ++a) local[a] = r[p.dofs[a]];
    if (lt) {
      p.lower.triangularView<Eigen::Lower>().solveInPlace(local);
    } else {
      local = p.lu.solve(local);
    }
    for (int a = 0; a < m; ++a) out[p.dofs[a]] += p.weights[a] * local[a];
  }
  return out;
}

double VankaPatchSet::partition_defect() const {
  Vector sum = Vector::Zero(size);
  for (const auto& p : patches)
    for (std::size_t a = 0; a < p.dofs.size(); ++a) sum[p.dofs[a]] += p.weights[a];
  return (sum.array() - 1.0).abs().maxCoeff();
}

Smoother::Smoother(SmootherKind kind, const SparseMatrix& K, const DofMap& dofs, double omega)
    : kind_(kind), omega_(omega), size_(static_cast<int>(K.rows())) {
  if (K.rows() != K.cols()) throw ValidationError("smoother: operator not square");
  if (is_vanka(kind)) {
    vanka_ = build_vanka_patches(K, dofs, kind);
  } else if (kind == SmootherKind::jacobi) {
    inv_diag_ = K.diagonal();
    for (int i = 0; i < size_; ++i) {
      if (inv_diag_[i] == 0.0) throw NumericalError("smoother: zero diagonal entry");
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
  } else {
    lower_ = K.triangularView<Eigen::Lower>();
    lower_.makeCompressed();
    for (int i = 0; i < size_; ++i)
      if (K.coeff(i, i) == 0.0) throw NumericalError("smoother: zero diagonal entry");
  }
}

Vector Smoother::precondition(const Vector& r) const {
  if (r.size() != size_) throw ValidationError("smoother: dimension mismatch");
  switch (kind_) {
    case SmootherKind::jacobi: return inv_diag_.cwiseProduct(r);
    case SmootherKind::gauss_seidel: {
      Vector out(size_);
      for (int i = 0; i < size_; ++i) {
        double s = r[i];
        double diag = 0.0;
        for (SparseMatrix::InnerIterator it(lower_, i); it; ++it) {
          if (it.col() < i) s -= it.value() * out[it.col()];
          else diag = it.value();
        }
        out[i] = s / diag;
      }
      return out;
    }
    default: return vanka_.apply(r);
  }
}

void Smoother::sweep(const SparseMatrix& K, Vector& x, const Vector& b) const {
  if (x.size() != size_ || b.size() != size_) throw ValidationError("smoother: dimension mismatch");
  Vector r = b - K * x;
  x += omega_ * precondition(r);
}

Vector Smoother::apply_sweep(const SparseMatrix& K, const Vector& x, const Vector& b) const {
  Vector y = x;
  sweep(K, y, b);
  return y;
}

DenseMatrix preconditioner_matrix(const Smoother& s) {
  if (s.size() > 5000) throw ValidationError("preconditioner_matrix: dimension too large");
  DenseMatrix m(s.size(), s.size());
  Vector e = Vector::Zero(s.size());
  for (int j = 0; j < s.size(); ++j) {
    e[j] = 1.0;
    m.col(j) = s.precondition(e);
    e[j] = 0.0;
  }
  return m;
}

DenseMatrix error_propagation_matrix(const Smoother& s, const SparseMatrix& K) {
  if (s.size() > 5000) throw ValidationError("error_propagation_matrix: dimension too large");
  DenseMatrix out(s.size(), s.size());
  Vector zero = Vector::Zero(s.size());
  Vector e = Vector::Zero(s.size());
  for (int j = 0; j < s.size(); ++j) {
    e[j] = 1.0;
    out.col(j) = s.apply_sweep(K, e, zero);
    e[j] = 0.0;
  }
  return out;
}

}  // namespace hdgmg
