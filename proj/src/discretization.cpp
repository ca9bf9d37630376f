#include "hdgmg/discretization.hpp"

#include <cmath>
#include <sstream>

namespace hdgmg {

DenseMatrix ElementMatrices::condensed() const { return C - B * A.partialPivLu().solve(B.transpose()); }

ElementMatrices local_bilinear(Method method, int k, double h, double alpha, NodeFamily nodes) {
  if (k < 1) throw ValidationError("local_bilinear: degree must be >= 1");
  if (!(h > 0.0)) throw ValidationError("local_bilinear: spacing must be positive");
  if (!(alpha > 0.0)) throw ValidationError("local_bilinear: penalty must be positive");
  (void)method;

  const LagrangeBasis1D basis(lagrange_nodes(k, nodes));
  const Quadrature1D quad = gauss_legendre(k + 2);
  const int nq = static_cast<int>(quad.points.size());
  const int nf = k + 1;
  const int ni = nf * nf;
  const int nt = ni + 4 * nf;
  const double hk = h;

  std::vector<std::vector<double>> v(nq), d(nq);
  for (int q = 0; q < nq; ++q) {
    v[q] = basis.values(quad.points[q]);
    d[q] = basis.derivatives(quad.points[q]);
  }

  DenseMatrix m = DenseMatrix::Zero(nt, nt);
  Vector gx(ni), gy(ni);
  for (int qa = 0; qa < nq; ++qa) {
    for (int qb = 0; qb < nq; ++qb) {
      const double w = quad.weights[qa] * quad.weights[qb] * h * h;
      for (int b = 0; b < nf; ++b)
        for (int a = 0; a < nf; ++a) {
          gx[b * nf + a] = v[qb][b] * d[qa][a] / h;
          gy[b * nf + a] = d[qb][b] * v[qa][a] / h;
        }
      m.topLeftCorner(ni, ni) += w * (gx * gx.transpose() + gy * gy.transpose());
    }
  }
  DenseMatrix stiffness = m.topLeftCorner(ni, ni);

  const std::vector<double> end_v[2] = {basis.values(0.0), basis.values(1.0)};
  const std::vector<double> end_d[2] = {basis.derivatives(0.0), basis.derivatives(1.0)};
  Vector jump(nt), dn(nt);
  for (int f = 0; f < 4; ++f) {
    const int side = f % 2;  // 0: coordinate 0, 1: coordinate 1
    const double sign = side == 0 ? -1.0 : 1.0;
    const bool horizontal = f < 2;
    for (int q = 0; q < nq; ++q) {
      const double w = quad.weights[q] * h;
      jump.setZero();
      dn.setZero();
      for (int b = 0; b < nf; ++b)
        for (int a = 0; a < nf; ++a) {
          if (horizontal) {
            jump[b * nf + a] = end_v[side][b] * v[q][a];
            dn[b * nf + a] = sign * end_d[side][b] * v[q][a] / h;
          } else {
            jump[b * nf + a] = v[q][b] * end_v[side][a];
            dn[b * nf + a] = sign * v[q][b] * end_d[side][a] / h;
          }
        }
      for (int node = 0; node < nf; ++node) jump[ni + f * nf + node] = -v[q][node];
      m += w * (alpha / hk * jump * jump.transpose() - dn * jump.transpose() - jump * dn.transpose());
    }
  }

  ElementMatrices e;
  e.A = m.topLeftCorner(ni, ni);
  e.B = m.bottomLeftCorner(4 * nf, ni);
  e.C = m.bottomRightCorner(4 * nf, 4 * nf);
  e.stiffness = stiffness;
  return e;
}

namespace {

// Loads int_K f phi_i for the (k+1)^2 volume basis.
Vector volume_load(const std::function<double(double, double)>& f, int k, NodeFamily nodes, double h, double x0,
                   double y0) {
  const LagrangeBasis1D basis(lagrange_nodes(k, nodes));
  const Quadrature1D quad = gauss_legendre(k + 4);
  const int nf = k + 1;
  Vector g = Vector::Zero(nf * nf);
  for (std::size_t qa = 0; qa < quad.points.size(); ++qa)
    for (std::size_t qb = 0; qb < quad.points.size(); ++qb) {
      const double w = quad.weights[qa] * quad.weights[qb] * h * h;
      const double fv = f(x0 + h * quad.points[qa], y0 + h * quad.points[qb]);
      if (fv == 0.0) continue;
      auto va = basis.values(quad.points[qa]);
      auto vb = basis.values(quad.points[qb]);
      for (int b = 0; b < nf; ++b)
        for (int a = 0; a < nf; ++a) g[b * nf + a] += w * fv * va[a] * vb[b];
    }
  return g;
}

void scatter(std::vector<Triplet>& trip, const std::vector<int>& rows, const std::vector<int>& cols,
             const DenseMatrix& local, int row_shift = 0, int col_shift = 0) {
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a] < 0) continue;
    for (std::size_t b = 0; b < cols.size(); ++b) {
      if (cols[b] < 0) continue;
      double v = local(a, b);
      if (v != 0.0) trip.emplace_back(rows[a] + row_shift, cols[b] + col_shift, v);
    }
  }
}

}  // namespace

TraceSystem assemble_trace_system(const DofMap& dofs, const PoissonProblem& problem,
                                  const DiscretizationOptions& options) {
  const int k = dofs.degree();
  const int n = dofs.n();
  const double h = dofs.level().spacing;
  TraceSystem sys;
  sys.method = dofs.method();
  sys.degree = k;
  sys.penalty = options.penalty_for(k);
  sys.nodes = options.nodes;
  sys.level = dofs.level();
  sys.element = local_bilinear(dofs.method(), k, h, sys.penalty, options.nodes);

  DenseMatrix local;
  if (dofs.method() == Method::cg) {
    local = sys.element.stiffness;
  } else {
    try {
      sys.interior_solver = std::make_shared<DenseLu<double>>(sys.element.A);
    } catch (const NumericalError&) {
      throw NumericalError("assemble_trace_system: singular interior block A_K on element (0,0)");
    }
    local = sys.element.C - sys.element.B * sys.interior_solver->solve(DenseMatrix(sys.element.B.transpose()));
    local = 0.5 * (local + local.transpose()).eval();
  }

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n) * n * local.size());
  sys.f = Vector::Zero(dofs.size());
  sys.interior_load.assign(static_cast<std::size_t>(n) * n, Vector());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto ids = dofs.element_dofs(i, j);
      scatter(trip, ids, ids, local);
      if (!problem.source) continue;
      Vector g1 = volume_load(problem.source, k, options.nodes, h, i * h, j * h);
      Vector fl;
      if (dofs.method() == Method::cg) {
        fl = g1;
      } else {
        fl = -sys.element.B * sys.interior_solver->solve(g1);
        sys.interior_load[i + n * j] = g1;
      }
      for (std::size_t a = 0; a < ids.size(); ++a)
        if (ids[a] >= 0) sys.f[ids[a]] += fl[a];
    }
  }
  sys.K.resize(dofs.size(), dofs.size());
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  return sys;
}

TraceSystem assemble_operator(const DofMap& dofs, const DiscretizationOptions& options) {
  return assemble_trace_system(dofs, PoissonProblem{}, options);
}

std::vector<Vector> reconstruct_interior(const Vector& trace, const TraceSystem& sys, const DofMap& dofs) {
  if (trace.size() != sys.K.rows()) throw ValidationError("reconstruct_interior: trace dimension mismatch");
  const int n = dofs.n();
  const int ni = (sys.degree + 1) * (sys.degree + 1);
  std::vector<Vector> out(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const auto ids = dofs.element_dofs(i, j);
      Vector local(ids.size());
      for (std::size_t a = 0; a < ids.size(); ++a) local[a] = ids[a] >= 0 ? trace[ids[a]] : 0.0;
      if (sys.method == Method::cg) {
        out[i + n * j] = local;
        continue;
      }
      Vector rhs = -sys.element.B.transpose() * local;
      const Vector& g1 = sys.interior_load[i + n * j];
      if (g1.size() == ni) rhs += g1;
      out[i + n * j] = sys.interior_solver->solve(rhs);
    }
  return out;
}

double l2_error(const std::vector<Vector>& interior, const TraceSystem& sys,
                const std::function<double(double, double)>& exact) {
  const int k = sys.degree;
  const int n = sys.level.cells_per_side;
  const double h = sys.level.spacing;
  const LagrangeBasis1D basis(lagrange_nodes(k, sys.nodes));
  const Quadrature1D quad = gauss_legendre(k + 4);
  const int nf = k + 1;
  double err = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vector& u = interior[i + n * j];
      for (std::size_t qa = 0; qa < quad.points.size(); ++qa)
        for (std::size_t qb = 0; qb < quad.points.size(); ++qb) {
          auto va = basis.values(quad.points[qa]);
          auto vb = basis.values(quad.points[qb]);
          double uh = 0.0;
          for (int b = 0; b < nf; ++b)
            for (int a = 0; a < nf; ++a) uh += u[b * nf + a] * va[a] * vb[b];
          double e = uh - exact((i + quad.points[qa]) * h, (j + quad.points[qb]) * h);
          err += quad.weights[qa] * quad.weights[qb] * h * h * e * e;
        }
    }
  return std::sqrt(err);
}

BlockSystem assemble_block_system(const DofMap& dofs, const PoissonProblem& problem,
                                  const DiscretizationOptions& options) {
  if (dofs.method() == Method::cg) throw ValidationError("assemble_block_system: CG has no interior block");
  const int k = dofs.degree();
  const int n = dofs.n();
  const double h = dofs.level().spacing;
  const int ni = (k + 1) * (k + 1);
  const ElementMatrices e = local_bilinear(dofs.method(), k, h, options.penalty_for(k), options.nodes);
  const DenseMatrix bt = e.B.transpose();

  BlockSystem out;
  out.trace_size = dofs.size();
  const int total = dofs.size() + n * n * ni;
  out.rhs = Vector::Zero(total);
  std::vector<Triplet> trip;
  std::vector<int> interior(ni);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const auto ids = dofs.element_dofs(i, j);
      const int base = dofs.size() + (i + n * j) * ni;
      for (int a = 0; a < ni; ++a) interior[a] = base + a;
      scatter(trip, ids, ids, e.C);
      scatter(trip, ids, interior, e.B);
      scatter(trip, interior, ids, bt);
      scatter(trip, interior, interior, e.A);
      if (problem.source) out.rhs.segment(base, ni) = volume_load(problem.source, k, options.nodes, h, i * h, j * h);
    }
  out.matrix.resize(total, total);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  return out;
}

}  // namespace hdgmg
