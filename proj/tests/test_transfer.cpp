#include "hdgmg/discretization.hpp"
#include "hdgmg/transfer.hpp"
#include "hdgmg/verification.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace hdgmg;

namespace {

const Method kMethods[] = {Method::cg, Method::edg, Method::hdg};

// Physical coordinates of a DOF for equispaced nodes.
std::array<double, 2> position(const DofMap& d, const DofEntry& e) {
  const int k = d.degree();
  const double h = d.level().spacing;
  const bool hdg = d.method() == Method::hdg;
  double a = 0.0, b = 0.0;
  switch (e.type) {
    case DofType::N: break;
    case DofType::X: a = hdg ? double(e.slot) / k : double(e.slot + 1) / k; break;
    case DofType::Y: b = hdg ? double(e.slot) / k : double(e.slot + 1) / k; break;
    case DofType::C:
      a = double(e.slot % (k - 1) + 1) / k;
      b = double(e.slot / (k - 1) + 1) / k;
      break;
  }
  return {(e.k1 + a) * h, (e.k2 + b) * h};
}

Vector sample(const DofMap& d, double (*g)(double, double, int)) {
  Vector v(d.size());
  for (const auto& e : d.entries()) {
    auto p = position(d, e);
    v(e.index) = g(p[0], p[1], d.degree());
  }
  return v;
}

// Degree k in each variable; along any facet a polynomial of degree k.
double poly(double x, double y, int k) {
  return std::pow(1.0 + x, k) + std::pow(2.0 - y, k) + 0.5 * x * y + std::pow(x * y, k) * 0.25;
}

Vector random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST(FaceSplit, CellCentresAreInterior) {
  DofMap d(MeshLevel::make(8, BoundaryMode::periodic), Method::cg, 2);
  auto s = face_split(d);
  for (const auto& e : d.entries()) {
    if (e.type == DofType::C) EXPECT_EQ(s[e.index], 0);
    if (e.type == DofType::X) EXPECT_EQ(s[e.index], e.k2 % 2 == 0);
  }
}

TEST(BuildPb, ConstantReproduction) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      DofMap fine(MeshLevel::make(8, BoundaryMode::periodic), m, k);
      DofMap coarse(fine.level().coarser(), m, k);
      SparseMatrix pb = build_pb(fine, coarse);
      Vector out = pb * Vector::Ones(coarse.size());
      auto split = face_split(fine);
      for (int i = 0; i < fine.size(); ++i) EXPECT_NEAR(out(i), split[i] ? 1.0 : 0.0, 1e-13);
    }
}

TEST(BuildPb, FacetPolynomialReproduction) {
  for (Method m : {Method::edg, Method::hdg})
    for (int k = 1; k <= 3; ++k) {
      DofMap fine(MeshLevel::make(8, BoundaryMode::dirichlet), m, k);
      DofMap coarse(fine.level().coarser(), m, k);
      Vector out = build_pb(fine, coarse) * sample(coarse, poly);
      Vector expect = sample(fine, poly);
      auto split = face_split(fine);
      // coarse faces touching the boundary carry eliminated (zero) endpoint data
      const double H = coarse.level().spacing;
      for (const auto& e : fine.entries()) {
        auto p = position(fine, e);
        bool inner = p[0] >= H - 1e-12 && p[0] <= 1 - H + 1e-12 && p[1] >= H - 1e-12 && p[1] <= 1 - H + 1e-12;
        if (split[e.index] && inner) EXPECT_NEAR(out(e.index), expect(e.index), 1e-12) << to_string(m) << k;
      }
    }
}

// Per fine face: mass-matrix solve against the coarse polynomial, integrated by quadrature.
TEST(BuildPb, HdgMatchesMassMatrixOracle) {
  for (int k = 1; k <= 3; ++k) {
    DofMap fine(MeshLevel::make(4, BoundaryMode::periodic), Method::hdg, k);
    DofMap coarse(fine.level().coarser(), Method::hdg, k);
    SparseMatrix pb = build_pb(fine, coarse);
    Vector vc = random_vector(coarse.size(), 31 + k);
    Vector got = pb * vc;
    LagrangeBasis1D basis(lagrange_nodes(k, NodeFamily::equispaced));
    Quadrature1D q = gauss_legendre(k + 2);
    for (DofType t : {DofType::X, DofType::Y})
      for (int I = 0; I < 2; ++I)
        for (int J = 0; J < 2; ++J)
          for (int c = 0; c < 2; ++c) {
            DenseMatrix mass = DenseMatrix::Zero(k + 1, k + 1);
            Vector rhs = Vector::Zero(k + 1);
            for (std::size_t p = 0; p < q.points.size(); ++p) {
              double s = q.points[p];
              auto vf = basis.values(s);
              auto vcoarse = basis.values(0.5 * (s + c));
              double u = 0.0;
              for (int m = 0; m <= k; ++m) u += vc(coarse.find(t, I, J, m)) * vcoarse[m];
              for (int i = 0; i <= k; ++i) {
                rhs(i) += q.weights[p] * vf[i] * u;
                for (int j = 0; j <= k; ++j) mass(i, j) += q.weights[p] * vf[i] * vf[j];
              }
            }
            Vector proj = mass.lu().solve(rhs);
            const int fi = t == DofType::X ? 2 * I + c : 2 * I, fj = t == DofType::X ? 2 * J : 2 * J + c;
            for (int i = 0; i <= k; ++i) EXPECT_NEAR(got(fine.find(t, fi, fj, i)), proj(i), 1e-12);
          }
  }
}

TEST(DtnProlongation, InteriorRowsMatchGlobalSchurOracle) {
  for (Method m : {Method::edg, Method::hdg})
    for (int k = 1; k <= 3; ++k) {
      DofMap fine(MeshLevel::make(4, BoundaryMode::dirichlet), m, k);
      DofMap coarse(fine.level().coarser(), m, k);
      TraceSystem sys = assemble_operator(fine);
      SparseMatrix pb = build_pb(fine, coarse);
      auto split = face_split(fine);
      LevelTransfer t = build_dtn_prolongation(sys.K, fine, coarse, pb, split);

      std::vector<int> I, B;
      for (int i = 0; i < fine.size(); ++i) (split[i] ? B : I).push_back(i);
      DenseMatrix K(sys.K), PB(pb), P(t.P);
      DenseMatrix kii(I.size(), I.size()), kib(I.size(), B.size()), pbb(B.size(), coarse.size());
      for (std::size_t a = 0; a < I.size(); ++a) {
        for (std::size_t b = 0; b < I.size(); ++b) kii(a, b) = K(I[a], I[b]);
        for (std::size_t b = 0; b < B.size(); ++b) kib(a, b) = K(I[a], B[b]);
      }
      for (std::size_t b = 0; b < B.size(); ++b) pbb.row(b) = PB.row(B[b]);
      DenseMatrix oracle = -kii.lu().solve(kib * pbb);
      double err = 0.0;
      for (std::size_t a = 0; a < I.size(); ++a) err = std::max(err, (P.row(I[a]) - oracle.row(a)).cwiseAbs().maxCoeff());
      for (std::size_t b = 0; b < B.size(); ++b) err = std::max(err, (P.row(B[b]) - pbb.row(b)).cwiseAbs().maxCoeff());
      EXPECT_LE(err, 1e-10) << to_string(m) << k;
      EXPECT_LE((DenseMatrix(t.R) - P.transpose()).norm(), 0.0);
    }
}

TEST(Transfer, ConstantsPreservedOnPeriodicMesh) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      DofMap fine(MeshLevel::make(8, BoundaryMode::periodic), m, k);
      DofMap coarse(fine.level().coarser(), m, k);
      TraceSystem sys = assemble_operator(fine);
      LevelTransfer t = build_transfer(sys.K, fine, coarse);
      Vector out = t.P * Vector::Ones(coarse.size());
      EXPECT_LE((out.array() - 1.0).abs().maxCoeff(), 1e-12) << to_string(m) << k;
      SparseMatrix kh = galerkin_coarse(sys.K, t);
      EXPECT_LE((kh * Vector::Ones(coarse.size())).cwiseAbs().maxCoeff(), 1e-11) << to_string(m) << k;
    }
}

// Oracle: evaluate the coarse Q^k function at each fine DOF position.
TEST(Transfer, CgInterpolationMatchesCoarseFunction) {
  for (int k = 1; k <= 3; ++k) {
    DofMap fine(MeshLevel::make(8, BoundaryMode::dirichlet), Method::cg, k);
    DofMap coarse(fine.level().coarser(), Method::cg, k);
    LevelTransfer t = build_interpolation(fine, coarse);
    Vector uc = random_vector(coarse.size(), 40 + k);
    Vector got = t.P * uc;
    LagrangeBasis1D basis(lagrange_nodes(k, NodeFamily::equispaced));
    const double H = coarse.level().spacing;
    for (const auto& e : fine.entries()) {
      auto p = position(fine, e);
      int I = std::min(static_cast<int>(p[0] / H), 3), J = std::min(static_cast<int>(p[1] / H), 3);
      auto va = basis.values(p[0] / H - I), vb = basis.values(p[1] / H - J);
      auto ld = coarse.element_dofs(I, J);
      double v = 0.0;
      for (int b = 0; b <= k; ++b)
        for (int a = 0; a <= k; ++a)
          if (ld[b * (k + 1) + a] >= 0) v += uc(ld[b * (k + 1) + a]) * va[a] * vb[b];
      EXPECT_NEAR(got(e.index), v, 1e-12) << k;
    }
  }
}

TEST(Galerkin, MatchesDenseTripleProduct) {
  for (Method m : kMethods)
    for (int k : {1, 2}) {
      DofMap fine(MeshLevel::make(8, BoundaryMode::dirichlet), m, k);
      DofMap coarse(fine.level().coarser(), m, k);
      TraceSystem sys = assemble_operator(fine);
      LevelTransfer t = build_transfer(sys.K, fine, coarse);
      SparseMatrix kh = galerkin_coarse(sys.K, t);
      DenseMatrix oracle = DenseMatrix(t.P).transpose() * DenseMatrix(sys.K) * DenseMatrix(t.P);
      EXPECT_LE((DenseMatrix(kh) - oracle).cwiseAbs().maxCoeff(), 1e-10 * oracle.cwiseAbs().maxCoeff());
      EXPECT_LE(symmetry_defect(kh), 1e-12 * max_abs(kh));
    }
}

TEST(Galerkin, EnergyIdentity) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) EXPECT_TRUE(check_energy_identity(m, k).passed()) << to_string(m) << k;
}

TEST(Transfer, ProlongationIsLocal) {
  for (Method m : kMethods) {
    DofMap fine(MeshLevel::make(8, BoundaryMode::dirichlet), m, 2);
    DofMap coarse(fine.level().coarser(), m, 2);
    TraceSystem sys = assemble_operator(fine);
    LevelTransfer t = build_transfer(sys.K, fine, coarse);
    std::vector<std::set<int>> elems(coarse.size());
    for (int I = 0; I < 4; ++I)
      for (int J = 0; J < 4; ++J)
        for (int c : coarse.element_dofs(I, J))
          if (c >= 0) elems[c].insert(I + 4 * J);
    for (int r = 0; r < t.P.outerSize(); ++r) {
      auto p = fine.doubled_position(r);
      std::set<int> mine;
      for (int I = 0; I < 4; ++I)
        for (int J = 0; J < 4; ++J)
          if (4 * I <= p[0] && p[0] <= 4 * I + 4 && 4 * J <= p[1] && p[1] <= 4 * J + 4) mine.insert(I + 4 * J);
      for (SparseMatrix::InnerIterator it(t.P, r); it; ++it) {
        bool shared = false;
        for (int e : elems[it.col()]) shared = shared || mine.count(e);
        EXPECT_TRUE(shared) << to_string(m) << " fine " << r << " coarse " << it.col();
      }
    }
  }
}

TEST(Transfer, CoarseGridCorrectionIsProjection) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) EXPECT_TRUE(check_cgc_idempotent_mesh(m, k).passed()) << to_string(m) << k;
}
