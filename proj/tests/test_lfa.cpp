#include "fixture.hpp"
#include "hdgmg/lfa.hpp"
#include "hdgmg/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

using namespace hdgmg;
using cd = std::complex<double>;

namespace {

const double kPi = std::acos(-1.0);
const Method kMethods[] = {Method::cg, Method::edg, Method::hdg};

using Key = std::tuple<std::string, std::string, int, int>;

std::map<Key, double> as_map(const std::vector<fixture::Line>& lines) {
  std::map<Key, double> out;
  for (const auto& l : lines) out[{l.row, l.col, l.dx2, l.dy2}] += l.value;
  return out;
}

// Apply a stencil set to a periodic grid function.
Vector apply_stencils(const StencilSet& s, const DofMap& d, const Vector& v) {
  auto slots = slot_list(d);
  Vector out = Vector::Zero(d.size());
  for (const auto& e : d.entries()) {
    int row = 0;
    while (!(slots[row].type == e.type && slots[row].slot == e.slot)) ++row;
    auto p = d.doubled_position(e.index);
    for (const auto& st : s.entries()) {
      if (st.row != row) continue;
      const SlotId& c = slots[st.col];
      auto sh = subgrid_shift(c.type);
      int j = d.find(c.type, (p[0] + st.dx2 - sh[0]) / 2, (p[1] + st.dy2 - sh[1]) / 2, c.slot);
      out(e.index) += st.value * v(j);
    }
  }
  return out;
}

// max over lattice frequencies of |A (Psi xi) - Psi (symbol xi)|
template <typename Symbol>
double fourier_defect(const DenseMatrix& A, const DofMap& d, Symbol symbol) {
  auto slots = slot_list(d);
  const int r = static_cast<int>(slots.size()), n = d.n();
  std::vector<int> slot_of(d.size());
  for (const auto& e : d.entries())
    for (int s = 0; s < r; ++s)
      if (slots[s].type == e.type && slots[s].slot == e.slot) slot_of[e.index] = s;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int m1 = 0; m1 < n; m1 += 3)
    for (int m2 = 0; m2 < n; m2 += 5) {
      const double t1 = 2 * kPi * m1 / n, t2 = 2 * kPi * m2 / n;
      ComplexVector xi(r);
      for (int s = 0; s < r; ++s) xi(s) = cd(g(rng), g(rng));
      ComplexVector sx = symbol(t1, t2) * xi;
      ComplexVector v(d.size()), expect(d.size());
      for (int i = 0; i < d.size(); ++i) {
        auto p = d.doubled_position(i);
        cd phase = std::polar(1.0, 0.5 * (t1 * p[0] + t2 * p[1]));
        v(i) = phase * xi(slot_of[i]);
        expect(i) = phase * sx(slot_of[i]);
      }
      worst = std::max(worst, (A.cast<cd>() * v - expect).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST(Stencils, HdgK1MatchesFixture) {
  auto fix = as_map(fixture::load(std::string(HDGMG_FIXTURES) + "/hdg_k1_stencils.txt"));
  DofMap d(MeshLevel::make(16, BoundaryMode::periodic), Method::hdg, 1);
  std::istringstream dump(extract_stencils(assemble_operator(d).K, d).dump());
  auto got = as_map(fixture::parse(dump));
  EXPECT_EQ(got.size(), fix.size());
  for (const auto& [key, v] : fix) {
    auto it = got.find(key);
    ASSERT_NE(it, got.end()) << std::get<0>(key) << std::get<1>(key);
    EXPECT_NEAR(it->second, v, 1e-12);
  }
}

TEST(Stencils, IdentityGivesDelta) {
  DofMap d(MeshLevel::make(8, BoundaryMode::periodic), Method::cg, 3);
  StencilSet s = extract_stencils([](const Vector& x) { return x; }, d);
  EXPECT_EQ(s.rank(), d.slots_per_cell());
  EXPECT_EQ(static_cast<int>(s.entries().size()), s.rank());
  for (const auto& e : s.entries()) {
    EXPECT_EQ(e.row, e.col);
    EXPECT_EQ(e.dx2, 0);
    EXPECT_EQ(e.dy2, 0);
    EXPECT_EQ(e.value, 1.0);
  }
}

TEST(Stencils, CgK1NinePoint) {
  DofMap d(MeshLevel::make(8, BoundaryMode::periodic), Method::cg, 1);
  StencilSet s = extract_stencils(assemble_operator(d).K, d);
  ASSERT_EQ(s.entries().size(), 9u);
  for (const auto& e : s.entries()) EXPECT_NEAR(e.value, (e.dx2 == 0 && e.dy2 == 0) ? 8.0 / 3 : -1.0 / 3, 1e-14);
}

TEST(Stencils, RejectsNonTranslationInvariant) {
  DofMap d(MeshLevel::make(8, BoundaryMode::periodic), Method::cg, 1);
  SparseMatrix a = assemble_operator(d).K;
  a.coeffRef(d.find(DofType::N, 4, 4, 0), d.find(DofType::N, 4, 4, 0)) += 1.0;
  EXPECT_THROW(extract_stencils(a, d), NumericalError);
}

TEST(Symbol, X1X1AtZero) {
  DofMap d(MeshLevel::make(16, BoundaryMode::periodic), Method::hdg, 1);
  StencilSet s = extract_stencils(assemble_operator(d).K, d);
  EXPECT_EQ(s.slots()[0].label(), "X1");
  EXPECT_NEAR(std::abs(s.symbol(0, 0)(0, 0) - cd(13.0 / 6.0)), 0.0, 1e-12);
}

TEST(Symbol, SingularAtZero) {
  for (Method m : kMethods) {
    LfaModel model = LfaModel::build(m, 2);
    Eigen::JacobiSVD<ComplexMatrix> svd(model.operator_stencil().symbol(0, 0));
    EXPECT_LE(svd.singularValues().minCoeff(), 1e-12) << to_string(m);
  }
}

TEST(Symbol, HermitianAtSamples) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      LfaModel model = LfaModel::build(m, k);
      LfaConfig cfg;
      cfg.samples = 6;
      for (double a : cfg.thetas())
        for (double b : cfg.thetas()) {
          ComplexMatrix s = model.operator_stencil().symbol(a, b);
          EXPECT_LE((s - s.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Symbol, FourierModeOracle) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      CheckResult r = check_fourier_modes(m, k);
      EXPECT_TRUE(r.passed()) << r.name << " " << r.error;
    }
}

TEST(Symbol, AliasingSigns) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      CheckResult r = check_aliasing_signs(m, k);
      EXPECT_TRUE(r.passed()) << r.name << " " << r.error;
    }
}

TEST(Smoother, StencilRoundTrip) {
  for (Method m : kMethods) {
    DofMap d(MeshLevel::make(8, BoundaryMode::periodic), m, 2);
    TraceSystem sys = assemble_operator(d);
    Smoother s(SmootherKind::vertex_wise, sys.K, d, 0.9);
    DenseMatrix S = error_propagation_matrix(s, sys.K);
    StencilSet st = extract_stencils(S, d);
    Vector v = Vector::Random(d.size());
    EXPECT_LE((apply_stencils(st, d, v) - S * v).cwiseAbs().maxCoeff(), 1e-10) << to_string(m);
  }
}

TEST(Smoother, SymbolMatchesFiniteGrid) {
  const std::tuple<Method, int, SmootherKind> cases[] = {{Method::hdg, 1, SmootherKind::vertex_wise},
                                                         {Method::cg, 2, SmootherKind::element_wise},
                                                         {Method::edg, 2, SmootherKind::lt_element_wise},
                                                         {Method::hdg, 2, SmootherKind::jacobi}};
  for (auto [m, k, kind] : cases) {
    LfaModel model = LfaModel::build(m, k).with_smoother(kind);
    DofMap d(MeshLevel::make(16, BoundaryMode::periodic), m, k);
    TraceSystem sys = assemble_operator(d);
    Smoother s(kind, sys.K, d, 0.85);
    DenseMatrix S = error_propagation_matrix(s, sys.K);
    double err = fourier_defect(S, d, [&](double a, double b) { return model.smoother_symbol(a, b, 0.85); });
    EXPECT_LE(err, 1e-10) << to_string(m) << k << " " << to_string(kind);
  }
}

TEST(Smoother, ZeroOmegaSymbolIsIdentity) {
  LfaModel model = LfaModel::build(Method::hdg, 1).with_smoother(SmootherKind::element_wise);
  ComplexMatrix s = model.smoother_symbol(0.3, -0.7, 0.0);
  EXPECT_EQ((s - ComplexMatrix::Identity(s.rows(), s.cols())).norm(), 0.0);
}

TEST(Smoother, GaussSeidelLowerPartRule) {
  LfaModel model = LfaModel::build(Method::edg, 2);
  StencilSet lower = gauss_seidel_lower(model.operator_stencil());
  ComplexMatrix full = model.operator_stencil().symbol(0.4, 1.1), low = lower.symbol(0.4, 1.1);
  for (const auto& e : lower.entries()) {
    bool before = e.col < e.row || (e.col == e.row && (e.dx2 < 0 || (e.dx2 == 0 && e.dy2 <= 0)));
    EXPECT_TRUE(before) << e.row << " " << e.col << " " << e.dx2 << " " << e.dy2;
  }
  int total = 0;
  for (const auto& e : model.operator_stencil().entries())
    total += e.col < e.row || (e.col == e.row && (e.dx2 < 0 || (e.dx2 == 0 && e.dy2 <= 0)));
  EXPECT_EQ(static_cast<int>(lower.entries().size()), total);
  EXPECT_GT((full - low).norm(), 0.0);
}

TEST(TwoGrid, GalerkinCoarseSymbol) {
  for (Method m : kMethods) {
    LfaModel model = LfaModel::build(m, 2);
    HarmonicSymbol h = model.harmonic(0.37, -0.81);
    EXPECT_LE((h.R * h.K * h.P - h.KH).cwiseAbs().maxCoeff(), 1e-10 * h.KH.cwiseAbs().maxCoeff()) << to_string(m);
  }
}

TEST(TwoGrid, CoarseGridCorrectionIdempotent) {
  for (Method m : kMethods)
    for (int k = 1; k <= 3; ++k) {
      CheckResult r = check_cgc_idempotent_symbol(m, k);
      EXPECT_TRUE(r.passed()) << r.name << " " << r.error;
    }
}

TEST(TwoGrid, MatchesDenseTwoLevelOperator) {
  for (Method m : kMethods)
    for (SmootherKind s : {SmootherKind::vertex_wise, SmootherKind::element_wise, SmootherKind::jacobi}) {
      CheckResult r = check_two_grid_oracle(m, 1, s, 0.9);
      EXPECT_TRUE(r.passed()) << r.name << " " << r.error;
    }
}

TEST(Rho, ZeroOmegaIsOne) {
  LfaModel model = LfaModel::build(Method::cg, 2).with_smoother(SmootherKind::vertex_wise);
  LfaConfig cfg;
  cfg.samples = 8;
  EXPECT_NEAR(rho_asp(model, cfg, 0.0).rho, 1.0, 1e-12);
}

TEST(Rho, SampleGrid) {
  LfaConfig cfg;
  auto t = cfg.thetas();
  ASSERT_EQ(t.size(), 32u);
  EXPECT_NEAR(t.front(), -kPi / 2 + kPi / 64, 1e-15);
  EXPECT_NEAR(t.back(), kPi / 2 - kPi / 64, 1e-15);
}

// Published LFA values.
TEST(Rho, PaperCells) {
  LfaConfig cfg;
  EXPECT_NEAR(rho_asp(LfaModel::build(Method::hdg, 1).with_smoother(SmootherKind::vertex_wise), cfg, 0.96).rho, 0.403,
              0.005);
  EXPECT_NEAR(rho_asp(LfaModel::build(Method::cg, 2).with_smoother(SmootherKind::vertex_wise), cfg, 1.00).rho, 0.208,
              0.005);
  EXPECT_NEAR(rho_asp(LfaModel::build(Method::cg, 1).with_smoother(SmootherKind::jacobi), cfg, 0.89).rho, 0.333, 0.005);
  LfaConfig tg11 = cfg;
  tg11.nu2 = 1;
  EXPECT_NEAR(rho_asp(LfaModel::build(Method::cg, 1).with_smoother(SmootherKind::gauss_seidel), tg11, 1.02).rho, 0.079,
              0.005);
}

TEST(Omega, PaperOptima) {
  LfaConfig cfg;
  OmegaResult a = optimize_omega(LfaModel::build(Method::hdg, 1).with_smoother(SmootherKind::element_wise), cfg);
  EXPECT_NEAR(a.omega, 1.14, 0.02 + 1e-9);
  EXPECT_NEAR(a.rho, 0.466, 0.005);
  OmegaResult b = optimize_omega(LfaModel::build(Method::edg, 3).with_smoother(SmootherKind::vertex_wise), cfg);
  EXPECT_NEAR(b.omega, 0.94, 0.02 + 1e-9);
  EXPECT_NEAR(b.rho, 0.287, 0.005);
}

TEST(Omega, BranchAndBoundEqualsBruteForce) {
  LfaConfig cfg;
  cfg.samples = 10;
  for (SmootherKind s : {SmootherKind::vertex_wise, SmootherKind::gauss_seidel}) {
    FrequencySweep sweep(LfaModel::build(Method::hdg, 1).with_smoother(s), cfg);
    OmegaResult best = sweep.optimize(0.5, 1.6, 0.01);
    double brute = 1e300, brute_w = 0.0;
    for (int i = 0; i <= 110; ++i) {
      double w = 0.5 + 0.01 * i, r = sweep.rho(w).rho;
      EXPECT_LE(best.rho, r + 1e-15);
      if (r < brute) brute = r, brute_w = w;
    }
    EXPECT_DOUBLE_EQ(best.rho, brute);
    EXPECT_NEAR(best.omega, brute_w, 1e-12);
  }
}
