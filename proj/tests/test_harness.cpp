#include "fixture.hpp"
#include "hdgmg/harness.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace hdgmg;

namespace {

RunConfig quick(const std::string& cmd) {
  RunConfig c;
  c.command = cmd;
  c.method = Method::cg;
  c.degree = 1;
  c.samples = 8;
  c.jobs = 1;
  return c;
}

}  // namespace

TEST(Csv, FormatIsDeterministicAndRoundTrips) {
  RunConfig c = quick("table1");
  c.smoother = SmootherKind::element_wise;
  auto a = format_csv(cmd_table1(c));
  auto b = format_csv(cmd_table1(c));
  EXPECT_EQ(a, b);
  auto rows = parse_csv(a);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(format_csv(rows), a);
  EXPECT_EQ(a.substr(0, a.find('\n')), "method,k,smoother,nu1,nu2,omega,rho,source");
}

TEST(Csv, MeasuredColumns) {
  CsvRow r;
  r.source = "measured-tg";
  r.n = 64;
  r.levels = 2;
  r.seed = 3;
  r.rho_geo = 0.25;
  r.iterations = 20;
  r.status = "ok";
  auto text = format_csv({r}, true);
  auto back = parse_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].n, 64);
  EXPECT_EQ(back[0].status, "ok");
  EXPECT_EQ(format_csv(back, true), text);
}

TEST(Csv, SixSignificantDigits) {
  EXPECT_EQ(format_number(0.33392871), "0.333929");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_THROW(parse_csv("a,b\n"), ValidationError);
}

TEST(Config, FileValuesYieldToExplicitFlags) {
  const std::string path = ::testing::TempDir() + "/hdgmg_cfg.txt";
  {
    std::ofstream out(path);
    out << "# defaults\nmethod = hdg\ndegree = 2\nomega_step = 0.05\nnu1 = 2  # trailing\n";
  }
  RunConfig c;
  c.nu1 = 3;
  apply_config(c, read_config_file(path), {"nu1"});
  EXPECT_EQ(c.method, Method::hdg);
  EXPECT_EQ(c.degree, 2);
  EXPECT_DOUBLE_EQ(c.omega_step, 0.05);
  EXPECT_EQ(c.nu1, 3);
  std::remove(path.c_str());
}

TEST(Config, UnknownKeyRejected) {
  RunConfig c;
  EXPECT_THROW(apply_config(c, {{"bogus", "1"}}), ValidationError);
  EXPECT_THROW(apply_config(c, {{"n", "abc"}}), ValidationError);
}

TEST(Config, Validation) {
  RunConfig c;
  c.omega = 2.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c.omega.reset();
  c.periodic_n = 10;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Table1, CgK1JacobiPinned) {
  RunConfig c = quick("table1");
  c.samples = 32;
  c.smoother = SmootherKind::jacobi;
  auto rows = cmd_table1(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].omega, 0.89);
  EXPECT_NEAR(rows[0].rho, 0.333, 0.005);
}

TEST(Table1, ZeroOmegaGivesOne) {
  RunConfig c = quick("table1");
  c.omega = 0.0;
  for (const auto& r : cmd_table1(c)) EXPECT_NEAR(r.rho, 1.0, 1e-12) << to_string(r.smoother);
}

TEST(Table2, NeedsFirstTable) {
  RunConfig c = quick("table2");
  EXPECT_THROW(cmd_table2(c, {}), ValidationError);
}

TEST(Table2, NoSweepsGivesOne) {
  RunConfig c = quick("table2");
  c.nu1 = 0;
  c.nu2 = 0;
  c.omega = 1.0;
  auto rows = cmd_table2(c, {});
  EXPECT_EQ(rows.size(), table2_smoothers().size());
  for (const auto& r : rows) EXPECT_NEAR(r.rho, 1.0, 1e-12);
}

TEST(Table2, UsesFirstTableOmega) {
  RunConfig c = quick("table2");
  c.smoother = SmootherKind::vertex_wise;
  CsvRow t1;
  t1.method = Method::cg;
  t1.k = 1;
  t1.smoother = SmootherKind::vertex_wise;
  t1.omega = 0.77;
  auto rows = cmd_table2(c, {t1});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.omega, 0.77);
  EXPECT_EQ(rows[2].nu1, 2);
  EXPECT_EQ(rows[2].nu2, 2);
}

TEST(Measure, ZeroGuessRow) {
  RunConfig c = quick("measure");
  c.smoother = SmootherKind::vertex_wise;
  c.n = 8;
  c.levels = 2;
  c.zero_guess = true;
  auto rows = cmd_measure(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].iterations, 0);
  EXPECT_EQ(rows[0].source, "measured-tg");
}

TEST(Measure, LargeMeshNeedsFlag) {
  RunConfig c = quick("measure");
  c.n = 256;
  EXPECT_THROW(cmd_measure(c), ValidationError);
}

TEST(Measure, SeedsRecorded) {
  RunConfig c = quick("measure");
  c.smoother = SmootherKind::element_wise;
  c.n = 16;
  c.levels = 3;
  c.seed = 5;
  c.seeds = 2;
  auto rows = cmd_measure(c);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].seed, 5u);
  EXPECT_EQ(rows[1].seed, 6u);
  EXPECT_EQ(rows[2].source, "measured-mg");
  EXPECT_EQ(rows[2].levels, 3);
}

TEST(StencilDump, HdgK1DiffsCleanAgainstFixture) {
  RunConfig c;
  c.method = Method::hdg;
  c.degree = 1;
  std::istringstream in(cmd_stencil_dump(c));
  auto got = fixture::parse(in);
  auto fix = fixture::load(std::string(HDGMG_FIXTURES) + "/hdg_k1_stencils.txt");
  ASSERT_EQ(got.size(), fix.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].row + got[i].col, fix[i].row + fix[i].col);
    EXPECT_EQ(got[i].dx2, fix[i].dx2);
    EXPECT_EQ(got[i].dy2, fix[i].dy2);
    EXPECT_NEAR(got[i].value, fix[i].value, 1e-12);
  }
}

TEST(StencilDump, IdentityFlag) {
  RunConfig c;
  c.method = Method::hdg;
  c.degree = 1;
  c.identity = true;
  EXPECT_EQ(cmd_stencil_dump(c), "X1 X1 0 0 1\nX2 X2 0 0 1\nY1 Y1 0 0 1\nY2 Y2 0 0 1\n");
}

TEST(Parallel, KeepsOrder) {
  auto out = parallel_map<int>(50, 4, [](int i) { return i * i; });
  for (int i = 0; i < 50; ++i) EXPECT_EQ(out[i], i * i);
  EXPECT_THROW(parallel_map<int>(5, 2, [](int i) -> int { if (i == 3) throw ValidationError("x"); return i; }),
               ValidationError);
}
