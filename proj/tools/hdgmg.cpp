#include "hdgmg/harness.hpp"
#include "hdgmg/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace hdgmg;

namespace {

struct Flags {
  std::string method, smoother, cycle, config;
  int degree = 0;
  double omega = -1.0;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw ValidationError("cannot write " + cfg.out);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multigrid and local Fourier analysis for CG/EDG/HDG trace systems of the 2D Poisson problem"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags f;

  std::vector<CLI::App*> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--method", f.method, "cg, edg or hdg");
    s->add_option("--degree,-k", f.degree, "polynomial degree k");
    s->add_option("--smoother", f.smoother, "vw, ew, jac, ltvw, ltew or gs");
    s->add_option("--nu1", cfg.nu1, "pre-smoothing sweeps");
    s->add_option("--nu2", cfg.nu2, "post-smoothing sweeps");
    s->add_option("--omega", f.omega, "fixed damping parameter");
    s->add_option("--n", cfg.n, "cells per side on the finest mesh");
    s->add_option("--levels", cfg.levels, "number of multigrid levels");
    s->add_option("--cycle", f.cycle, "v, w or f");
    s->add_option("--seed", cfg.seed, "first random seed");
    s->add_option("--seeds", cfg.seeds, "number of consecutive seeds");
    s->add_option("--out", cfg.out, "output file (default stdout)");
    s->add_option("--config", f.config, "key = value config file");
    s->add_flag("--large", cfg.large, "allow meshes finer than 128 x 128");
    s->add_option("--table1", cfg.table1, "CSV written by table1 (omega source)");
    s->add_option("--omega-lo", cfg.omega_lo, "omega sweep start");
    s->add_option("--omega-hi", cfg.omega_hi, "omega sweep end");
    s->add_option("--omega-step", cfg.omega_step, "omega sweep step");
    s->add_option("--samples", cfg.samples, "frequencies per direction");
    s->add_option("--periodic-n", cfg.periodic_n, "periodic mesh size for stencil extraction");
    s->add_option("--penalty", cfg.penalty, "interior penalty (default 6k^2)");
    s->add_option("--jobs", cfg.jobs, "worker threads (default: all cores)");
    s->add_flag("--identity", cfg.identity, "stencil-dump: dump the identity operator");
    s->add_flag("--zero-guess", cfg.zero_guess, "measure: start from the zero vector");
    subs.push_back(s);
    return s;
  };
  add("table1", "LFA two-grid factors with optimized omega");
  add("table2", "LFA two-grid factors for more smoothing steps");
  add("measure", "measured two-grid and multigrid convergence factors");
  add("stencil-dump", "stencils of the periodic trace operator");
  add("sweep-omega", "LFA factor as a function of omega");
  add("verify", "property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = nullptr;
    for (auto* s : subs)
      if (s->parsed()) sub = s;
    cfg.command = sub->get_name();

    std::vector<std::string> given;
    for (const CLI::Option* opt : sub->get_options())
      if (opt->count() > 0) given.push_back(opt->get_name().substr(2));
    auto is_given = [&](const std::string& k) { return std::find(given.begin(), given.end(), k) != given.end(); };
    if (!f.config.empty()) apply_config(cfg, read_config_file(f.config), given);
    if (is_given("method")) cfg.method = parse_method(f.method);
    if (is_given("degree")) cfg.degree = f.degree;
    if (is_given("smoother")) cfg.smoother = parse_smoother(f.smoother);
    if (is_given("omega")) cfg.omega = f.omega;
    if (is_given("cycle")) cfg.cycle = parse_cycle(f.cycle);

    if (cfg.command == "table1") {
      emit(cfg, format_csv(cmd_table1(cfg)));
    } else if (cfg.command == "table2") {
      std::vector<CsvRow> t1;
      if (!cfg.omega) {
        std::ifstream probe(cfg.table1);
        if (!probe) throw ValidationError("table2 needs the omega values of table1: run `hdgmg table1 --out " +
                                          cfg.table1 + "` first (or pass --table1 <csv>)");
        t1 = read_csv(cfg.table1);
      }
      emit(cfg, format_csv(cmd_table2(cfg, t1)));
    } else if (cfg.command == "measure") {
      emit(cfg, format_csv(cmd_measure(cfg), true));
    } else if (cfg.command == "stencil-dump") {
      emit(cfg, cmd_stencil_dump(cfg));
    } else if (cfg.command == "sweep-omega") {
      emit(cfg, format_csv(cmd_sweep_omega(cfg)));
    } else if (cfg.command == "verify") {
      bool ok = true;
      std::string text;
      for (const auto& r : run_property_suites()) {
        ok = ok && r.passed();
        text += std::string(r.passed() ? "PASS " : "FAIL ") + r.name + "  error=" + format_number(r.error) +
                " tol=" + format_number(r.tolerance) + "\n";
      }
      emit(cfg, text);
      return ok ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
