#include "hdgmg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hdgmg {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ValidationError("expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out;
  if (!(in >> out) || !(in >> std::ws).eof()) throw ValidationError("bad value for " + key + ": '" + v + "'");
  return out;
}

LfaOptions lfa_options(const RunConfig& cfg) {
  LfaOptions o;
  o.periodic_n = cfg.periodic_n;
  o.disc.penalty = cfg.penalty;
  return o;
}

LfaConfig lfa_config(const RunConfig& cfg, int nu1, int nu2) {
  LfaConfig c;
  c.samples = cfg.samples;
  c.nu1 = nu1;
  c.nu2 = nu2;
  return c;
}

std::vector<std::pair<Method, int>> selected_rows(const RunConfig& cfg) {
  std::vector<std::pair<Method, int>> out;
  for (auto [m, k] : table_rows()) {
    if (cfg.method && *cfg.method != m) continue;
    if (cfg.degree && *cfg.degree != k) continue;
    out.push_back({m, k});
  }
  if (out.empty() && cfg.method && cfg.degree) out.push_back({*cfg.method, *cfg.degree});
  return out;
}

std::vector<SmootherKind> selected_smoothers(const RunConfig& cfg, const std::vector<SmootherKind>& all) {
  if (cfg.smoother) return {*cfg.smoother};
  return all;
}

const CsvRow* find_row(const std::vector<CsvRow>& rows, Method m, int k, SmootherKind s) {
  for (const auto& r : rows)
    if (r.method == m && r.k == k && r.smoother == s && r.nu1 == 1 && r.nu2 == 0 && r.source == "lfa") return &r;
  return nullptr;
}

}  // namespace

int default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void RunConfig::validate() const {
  if (degree && (*degree < 1 || *degree > 8)) throw ValidationError("degree must be between 1 and 8");
  if (nu1 < 0 || nu2 < 0) throw ValidationError("nu1 and nu2 must be >= 0");
  if (omega && !(*omega >= 0.0 && *omega < 2.0)) throw ValidationError("omega must lie in [0, 2)");
  if (n < 2) throw ValidationError("n must be >= 2");
  if (levels < 1) throw ValidationError("levels must be >= 1");
  if (seeds < 1) throw ValidationError("seeds must be >= 1");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (periodic_n < 4 || periodic_n % 4 != 0) throw ValidationError("periodic extraction size must be a multiple of 4");
  if (!(omega_step > 0.0) || !(omega_lo > 0.0) || !(omega_hi < 2.0) || omega_lo > omega_hi)
    throw ValidationError("omega range must satisfy 0 < lo <= hi < 2 with a positive step");
  if (penalty < 0.0) throw ValidationError("penalty must be positive (0 selects the default)");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& values,
                  const std::vector<std::string>& explicit_keys) {
  for (const auto& [raw, v] : values) {
    std::string key = raw;
    std::replace(key.begin(), key.end(), '_', '-');
    if (std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end()) continue;
    if (key == "method") cfg.method = parse_method(v);
    else if (key == "degree" || key == "k") cfg.degree = parse_number<int>(key, v);
    else if (key == "smoother") cfg.smoother = parse_smoother(v);
    else if (key == "nu1") cfg.nu1 = parse_number<int>(key, v);
    else if (key == "nu2") cfg.nu2 = parse_number<int>(key, v);
    else if (key == "omega") cfg.omega = parse_number<double>(key, v);
    else if (key == "n") cfg.n = parse_number<int>(key, v);
    else if (key == "levels") cfg.levels = parse_number<int>(key, v);
    else if (key == "cycle") cfg.cycle = parse_cycle(v);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "seeds") cfg.seeds = parse_number<int>(key, v);
    else if (key == "out") cfg.out = v;
    else if (key == "large") cfg.large = parse_bool(v);
    else if (key == "table1") cfg.table1 = v;
    else if (key == "omega-lo") cfg.omega_lo = parse_number<double>(key, v);
    else if (key == "omega-hi") cfg.omega_hi = parse_number<double>(key, v);
    else if (key == "omega-step") cfg.omega_step = parse_number<double>(key, v);
    else if (key == "samples") cfg.samples = parse_number<int>(key, v);
    else if (key == "periodic-n") cfg.periodic_n = parse_number<int>(key, v);
    else if (key == "penalty") cfg.penalty = parse_number<double>(key, v);
    else if (key == "jobs") cfg.jobs = parse_number<int>(key, v);
    else throw ValidationError("unknown config key '" + raw + "'");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_csv(const std::vector<CsvRow>& rows, bool measured) {
  std::ostringstream out;
  out << "method,k,smoother,nu1,nu2,omega,rho,source";
  if (measured) out << ",n,levels,seed,rho_geo,iterations,status";
  out << "\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << "," << r.k << "," << to_string(r.smoother) << "," << r.nu1 << "," << r.nu2 << ","
        << format_number(r.omega) << "," << format_number(r.rho) << "," << r.source;
    if (measured)
      out << "," << r.n << "," << r.levels << "," << r.seed << "," << format_number(r.rho_geo) << "," << r.iterations
          << "," << r.status;
    out << "\n";
  }
  return out.str();
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<CsvRow> rows;
  if (!std::getline(in, line) || trim(line).rfind("method,k,smoother,nu1,nu2,omega,rho,source", 0) != 0)
    throw ValidationError("csv: missing header");
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() < 8) throw ValidationError("csv: short row '" + line + "'");
    CsvRow r;
    r.method = parse_method(f[0]);
    r.k = parse_number<int>("k", f[1]);
    r.smoother = parse_smoother(f[2]);
    r.nu1 = parse_number<int>("nu1", f[3]);
    r.nu2 = parse_number<int>("nu2", f[4]);
    r.omega = parse_number<double>("omega", f[5]);
    r.rho = parse_number<double>("rho", f[6]);
    r.source = f[7];
    if (f.size() >= 14) {
      r.n = parse_number<int>("n", f[8]);
      r.levels = parse_number<int>("levels", f[9]);
      r.seed = parse_number<std::uint64_t>("seed", f[10]);
      r.rho_geo = parse_number<double>("rho_geo", f[11]);
      r.iterations = parse_number<int>("iterations", f[12]);
      r.status = f[13];
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::vector<std::pair<Method, int>> table_rows() {
  return {{Method::cg, 1}, {Method::edg, 1}, {Method::hdg, 1}, {Method::cg, 2},  {Method::edg, 2},
          {Method::hdg, 2}, {Method::cg, 3}, {Method::edg, 3}, {Method::hdg, 3}};
}

std::vector<SmootherKind> table2_smoothers() {
  return {SmootherKind::gauss_seidel, SmootherKind::vertex_wise, SmootherKind::element_wise,
          SmootherKind::lt_element_wise};
}

std::optional<double> pinned_omega(Method m, int k, SmootherKind s) {
  if (m != Method::hdg && k == 1 &&
      (s == SmootherKind::jacobi || s == SmootherKind::vertex_wise || s == SmootherKind::lt_vertex_wise))
    return 0.89;
  return std::nullopt;
}

std::vector<CsvRow> cmd_table1(const RunConfig& cfg) {
  cfg.validate();
  const auto rows = selected_rows(cfg);
  const auto smoothers = selected_smoothers(cfg, {std::begin(kAllSmoothers), std::end(kAllSmoothers)});
  auto per_row = parallel_map<std::vector<CsvRow>>(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    auto [m, k] = rows[i];
    LfaModel base = LfaModel::build(m, k, lfa_options(cfg));
    std::vector<CsvRow> out;
    for (SmootherKind s : smoothers) {
      FrequencySweep sweep(base.with_smoother(s), lfa_config(cfg, cfg.nu1, cfg.nu2));
      CsvRow row;
      row.method = m;
      row.k = k;
      row.smoother = s;
      row.nu1 = cfg.nu1;
      row.nu2 = cfg.nu2;
      std::optional<double> fixed = cfg.omega ? cfg.omega : pinned_omega(m, k, s);
      if (fixed) {
        row.omega = *fixed;
        row.rho = sweep.rho(*fixed).rho;
      } else {
        OmegaResult best = sweep.optimize(cfg.omega_lo, cfg.omega_hi, cfg.omega_step);
        row.omega = best.omega;
        row.rho = best.rho;
      }
      out.push_back(row);
    }
    return out;
  });
  std::vector<CsvRow> out;
  for (auto& v : per_row) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<CsvRow> cmd_table2(const RunConfig& cfg, const std::vector<CsvRow>& table1) {
  cfg.validate();
  const auto rows = selected_rows(cfg);
  const auto smoothers = selected_smoothers(cfg, table2_smoothers());
  std::vector<std::pair<int, int>> sweeps = {{1, 1}, {1, 2}, {2, 2}};
  if (cfg.nu1 != 1 || cfg.nu2 != 0) sweeps = {{cfg.nu1, cfg.nu2}};
  for (auto [m, k] : rows)
    for (SmootherKind s : smoothers)
      if (!cfg.omega && !find_row(table1, m, k, s))
        throw ValidationError("no first-table omega for " + to_string(m) + " k=" + std::to_string(k) + " " +
                              to_string(s) + "; run `table1` first and pass its CSV with --table1");
  auto per_row = parallel_map<std::vector<CsvRow>>(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    auto [m, k] = rows[i];
    LfaModel base = LfaModel::build(m, k, lfa_options(cfg));
    std::vector<CsvRow> out;
    for (SmootherKind s : smoothers) {
      LfaModel model = base.with_smoother(s);
      const double omega = cfg.omega ? *cfg.omega : find_row(table1, m, k, s)->omega;
      for (auto [a, b] : sweeps) {
        CsvRow row;
        row.method = m;
        row.k = k;
        row.smoother = s;
        row.nu1 = a;
        row.nu2 = b;
        row.omega = omega;
        row.rho = rho_asp(model, lfa_config(cfg, a, b), omega).rho;
        out.push_back(row);
      }
    }
    return out;
  });
  std::vector<CsvRow> out;
  for (auto& v : per_row) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<CsvRow> cmd_sweep_omega(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.method || !cfg.degree || !cfg.smoother)
    throw ValidationError("sweep-omega needs --method, --degree and --smoother");
  LfaModel model = LfaModel::build(*cfg.method, *cfg.degree, lfa_options(cfg)).with_smoother(*cfg.smoother);
  FrequencySweep sweep(model, lfa_config(cfg, cfg.nu1, cfg.nu2));
  std::vector<CsvRow> out;
  const int count = static_cast<int>(std::floor((cfg.omega_hi - cfg.omega_lo) / cfg.omega_step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    CsvRow row;
    row.method = *cfg.method;
    row.k = *cfg.degree;
    row.smoother = *cfg.smoother;
    row.nu1 = cfg.nu1;
    row.nu2 = cfg.nu2;
    row.omega = cfg.omega_lo + cfg.omega_step * i;
    row.rho = sweep.rho(row.omega).rho;
    out.push_back(row);
  }
  return out;
}

std::vector<CsvRow> cmd_measure(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.levels < 2) throw ValidationError("measure needs at least two levels");
  if (cfg.n > 128 && !cfg.large) throw ValidationError("n > 128 needs --large");
  build_hierarchy(cfg.n, cfg.levels, BoundaryMode::dirichlet);
  const auto rows = selected_rows(cfg);
  const auto smoothers = selected_smoothers(cfg, {std::begin(kAllSmoothers), std::end(kAllSmoothers)});
  std::vector<CsvRow> table1;
  if (!cfg.omega && std::filesystem::exists(cfg.table1)) table1 = read_csv(cfg.table1);

  struct Cell {
    Method m;
    int k;
    SmootherKind s;
  };
  std::vector<Cell> cells;
  for (auto [m, k] : rows)
    for (SmootherKind s : smoothers) cells.push_back({m, k, s});

  auto per_cell = parallel_map<std::vector<CsvRow>>(static_cast<int>(cells.size()), cfg.jobs, [&](int i) {
    const Cell& c = cells[i];
    double omega;
    if (cfg.omega) {
      omega = *cfg.omega;
    } else if (const CsvRow* r = find_row(table1, c.m, c.k, c.s)) {
      omega = r->omega;
    } else if (auto p = pinned_omega(c.m, c.k, c.s)) {
      omega = *p;
    } else {
      LfaModel model = LfaModel::build(c.m, c.k, lfa_options(cfg)).with_smoother(c.s);
      omega = optimize_omega(model, lfa_config(cfg, 1, 0), cfg.omega_lo, cfg.omega_hi, cfg.omega_step).omega;
    }
    MultigridOptions opt;
    opt.smoother = c.s;
    opt.omega = omega;
    opt.nu1 = cfg.nu1;
    opt.nu2 = cfg.nu2;
    opt.cycle = cfg.cycle;
    DiscretizationOptions disc;
    disc.penalty = cfg.penalty;
    MgHierarchy mg(c.m, c.k, cfg.n, cfg.levels, BoundaryMode::dirichlet, opt, disc);
    MeasureOptions mopt;
    mopt.zero_initial_guess = cfg.zero_guess;

    std::vector<CsvRow> out;
    auto run = [&](int depth, const std::string& source) {
      mg.set_depth(depth);
      for (int s = 0; s < cfg.seeds; ++s) {
        ConvergenceReport rep = measure_rho(mg, cfg.seed + s, mopt);
        CsvRow row;
        row.method = c.m;
        row.k = c.k;
        row.smoother = c.s;
        row.nu1 = cfg.nu1;
        row.nu2 = cfg.nu2;
        row.omega = omega;
        row.rho = rep.rho_last;
        row.source = source;
        row.n = cfg.n;
        row.levels = depth;
        row.seed = rep.seed;
        row.rho_geo = rep.rho_geo;
        row.iterations = rep.iterations;
        row.status = rep.diverged ? "diverged" : rep.stagnated ? "stagnated" : rep.oscillating ? "oscillating" : "ok";
        out.push_back(row);
      }
    };
    if (cfg.two_grid) run(2, "measured-tg");
    if (cfg.multigrid && cfg.levels > 2) run(cfg.levels, "measured-mg");
    return out;
  });
  std::vector<CsvRow> out;
  for (auto& v : per_cell) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string cmd_stencil_dump(const RunConfig& cfg) {
  cfg.validate();
  const Method m = cfg.method.value_or(Method::hdg);
  const int k = cfg.degree.value_or(1);
  DofMap dofs(MeshLevel::make(cfg.periodic_n, BoundaryMode::periodic), m, k);
  if (cfg.identity) return extract_stencils([](const Vector& x) { return x; }, dofs).dump();
  DiscretizationOptions disc;
  disc.penalty = cfg.penalty;
  TraceSystem sys = assemble_operator(dofs, disc);
  return extract_stencils(sys.K, dofs).dump();
}

}  // namespace hdgmg
