#pragma once

#include "hdgmg/lfa.hpp"
#include "hdgmg/multigrid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hdgmg {

struct RunConfig {
  std::string command;
  std::optional<Method> method;
  std::optional<int> degree;
  std::optional<SmootherKind> smoother;
  int nu1 = 1;
  int nu2 = 0;
  std::optional<double> omega;
  int n = 64;
  int levels = 5;
  CycleType cycle = CycleType::v;
  std::uint64_t seed = 1;
  int seeds = 1;
  std::string out;
  bool large = false;
  std::string table1 = "table1.csv";
  double omega_lo = 0.5;
  double omega_hi = 1.6;
  double omega_step = 0.02;
  int samples = 32;
  int periodic_n = 16;
  double penalty = 0.0;
  bool identity = false;
  bool zero_guess = false;
  bool two_grid = true;
  bool multigrid = true;
  int jobs = 0;  // 0: hardware concurrency

  /// Precondition checks shared by all commands.
  void validate() const;
};

/// `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);
/// Applies file values to keys not in `explicit_keys`.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& values,
                  const std::vector<std::string>& explicit_keys = {});

struct CsvRow {
  Method method = Method::hdg;
  int k = 1;
  SmootherKind smoother = SmootherKind::vertex_wise;
  int nu1 = 1;
  int nu2 = 0;
  double omega = 1.0;
  double rho = 0.0;
  std::string source = "lfa";
  // measured rows only
  int n = 0;
  int levels = 0;
  std::uint64_t seed = 0;
  double rho_geo = 0.0;
  int iterations = 0;
  std::string status;
};

std::string format_number(double v);
std::string format_csv(const std::vector<CsvRow>& rows, bool measured = false);
std::vector<CsvRow> parse_csv(const std::string& text);
std::vector<CsvRow> read_csv(const std::string& path);

/// (method, k) rows of the LFA tables in table order.
std::vector<std::pair<Method, int>> table_rows();
/// Smoother columns of the second table.
std::vector<SmootherKind> table2_smoothers();

/// Damping used by the first table when it is pinned instead of optimized (CG/EDG k=1 pointwise smoothers).
std::optional<double> pinned_omega(Method m, int k, SmootherKind s);

std::vector<CsvRow> cmd_table1(const RunConfig& cfg);
std::vector<CsvRow> cmd_table2(const RunConfig& cfg, const std::vector<CsvRow>& table1);
std::vector<CsvRow> cmd_sweep_omega(const RunConfig& cfg);
std::vector<CsvRow> cmd_measure(const RunConfig& cfg);
std::string cmd_stencil_dump(const RunConfig& cfg);

/// Runs fn(0..count-1) on up to `jobs` threads; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(int count, int jobs, F fn);

int default_jobs();

}  // namespace hdgmg

#include <exception>
#include <mutex>
#include <thread>

namespace hdgmg {

template <typename T, typename F>
std::vector<T> parallel_map(int count, int jobs, F fn) {
  std::vector<T> out(count);
  if (jobs <= 0) jobs = default_jobs();
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::mutex mu;
  int next = 0;
  std::exception_ptr error;
  auto worker = [&]() {
    for (;;) {
      int i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace hdgmg
