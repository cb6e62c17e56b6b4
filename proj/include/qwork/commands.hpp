#pragma once

#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "qwork/checks.hpp"

namespace qwork {

// ---------------------------------------------------------------------------
// sweep: chi over the u-grid, undamped and with the configured dephasing
// ---------------------------------------------------------------------------

struct SweepRow {
  double u;
  Complex chi;
  Complex chi_damped;
};

// Protocol runs for every grid point, computed in parallel over u with a
// shared read-only context. Row order is the grid order regardless of
// scheduling; n_threads = 0 picks the hardware concurrency.
inline std::vector<SweepRow> compute_sweep(const RunConfig& config,
                                           unsigned n_threads = 0) {
  const auto& grid = config.scenario.u_grid;
  if (grid.empty()) {
    throw std::invalid_argument("sweep: scenario u_grid must not be empty");
  }
  const ScenarioContext ctx(config.scenario);
  const bool damped = config.scenario.gamma > 0.0;
  const std::optional<DephasingModel> dephasing =
      damped ? std::optional<DephasingModel>(config.dephasing())
             : std::nullopt;

  std::vector<SweepRow> rows(grid.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&](std::size_t first, std::size_t stride) {
    try {
      for (std::size_t i = first; i < grid.size(); i += stride) {
        SweepRow row;
        row.u = grid[i];
        row.chi = run_protocol(grid[i], ctx, config.variant).chi_readout;
        row.chi_damped =
            damped
                ? run_protocol(grid[i], ctx, config.variant, dephasing)
                      .chi_readout
                : row.chi;
        rows[i] = row;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  n_threads = std::max<unsigned>(
      1u, std::min<std::size_t>(n_threads, grid.size()));
  if (n_threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back(worker, t, n_threads);
    }
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace detail {
// 17 significant digits round-trip doubles exactly.
inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_sweep_rows(const RunConfig& config,
                             const std::vector<SweepRow>& rows,
                             std::ostream& out) {
  out << "u,omega_u,re_chi,im_chi,re_chi_damped,im_chi_damped,abs_chi\n";
  for (const auto& row : rows) {
    out << detail::format_value(row.u) << ','
        << detail::format_value(config.scenario.omega * row.u) << ','
        << detail::format_value(row.chi.real()) << ','
        << detail::format_value(row.chi.imag()) << ','
        << detail::format_value(row.chi_damped.real()) << ','
        << detail::format_value(row.chi_damped.imag()) << ','
        << detail::format_value(std::abs(row.chi)) << '\n';
  }
}

inline void write_sweep_csv(const RunConfig& config, std::ostream& out) {
  write_sweep_rows(config, compute_sweep(config), out);
}

// Computes everything before touching the filesystem: a failed run leaves no
// partial file behind.
inline void run_sweep_to_file(const RunConfig& config,
                              const std::string& path) {
  const std::vector<SweepRow> rows = compute_sweep(config);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("sweep: cannot open output file: " + path);
  }
  write_sweep_rows(config, rows, out);
}

// ---------------------------------------------------------------------------
// pw: the two-point-measurement work distribution
// ---------------------------------------------------------------------------

inline WorkDistribution compute_pw(const RunConfig& config) {
  const TwoPointProcess p = forward_process(config.scenario);
  const WorkDistribution dist =
      tpm_distribution(p.h_initial, p.h_final, p.propagator, p.initial_state,
                       1e-9 * config.scenario.omega);
  const double drift = std::abs(dist.total() - 1.0);
  if (drift > 1e-10) {
    throw std::runtime_error(
        "pw: work distribution normalization drifted by " +
        detail::format_value(drift));
  }
  return dist;
}

inline void write_pw_rows(const WorkDistribution& dist, std::ostream& out) {
  out << "W,probability\n";
  for (const auto& pt : dist.points) {
    out << detail::format_value(pt.w) << ',' << detail::format_value(pt.p)
        << '\n';
  }
}

inline void write_pw_csv(const RunConfig& config, std::ostream& out) {
  write_pw_rows(compute_pw(config), out);
}

inline void run_pw_to_file(const RunConfig& config, const std::string& path) {
  const WorkDistribution dist = compute_pw(config);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("pw: cannot open output file: " + path);
  }
  write_pw_rows(dist, out);
}

// ---------------------------------------------------------------------------
// verify: run the enabled checks, report, and fail loudly
// ---------------------------------------------------------------------------

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass = true;
};

inline VerifyReport run_verify(const RunConfig& config) {
  VerifyReport report;
  report.checks = run_checks(config);
  for (const auto& c : report.checks) {
    report.all_pass = report.all_pass && c.pass;
  }
  return report;
}

inline void print_verify_report(const VerifyReport& report,
                                std::ostream& out) {
  for (const auto& c : report.checks) {
    char line[160];
    std::snprintf(line, sizeof(line), "[%s] %-34s residual %.3e  tol %.0e",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.residual,
                  c.tolerance);
    out << line << '\n';
  }
  out << (report.all_pass ? "verify: all checks passed"
                          : "verify: FAILURES present")
      << '\n';
}

inline nlohmann::json verify_report_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  }
  return {{"checks", checks}, {"all_pass", report.all_pass}};
}

inline void write_verify_json(const VerifyReport& report,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("verify: cannot open report file: " + path);
  }
  out << verify_report_json(report).dump(2) << '\n';
}

}  // namespace qwork
