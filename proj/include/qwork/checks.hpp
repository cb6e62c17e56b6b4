#pragma once

#include <random>

#include "qwork/config.hpp"

namespace qwork {

struct CheckResult {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

namespace detail {

inline CheckResult check_result(std::string name, double residual,
                                double tolerance) {
  const bool pass = residual < tolerance;
  return {std::move(name), residual, tolerance, pass};
}

inline void require_grid(const RunConfig& config, const char* who) {
  if (config.scenario.u_grid.empty()) {
    throw std::invalid_argument(std::string(who) +
                                ": scenario u_grid must not be empty");
  }
}

inline ComplexMatrix seeded_complex(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  return m;
}

inline ComplexMatrix seeded_hermitian(Eigen::Index n, unsigned seed) {
  ComplexMatrix a = seeded_complex(n, seed);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix seeded_unitary(Eigen::Index n, unsigned seed) {
  Eigen::HouseholderQR<ComplexMatrix> qr(seeded_complex(n, seed));
  return qr.householderQ();
}

}  // namespace detail

// chi(i beta) against e^{-beta dF}; for a drive starting from zero the
// free-energy change is also pinned to the spectral shift -lambda_tau^2/omega.
inline std::vector<CheckResult> check_jarzynski(const RunConfig& config) {
  const TwoPointProcess p = forward_process(config.scenario);
  const Complex chi_ib = chi_direct(Complex(0.0, p.beta), p).value;
  const FreeEnergy fe =
      partition_and_free_energy(p.h_initial, p.h_final, p.beta);
  const double expected = std::exp(-p.beta * fe.delta_f);

  std::vector<CheckResult> out;
  out.push_back(detail::check_result(
      "jarzynski.identity", std::abs(chi_ib - expected) / expected, 1e-6));
  if (std::abs(config.scenario.drive.value_at(0.0)) <= 1e-12) {
    const double lt = config.scenario.drive.final_value(config.scenario.tau);
    out.push_back(detail::check_result(
        "jarzynski.delta_f_shift",
        std::abs(fe.delta_f + lt * lt / config.scenario.omega), 1e-6));
  }
  return out;
}

// Free energy recovered from the forward/backward ratio at -u + i beta:
// u-independent, real-positive ratio, matching the partition-function value.
inline std::vector<CheckResult> check_crooks(const RunConfig& config) {
  detail::require_grid(config, "crooks");
  const TwoPointProcess fwd = forward_process(config.scenario);
  const TwoPointProcess bwd = backward_process(fwd);
  const ChiEvaluator chi_f(fwd.h_initial, fwd.h_final, fwd.propagator,
                           fwd.initial_state);
  const ChiEvaluator chi_b(bwd.h_initial, bwd.h_final, bwd.propagator,
                           bwd.initial_state);
  const FreeEnergy fe =
      partition_and_free_energy(fwd.h_initial, fwd.h_final, fwd.beta);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double worst_dev = 0.0, worst_imag = 0.0;
  for (double u : config.scenario.u_grid) {
    const CrooksEstimate est =
        crooks_delta_f(fwd.beta, chi_f(Complex(u, 0.0)),
                       chi_b(Complex(-u, fwd.beta)));
    lo = std::min(lo, est.delta_f);
    hi = std::max(hi, est.delta_f);
    worst_dev = std::max(worst_dev, std::abs(est.delta_f - fe.delta_f));
    worst_imag = std::max(worst_imag, est.imag_residual);
  }
  return {detail::check_result("crooks.u_spread", hi - lo, 1e-7),
          detail::check_result("crooks.delta_f", worst_dev, 1e-6),
          detail::check_result("crooks.log_imag", worst_imag, 1e-8)};
}

// The binned two-point-measurement distribution and the trace formula are
// independent routes to the same chi.
inline std::vector<CheckResult> check_route_equivalence(
    const RunConfig& config) {
  detail::require_grid(config, "route_equivalence");
  const TwoPointProcess p = forward_process(config.scenario);
  const WorkDistribution dist =
      tpm_distribution(p.h_initial, p.h_final, p.propagator, p.initial_state,
                       1e-9 * config.scenario.omega);
  const ChiEvaluator chi(p.h_initial, p.h_final, p.propagator,
                         p.initial_state);

  double worst = 0.0;
  for (double u : config.scenario.u_grid) {
    worst = std::max(worst, std::abs(chi_from_distribution(u, dist).value -
                                     chi(Complex(u, 0.0))));
  }
  return {detail::check_result("route_equivalence.normalization",
                               std::abs(dist.total() - 1.0), 1e-10),
          detail::check_result("route_equivalence.max_diff", worst, 1e-9)};
}

// Operator identities behind the protocol: the sigma_x sandwich of the two
// controlled halves rebuilds the full controlled gate, and the displaced
// gate set composes to the controlled displacement.
inline std::vector<CheckResult> check_decomposition(const RunConfig& config) {
  double worst_general = 0.0;
  for (unsigned seed : {11u, 12u, 13u}) {
    const Eigen::Index n = 16;
    const ComplexMatrix hi = detail::seeded_hermitian(n, seed);
    const ComplexMatrix hf = detail::seeded_hermitian(n, seed + 100);
    const ComplexMatrix u_tau = detail::seeded_unitary(n, seed + 200);
    const double u = 0.37 + 0.11 * seed;
    const ComplexMatrix direct = gate_controlled_general(u, hi, hf, u_tau);
    auto [g1, g2] = gates_G1_G2(u, hi, hf, u_tau);
    const ComplexMatrix flip =
        kron(ComplexMatrix::Identity(n, n), pauli_x());
    worst_general =
        std::max(worst_general,
                 (flip * g2 * flip * g1 - direct).norm() / direct.norm());
  }

  std::vector<CheckResult> out;
  out.push_back(
      detail::check_result("decomposition.general", worst_general, 1e-10));

  if (std::abs(config.scenario.drive.value_at(0.0)) <= 1e-12) {
    const ScenarioContext ctx(config.scenario);
    double worst = 0.0;
    for (double u : {0.0, 0.7, 2.9, 11.3}) {
      const ComplexMatrix composed = gate_displaced_composed(ctx, u);
      const ComplexMatrix expected =
          kron(ctx.displacement_op *
                   ctx.eig_initial.exp_scaled(Complex(0, -u)),
               qubit_projector(0)) +
          kron(ctx.eig_final.exp_scaled(Complex(0, -u)) *
                   ctx.displacement_op,
               qubit_projector(1));
      worst = std::max(worst,
                       (composed - expected).norm() / expected.norm());
    }
    out.push_back(detail::check_result("decomposition.displaced", worst, 1e-8));
  }
  return out;
}

// Stepped time-ordered propagator against the displacement closed form.
inline std::vector<CheckResult> check_propagator(const RunConfig& config) {
  const Scenario& sc = config.scenario;
  const OscillatorSystem sys(sc.omega, sc.cutoff);
  const PropagatorResult stepped =
      time_ordered(sc.drive, sc.omega, sc.phi, sc.tau, 1 << 14, sys);
  const PropagatorResult exact =
      closed_form(sc.drive, sc.omega, sc.phi, sc.tau, sys);
  return {detail::check_result(
      "propagator.closed_form",
      propagator_distance(stepped.unitary, exact.unitary), 1e-6)};
}

// Doubling the Fock cutoff must leave every reported scalar unchanged at the
// 1e-8 level: chi on the grid, chi(i beta), and the free-energy change.
inline std::vector<CheckResult> check_cutoff_doubling(const RunConfig& config) {
  detail::require_grid(config, "cutoff_doubling");
  Scenario doubled = config.scenario;
  doubled.cutoff *= 2;

  const TwoPointProcess p1 = forward_process(config.scenario);
  const TwoPointProcess p2 = forward_process(doubled);
  const ChiEvaluator chi1(p1.h_initial, p1.h_final, p1.propagator,
                          p1.initial_state);
  const ChiEvaluator chi2(p2.h_initial, p2.h_final, p2.propagator,
                          p2.initial_state);

  double worst = 0.0;
  for (double u : config.scenario.u_grid) {
    worst = std::max(worst,
                     std::abs(chi1(Complex(u, 0.0)) - chi2(Complex(u, 0.0))));
  }

  const double jarzynski_change = std::abs(chi1(Complex(0.0, p1.beta)) -
                                           chi2(Complex(0.0, p2.beta)));
  const double df1 =
      partition_and_free_energy(p1.h_initial, p1.h_final, p1.beta).delta_f;
  const double df2 =
      partition_and_free_energy(p2.h_initial, p2.h_final, p2.beta).delta_f;

  return {detail::check_result("cutoff_doubling.chi_grid", worst, 1e-8),
          detail::check_result("cutoff_doubling.jarzynski", jarzynski_change,
                               1e-8),
          detail::check_result("cutoff_doubling.delta_f",
                               std::abs(df1 - df2), 1e-8)};
}

inline std::vector<CheckResult> run_check(CheckKind kind,
                                          const RunConfig& config) {
  switch (kind) {
    case CheckKind::jarzynski:
      return check_jarzynski(config);
    case CheckKind::crooks:
      return check_crooks(config);
    case CheckKind::route_equivalence:
      return check_route_equivalence(config);
    case CheckKind::decomposition:
      return check_decomposition(config);
    case CheckKind::propagator:
      return check_propagator(config);
    case CheckKind::cutoff_doubling:
      return check_cutoff_doubling(config);
  }
  throw std::logic_error("run_check: unknown check kind");
}

inline std::vector<CheckResult> run_checks(const RunConfig& config) {
  std::vector<CheckResult> out;
  for (CheckKind kind : config.checks) {
    for (auto& r : run_check(kind, config)) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace qwork
