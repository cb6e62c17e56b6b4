#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qwork/workstats.hpp"

namespace qwork {

// Ramsey probe gate: maps |0> to the +1 eigenstate of sigma_x.
inline ComplexMatrix hadamard_ancilla() {
  return (pauli_x() + pauli_z()) / std::sqrt(2.0);
}

enum class ProtocolVariant { simple, general, appendix };

inline const char* to_string(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::simple:
      return "simple";
    case ProtocolVariant::general:
      return "general";
    case ProtocolVariant::appendix:
      return "appendix";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Conditional gates, full-matrix form
// ---------------------------------------------------------------------------

namespace detail {
inline void require_commuting(const ComplexMatrix& a, const ComplexMatrix& b,
                              const char* who) {
  const double comm = (a * b - b * a).norm();
  if (comm > 1e-10 * std::max(1.0, a.norm() * b.norm())) {
    throw std::invalid_argument(std::string(who) +
                                ": Hamiltonians do not commute; use the "
                                "general controlled gate");
  }
}
}  // namespace detail

// Local system evolution e^{-i H_i u} ⊗ 1_A.
inline ComplexMatrix gate_local(double u, const ComplexMatrix& h_initial) {
  return kron(expm(h_initial, Complex(0, -u)),
              ComplexMatrix::Identity(2, 2));
}

// Commuting-case controlled gate: applies e^{-i(H_f - H_i)u} on the system
// only when the ancilla is excited.
inline ComplexMatrix gate_controlled_simple(double u,
                                            const ComplexMatrix& h_initial,
                                            const ComplexMatrix& h_final) {
  detail::require_commuting(h_initial, h_final, "gate_controlled_simple");
  const Eigen::Index n = h_initial.rows();
  return kron(ComplexMatrix::Identity(n, n), qubit_projector(0)) +
         kron(expm(h_final - h_initial, Complex(0, -u)), qubit_projector(1));
}

// General controlled evolution: the |0> branch evolves then measures-free,
// the |1> branch interleaves the final-Hamiltonian phase with the process.
inline ComplexMatrix gate_controlled_general(double u,
                                             const ComplexMatrix& h_initial,
                                             const ComplexMatrix& h_final,
                                             const ComplexMatrix& u_tau) {
  return kron(u_tau * expm(h_initial, Complex(0, -u)), qubit_projector(0)) +
         kron(expm(h_final, Complex(0, -u)) * u_tau, qubit_projector(1));
}

// Decomposition of the general controlled gate into two controlled halves;
// the full gate is (1 ⊗ sigma_x) G2 (1 ⊗ sigma_x) G1.
inline std::pair<ComplexMatrix, ComplexMatrix> gates_G1_G2(
    double u, const ComplexMatrix& h_initial, const ComplexMatrix& h_final,
    const ComplexMatrix& u_tau) {
  const Eigen::Index n = h_initial.rows();
  const ComplexMatrix idle =
      kron(ComplexMatrix::Identity(n, n), qubit_projector(0));
  ComplexMatrix g1 =
      idle +
      kron(expm(h_final, Complex(0, -u)) * u_tau, qubit_projector(1));
  ComplexMatrix g2 =
      idle +
      kron(u_tau * expm(h_initial, Complex(0, -u)), qubit_projector(1));
  return {std::move(g1), std::move(g2)};
}

// ---------------------------------------------------------------------------
// Scenario context: everything a protocol run reuses across a u-grid
// ---------------------------------------------------------------------------

struct ScenarioContext {
  Scenario scenario;
  OscillatorSystem sys;
  double lambda_start;
  double lambda_end;
  ComplexMatrix h_initial;
  ComplexMatrix h_final;
  EigenSystem eig_initial;
  EigenSystem eig_final;
  std::optional<EigenSystem> eig_difference;  // h_final - h_initial, commuting case
  Complex alpha_tau;
  ComplexMatrix displacement_op;  // D(alpha_tau)
  ComplexMatrix propagator;       // closed-form U_tau
  ComplexMatrix thermal;
  bool commuting;

  // products cached for per-u gate assembly
  ComplexMatrix adj_vf_u;  // V_f^dag U_tau
  ComplexMatrix adj_vf_d;  // V_f^dag D
  ComplexMatrix u_vi;      // U_tau V_i
  // Residual diagonal left by realizing e^{+i h_free tau} through forward
  // evolution over the rest of the period: the drive evolution and its
  // rewind compose to a whole number of free periods.
  ComplexVector drive_rewind_phase;

  explicit ScenarioContext(const Scenario& sc)
      : scenario(sc), sys(sc.omega, sc.cutoff) {
    sc.validate();
    lambda_start = sc.drive.value_at(0.0);
    lambda_end = sc.drive.final_value(sc.tau);
    h_initial = h_osc(sys, lambda_start, sc.phi);
    h_final = h_osc(sys, lambda_end, sc.phi);
    eig_initial = hermitian_eig(h_initial);
    eig_final = hermitian_eig(h_final);
    const double comm = (h_initial * h_final - h_final * h_initial).norm();
    commuting =
        comm <= 1e-10 * std::max(1.0, h_initial.norm() * h_final.norm());
    if (commuting) {
      eig_difference = hermitian_eig(h_final - h_initial);
    }
    const PropagatorResult closed =
        closed_form(sc.drive, sc.omega, sc.phi, sc.tau, sys);
    alpha_tau = closed.alpha;
    propagator = closed.unitary;
    displacement_op = displacement(alpha_tau, sys);
    thermal = thermal_state(eig_initial, sc.beta);
    adj_vf_u = eig_final.eigenvectors.adjoint() * propagator;
    adj_vf_d = eig_final.eigenvectors.adjoint() * displacement_op;
    u_vi = propagator * eig_initial.eigenvectors;
    const double period = 2.0 * M_PI / sc.omega;
    double rem = std::fmod(sc.tau, period);
    if (rem < 0.0) rem += period;
    drive_rewind_phase = free_phase(sc.tau + (period - rem));
  }

  bool drive_starts_at_zero() const {
    return std::abs(lambda_start) <= 1e-12;
  }

  // e^{-i u h_free} on the diagonal.
  ComplexVector free_phase(double u) const {
    ComplexVector d(sys.cutoff);
    for (Eigen::Index n = 0; n < sys.cutoff; ++n) {
      d[n] = std::exp(Complex(0, -u * sys.omega * double(n)));
    }
    return d;
  }
};

// ---------------------------------------------------------------------------
// Displaced-oscillator gate set
// ---------------------------------------------------------------------------

// Joint evolution over the process duration: free evolution on the system,
// with the drive displacement applied only on the excited ancilla branch.
inline ComplexMatrix gate_conditioned_drive(const ScenarioContext& ctx) {
  const Eigen::Index n = ctx.sys.cutoff;
  const ComplexMatrix controlled_d =
      kron(ComplexMatrix::Identity(n, n), qubit_projector(0)) +
      kron(ctx.displacement_op, qubit_projector(1));
  return controlled_d *
         kron(free_evolution(ctx.sys, Complex(0, -ctx.scenario.tau)),
              ComplexMatrix::Identity(2, 2));
}

// Evolution for a time u with the work parameter held at its final value:
// block-diagonal, free on |0>, driven-Hamiltonian phase on |1>.
inline ComplexMatrix gate_frozen_drive(const ScenarioContext& ctx, double u) {
  return kron(ComplexMatrix(ctx.free_phase(u).asDiagonal()),
              qubit_projector(0)) +
         kron(ctx.eig_final.exp_scaled(Complex(0, -u)), qubit_projector(1));
}

// The two controlled gates realizing the displaced-oscillator protocol; the
// backward free evolution is implemented through the full-period identity.
inline std::pair<ComplexMatrix, ComplexMatrix> gate_displaced_halves(
    const ScenarioContext& ctx, double u) {
  const ComplexMatrix rewind =
      kron(inverse_free_evolution(ctx.sys.omega, ctx.scenario.tau, ctx.sys),
           ComplexMatrix::Identity(2, 2));
  const ComplexMatrix conditioned = gate_conditioned_drive(ctx);
  ComplexMatrix g2 = conditioned * rewind;
  ComplexMatrix g1 = gate_frozen_drive(ctx, u) * g2;
  return {std::move(g1), std::move(g2)};
}

// (1 ⊗ sigma_x) G2 (1 ⊗ sigma_x) G1 for the displaced gate set: equals a
// controlled displacement with the initial/final phases on the two branches.
inline ComplexMatrix gate_displaced_composed(const ScenarioContext& ctx,
                                             double u) {
  const Eigen::Index n = ctx.sys.cutoff;
  const ComplexMatrix flip =
      kron(ComplexMatrix::Identity(n, n), pauli_x());
  auto [g1, g2] = gate_displaced_halves(ctx, u);
  return flip * g2 * flip * g1;
}

// ---------------------------------------------------------------------------
// Ancilla dephasing
// ---------------------------------------------------------------------------

// Exponential decay of the ancilla coherences. The elapsed time is |u| by
// default; the u_plus_constant rule adds a fixed gate-duration offset.
struct DephasingModel {
  enum class DurationRule { u_only, u_plus_constant };

  double gamma = 0.0;
  DurationRule rule = DurationRule::u_only;
  double constant_time = 0.0;

  double duration(double u) const {
    const double base = std::abs(u);
    return rule == DurationRule::u_only ? base : base + constant_time;
  }

  void validate() const {
    if (gamma < 0.0 || constant_time < 0.0) {
      throw std::invalid_argument(
          "dephasing model: gamma and constant_time must be non-negative");
    }
  }
};

// Phase-damping channel on the ancilla: coherence blocks decay as e^{-gamma t},
// populations are untouched. Accepts a bare 2x2 ancilla state or a joint
// (system ⊗ ancilla) state.
inline ComplexMatrix dephase_ancilla(const ComplexMatrix& rho, double gamma,
                                     double t) {
  if (t < 0.0) {
    throw std::invalid_argument("dephase_ancilla: time must be non-negative");
  }
  if (rho.rows() != rho.cols() || rho.rows() % 2 != 0) {
    throw std::invalid_argument(
        "dephase_ancilla: state must be square with an even dimension");
  }
  const double factor = std::exp(-gamma * t);
  ComplexMatrix out = rho;
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      if ((r % 2) != (c % 2)) out(r, c) *= factor;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Protocol runs
// ---------------------------------------------------------------------------

struct ProtocolResult {
  ComplexMatrix rho_ancilla;  // 2x2 reduced state after the closing Hadamard
  Complex chi_readout;        // <sigma_z> + i <sigma_y>
  bool damped = false;
};

namespace detail {

// Joint oscillator-qubit density matrix stored as its ancilla blocks
// (b10 = b01^dag is implied). Every protocol operation is ancilla-local,
// system-local or ancilla-block-diagonal, so nothing here ever touches a
// (2N)^2 matrix.
class JointBlocks {
 public:
  explicit JointBlocks(const ComplexMatrix& rho_system)
      : b00(rho_system),
        b01(ComplexMatrix::Zero(rho_system.rows(), rho_system.cols())),
        b11(ComplexMatrix::Zero(rho_system.rows(), rho_system.cols())) {}

  void apply_ancilla(const ComplexMatrix& w) {
    const ComplexMatrix b10 = b01.adjoint();
    const auto mix = [&](int j, int k) {
      return w(j, 0) * std::conj(w(k, 0)) * b00 +
             w(j, 0) * std::conj(w(k, 1)) * b01 +
             w(j, 1) * std::conj(w(k, 0)) * b10 +
             w(j, 1) * std::conj(w(k, 1)) * b11;
    };
    ComplexMatrix n00 = mix(0, 0);
    ComplexMatrix n01 = mix(0, 1);
    ComplexMatrix n11 = mix(1, 1);
    b00 = std::move(n00);
    b01 = std::move(n01);
    b11 = std::move(n11);
  }

  void apply_system(const ComplexMatrix& v) {
    b00 = v * b00 * v.adjoint();
    b01 = v * b01 * v.adjoint();
    b11 = v * b11 * v.adjoint();
  }

  // Controlled gate with an identity |0> branch.
  void apply_controlled(const ComplexMatrix& one_branch) {
    b01 = b01 * one_branch.adjoint();
    b11 = one_branch * b11 * one_branch.adjoint();
  }

  // Controlled gate whose |0> branch is diagonal.
  void apply_conditional_diag(const ComplexVector& zero_branch,
                              const ComplexMatrix& one_branch) {
    b00 = zero_branch.asDiagonal() * b00 *
          zero_branch.conjugate().asDiagonal();
    b01 = zero_branch.asDiagonal() * b01 * one_branch.adjoint();
    b11 = one_branch * b11 * one_branch.adjoint();
  }

  void apply_sigma_x() {
    std::swap(b00, b11);
    b01 = ComplexMatrix(b01.adjoint());
  }

  void dephase(double factor) { b01 *= factor; }

  ComplexMatrix ancilla_reduction() const {
    ComplexMatrix rho(2, 2);
    rho(0, 0) = b00.trace();
    rho(0, 1) = b01.trace();
    rho(1, 0) = std::conj(rho(0, 1));
    rho(1, 1) = b11.trace();
    return rho;
  }

 private:
  ComplexMatrix b00, b01, b11;
};

struct ConditionalStep {
  std::optional<ComplexVector> zero_branch_diag;  // identity when absent
  ComplexMatrix one_branch;
};

inline ProtocolResult run_pipeline(
    const ComplexMatrix& rho_system,
    const std::optional<ComplexMatrix>& local_first,
    const std::vector<ConditionalStep>& steps, bool flip_between,
    const std::optional<DephasingModel>& dephasing, double u) {
  if (dephasing) dephasing->validate();
  JointBlocks state(rho_system);
  const ComplexMatrix had = hadamard_ancilla();
  state.apply_ancilla(had);
  if (local_first) state.apply_system(*local_first);

  double factor = 1.0;
  if (dephasing && dephasing->gamma > 0.0) {
    const double slice = dephasing->duration(u) / double(steps.size());
    factor = std::exp(-dephasing->gamma * slice);
  }
  for (const auto& step : steps) {
    if (step.zero_branch_diag) {
      state.apply_conditional_diag(*step.zero_branch_diag, step.one_branch);
    } else {
      state.apply_controlled(step.one_branch);
    }
    state.dephase(factor);
    if (flip_between) state.apply_sigma_x();
  }
  state.apply_ancilla(had);

  ProtocolResult out;
  out.rho_ancilla = state.ancilla_reduction();
  const double trace_drift = std::abs(out.rho_ancilla.trace() - Complex(1.0));
  if (trace_drift > 1e-9) {
    throw std::runtime_error(
        "run_protocol: joint-state trace drifted by more than 1e-9");
  }
  out.chi_readout = (out.rho_ancilla * pauli_z()).trace() +
                    kImaginary * (out.rho_ancilla * pauli_y()).trace();
  out.damped = dephasing.has_value() && dephasing->gamma > 0.0;
  return out;
}

}  // namespace detail

// Full Ramsey sequence on a scenario: prepare thermal ⊗ |0><0|, Hadamard,
// variant-specific conditional gates with optional dephasing after each,
// Hadamard, trace out the system. The readout equals the characteristic
// function of the process (times the dephasing envelope).
inline ProtocolResult run_protocol(
    double u, const ScenarioContext& ctx, ProtocolVariant variant,
    const std::optional<DephasingModel>& dephasing = std::nullopt) {
  using detail::ConditionalStep;
  switch (variant) {
    case ProtocolVariant::simple: {
      if (!ctx.commuting) {
        throw std::invalid_argument(
            "run_protocol(simple): scenario Hamiltonians do not commute; "
            "use the general or appendix variant");
      }
      ComplexMatrix local = ctx.eig_initial.exp_scaled(Complex(0, -u));
      std::vector<ConditionalStep> steps(1);
      steps[0].one_branch = ctx.eig_difference->exp_scaled(Complex(0, -u));
      return detail::run_pipeline(ctx.thermal, local, steps, false, dephasing,
                                  u);
    }
    case ProtocolVariant::general: {
      std::vector<ConditionalStep> steps(2);
      steps[0].one_branch =
          ctx.eig_final.eigenvectors *
          (ctx.eig_final.exp_vector(Complex(0, -u)).asDiagonal() *
           ctx.adj_vf_u);
      steps[1].one_branch =
          ctx.u_vi * (ctx.eig_initial.exp_vector(Complex(0, -u)).asDiagonal() *
                      ctx.eig_initial.eigenvectors.adjoint());
      return detail::run_pipeline(ctx.thermal, std::nullopt, steps, true,
                                  dephasing, u);
    }
    case ProtocolVariant::appendix: {
      if (!ctx.drive_starts_at_zero()) {
        throw std::invalid_argument(
            "run_protocol(appendix): the displaced gate set requires the "
            "drive to start from zero");
      }
      std::vector<ConditionalStep> steps(2);
      steps[0].zero_branch_diag = ComplexVector(
          ctx.free_phase(u).cwiseProduct(ctx.drive_rewind_phase));
      steps[0].one_branch =
          ctx.eig_final.eigenvectors *
          (ctx.eig_final.exp_vector(Complex(0, -u)).asDiagonal() *
           ctx.adj_vf_d) *
          ctx.drive_rewind_phase.asDiagonal();
      steps[1].zero_branch_diag = ctx.drive_rewind_phase;
      steps[1].one_branch =
          ctx.displacement_op * ctx.drive_rewind_phase.asDiagonal();
      return detail::run_pipeline(ctx.thermal, std::nullopt, steps, true,
                                  dephasing, u);
    }
  }
  throw std::logic_error("run_protocol: unknown variant");
}

// Process-level run for externally supplied Hamiltonians and propagator
// (simple and general variants only; the displaced gate set is tied to the
// oscillator scenario).
inline ProtocolResult run_protocol(
    double u, const TwoPointProcess& process, ProtocolVariant variant,
    const std::optional<DephasingModel>& dephasing = std::nullopt) {
  using detail::ConditionalStep;
  switch (variant) {
    case ProtocolVariant::simple: {
      detail::require_commuting(process.h_initial, process.h_final,
                                "run_protocol(simple)");
      ComplexMatrix local = expm(process.h_initial, Complex(0, -u));
      std::vector<ConditionalStep> steps(1);
      steps[0].one_branch =
          expm(process.h_final - process.h_initial, Complex(0, -u));
      return detail::run_pipeline(process.initial_state, local, steps, false,
                                  dephasing, u);
    }
    case ProtocolVariant::general: {
      std::vector<ConditionalStep> steps(2);
      steps[0].one_branch =
          expm(process.h_final, Complex(0, -u)) * process.propagator;
      steps[1].one_branch =
          process.propagator * expm(process.h_initial, Complex(0, -u));
      return detail::run_pipeline(process.initial_state, std::nullopt, steps,
                                  true, dephasing, u);
    }
    case ProtocolVariant::appendix:
      throw std::invalid_argument(
          "run_protocol: the appendix variant needs a scenario context");
  }
  throw std::logic_error("run_protocol: unknown variant");
}

}  // namespace qwork
