#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwork/linalg.hpp"

namespace qwork {

// ---------------------------------------------------------------------------
// Drive profiles
// ---------------------------------------------------------------------------

enum class DriveKind { sudden, constant, tanh_ramp, tabulated };

// Work-parameter trajectory lambda(t), in units of the oscillator frequency.
// Profiles other than `constant` start from lambda(0) = 0.
struct DriveProfile {
  DriveKind kind = DriveKind::constant;
  double lambda_final = 0.0;
  double ramp_rate = 0.0;  // tanh_ramp: lambda(t) = lambda_final tanh(rate t)
  std::vector<std::pair<double, double>> table;  // (t, lambda), t increasing

  static DriveProfile sudden(double lambda_final) {
    return {DriveKind::sudden, lambda_final, 0.0, {}};
  }
  static DriveProfile constant(double lambda) {
    return {DriveKind::constant, lambda, 0.0, {}};
  }
  static DriveProfile tanh_ramp(double lambda_final, double rate) {
    return {DriveKind::tanh_ramp, lambda_final, rate, {}};
  }
  static DriveProfile tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) {
      throw std::invalid_argument("tabulated drive needs at least one sample");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].first <= samples[i - 1].first) {
        throw std::invalid_argument(
            "tabulated drive times must be strictly increasing");
      }
    }
    return {DriveKind::tabulated, 0.0, 0.0, std::move(samples)};
  }

  // lambda(t). Tabulated profiles interpolate linearly and clamp at both
  // endpoints; the sudden profile is 0 at t = 0 and lambda_final after.
  double value_at(double t) const {
    switch (kind) {
      case DriveKind::sudden:
        return t > 0.0 ? lambda_final : 0.0;
      case DriveKind::constant:
        return lambda_final;
      case DriveKind::tanh_ramp:
        return lambda_final * std::tanh(ramp_rate * t);
      case DriveKind::tabulated: {
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto hi = std::upper_bound(
            table.begin(), table.end(), t,
            [](double x, const auto& s) { return x < s.first; });
        auto lo = hi - 1;
        const double w = (t - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
      }
    }
    return 0.0;
  }

  // Value seen by time integrals: the sudden jump at t = 0 has measure zero,
  // so quadrature nodes use the post-jump value there.
  double integrand_value(double t) const {
    if (kind == DriveKind::sudden) return lambda_final;
    return value_at(t);
  }

  // Coupling entering the final Hamiltonian of a process of duration tau.
  // For the sudden kind this is the right-limit value, so tau = 0 describes
  // an instantaneous quench (trivial propagator, displaced final
  // Hamiltonian).
  double final_value(double tau) const {
    if (kind == DriveKind::sudden) return lambda_final;
    return value_at(tau);
  }

  // True when lambda(t) is the same for every t >= 0.
  bool is_static() const {
    switch (kind) {
      case DriveKind::constant:
        return true;
      case DriveKind::sudden:
      case DriveKind::tanh_ramp:
        return lambda_final == 0.0;
      case DriveKind::tabulated:
        for (const auto& s : table) {
          if (s.second != table.front().second) return false;
        }
        return true;
    }
    return false;
  }
};

inline double eval_drive(const DriveProfile& profile, double t) {
  return profile.value_at(t);
}

// ---------------------------------------------------------------------------
// Oscillator in a truncated Fock space
// ---------------------------------------------------------------------------

// Ladder operators of a harmonic mode truncated to `cutoff` Fock levels.
// The commutator [b, bdag] = 1 holds exactly except at the top level, where
// truncation breaks it; invariants exclude that corner.
struct OscillatorSystem {
  double omega;
  Eigen::Index cutoff;
  ComplexMatrix b;
  ComplexMatrix bdag;

  OscillatorSystem(double omega_, Eigen::Index cutoff_)
      : omega(omega_), cutoff(cutoff_) {
    if (cutoff < 2) {
      throw std::invalid_argument("oscillator cutoff must be at least 2");
    }
    b = ComplexMatrix::Zero(cutoff, cutoff);
    for (Eigen::Index n = 1; n < cutoff; ++n) {
      b(n - 1, n) = std::sqrt(double(n));
    }
    bdag = b.adjoint();
  }
};

// omega * bdag b, built exactly diagonal.
inline ComplexMatrix h_free(const OscillatorSystem& sys) {
  ComplexMatrix h = ComplexMatrix::Zero(sys.cutoff, sys.cutoff);
  for (Eigen::Index n = 0; n < sys.cutoff; ++n) {
    h(n, n) = sys.omega * double(n);
  }
  return h;
}

// Driven oscillator: h_free + lambda (bdag e^{i phi} + b e^{-i phi}).
inline ComplexMatrix h_osc(const OscillatorSystem& sys, double lambda,
                           double phi = 0.0) {
  const Complex phase = std::exp(kImaginary * phi);
  return h_free(sys) + lambda * (phase * sys.bdag + std::conj(phase) * sys.b);
}

// Joint oscillator-qubit Hamiltonian with the drive conditioned on the qubit
// being excited: the |0> block is the free oscillator, the |1> block the
// driven one.
inline ComplexMatrix h_micro(const OscillatorSystem& sys, double lambda,
                             double phi = 0.0) {
  const Complex phase = std::exp(kImaginary * phi);
  return kron(h_free(sys), ComplexMatrix::Identity(2, 2)) +
         lambda * kron(phase * sys.bdag + std::conj(phase) * sys.b,
                       qubit_projector(1));
}

// Joint Hamiltonian with the drive coupled through sigma_x of the qubit
// (charge-qubit setting; the sigma_x eigenstates are the charge-basis
// superposition states).
inline ComplexMatrix h_nano(const OscillatorSystem& sys, double lambda) {
  return kron(h_free(sys), ComplexMatrix::Identity(2, 2)) +
         lambda * kron(sys.b + sys.bdag, pauli_x());
}

// Hadamard conjugation that maps the sigma_x coupling onto a conditioned
// drive. Input must already carry the extra local drive lambda (b + bdag) ⊗ 1;
// the result then equals h_micro with coupling 2 lambda. The qubit Hadamard is
// written in the logical basis that labels the symmetric charge state as
// level 1.
inline ComplexMatrix nano_to_micro(const ComplexMatrix& h_nano_plus_drive,
                                   const OscillatorSystem& sys) {
  if (h_nano_plus_drive.rows() != 2 * sys.cutoff ||
      h_nano_plus_drive.cols() != 2 * sys.cutoff) {
    throw std::invalid_argument("nano_to_micro: joint dimension mismatch");
  }
  const ComplexMatrix had = (pauli_x() - pauli_z()) / std::sqrt(2.0);
  const ComplexMatrix w =
      kron(ComplexMatrix::Identity(sys.cutoff, sys.cutoff), had);
  return w * h_nano_plus_drive * w;
}

// ---------------------------------------------------------------------------
// Thermal states and free energies
// ---------------------------------------------------------------------------

// Gibbs state exp(-beta H)/Z. beta = +inf returns the ground-state projector
// (equal mixture over a degenerate ground space).
inline ComplexMatrix thermal_state(const EigenSystem& es, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("thermal_state: beta must be positive");
  }
  const Eigen::Index n = es.eigenvalues.size();
  const double ground = es.eigenvalues(0);
  RealVector weights(n);
  if (std::isinf(beta)) {
    const double tol = 1e-12 * std::max(1.0, std::abs(ground));
    for (Eigen::Index i = 0; i < n; ++i) {
      weights(i) = (es.eigenvalues(i) - ground <= tol) ? 1.0 : 0.0;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      weights(i) = std::exp(-beta * (es.eigenvalues(i) - ground));
    }
  }
  weights /= weights.sum();
  return es.eigenvectors * weights.cast<Complex>().asDiagonal() *
         es.eigenvectors.adjoint();
}

inline ComplexMatrix thermal_state(const ComplexMatrix& h, double beta) {
  return thermal_state(hermitian_eig(h), beta);
}

struct FreeEnergy {
  double z_initial;
  double z_final;
  double delta_f;  // -(1/beta) ln(Z_f / Z_i)
};

// Partition functions of both Hamiltonians and the equilibrium free-energy
// change. Spectra are shifted by their ground energies before exponentiating
// so large beta never overflows.
inline FreeEnergy partition_and_free_energy(const ComplexMatrix& h_initial,
                                            const ComplexMatrix& h_final,
                                            double beta) {
  if (!(beta > 0.0) || std::isinf(beta)) {
    throw std::invalid_argument(
        "partition_and_free_energy: beta must be positive and finite");
  }
  const RealVector ei = hermitian_eig(h_initial).eigenvalues;
  const RealVector ef = hermitian_eig(h_final).eigenvalues;
  const auto shifted_sum = [beta](const RealVector& e) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      s += std::exp(-beta * (e(i) - e(0)));
    }
    return s;
  };
  const double si = shifted_sum(ei);
  const double sf = shifted_sum(ef);
  FreeEnergy out;
  out.z_initial = std::exp(-beta * ei(0)) * si;
  out.z_final = std::exp(-beta * ef(0)) * sf;
  out.delta_f = (ef(0) - ei(0)) - (std::log(sf) - std::log(si)) / beta;
  return out;
}

inline double beta_from_nbar(double nbar, double omega) {
  if (!(nbar > 0.0)) {
    throw std::invalid_argument("beta_from_nbar: nbar must be positive");
  }
  return std::log1p(1.0 / nbar) / omega;
}

inline double nbar_from_beta(double beta, double omega) {
  return 1.0 / std::expm1(beta * omega);
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

// Full experiment description. Temperature may be supplied as beta directly
// or through nbar; when both are present they must agree.
struct Scenario {
  double omega = 1.0;
  double beta = 0.0;
  std::optional<double> nbar;
  double phi = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  Eigen::Index cutoff = 64;
  DriveProfile drive = DriveProfile::constant(0.0);
  std::vector<double> u_grid;

  static Scenario with_nbar(double nbar, double omega = 1.0) {
    Scenario sc;
    sc.omega = omega;
    sc.nbar = nbar;
    sc.beta = beta_from_nbar(nbar, omega);
    return sc;
  }

  void validate() const {
    if (!(omega > 0.0)) {
      throw std::invalid_argument("scenario: omega must be positive");
    }
    if (!(beta > 0.0)) {
      throw std::invalid_argument("scenario: beta must be positive");
    }
    if (cutoff < 2) {
      throw std::invalid_argument("scenario: cutoff must be at least 2");
    }
    if (tau < 0.0) {
      throw std::invalid_argument("scenario: tau must be non-negative");
    }
    if (gamma < 0.0) {
      throw std::invalid_argument("scenario: gamma must be non-negative");
    }
    if (nbar && std::isfinite(beta)) {
      const double implied = nbar_from_beta(beta, omega);
      if (std::abs(implied - *nbar) > 1e-10 * std::max(1.0, *nbar)) {
        throw std::invalid_argument(
            "scenario: beta and nbar are inconsistent");
      }
    }
  }
};

}  // namespace qwork
