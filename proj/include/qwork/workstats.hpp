#pragma once

#include <array>
#include <vector>

#include "qwork/propagate.hpp"

namespace qwork {

// ---------------------------------------------------------------------------
// Two-point-measurement work distribution
// ---------------------------------------------------------------------------

struct WorkPoint {
  double w;
  double p;
};

// Discrete work distribution; w strictly ascending after degeneracy binning.
struct WorkDistribution {
  std::vector<WorkPoint> points;

  double total() const {
    double s = 0.0;
    for (const auto& pt : points) s += pt.p;
    return s;
  }

  double moment(int k) const {
    double s = 0.0;
    for (const auto& pt : points) s += pt.p * std::pow(pt.w, k);
    return s;
  }
};

struct ChiSample {
  Complex u;
  Complex value;
};

namespace detail {
inline void require_dephased_initial_state(const ComplexMatrix& rho0,
                                           const ComplexMatrix& h_initial,
                                           const char* who) {
  const double comm = (rho0 * h_initial - h_initial * rho0).norm();
  if (comm > 1e-8 * std::max(1.0, h_initial.norm())) {
    throw std::invalid_argument(
        std::string(who) +
        ": initial state must commute with the initial Hamiltonian "
        "(projective energy statistics presume dephased populations)");
  }
}
}  // namespace detail

// Projective energy statistics: measure the initial energy, evolve, measure
// the final energy. Work values within bin_tol of each other are merged and
// their probabilities summed; merged bins report the probability-weighted
// mean W. Bins below a 1e-15 noise floor are dropped.
inline WorkDistribution tpm_distribution(const ComplexMatrix& h_initial,
                                         const ComplexMatrix& h_final,
                                         const ComplexMatrix& u_tau,
                                         const ComplexMatrix& rho0,
                                         double bin_tol) {
  detail::require_dephased_initial_state(rho0, h_initial, "tpm_distribution");
  const EigenSystem ei = hermitian_eig(h_initial);
  const EigenSystem ef = hermitian_eig(h_final);
  const Eigen::Index n = ei.eigenvalues.size();

  // initial populations in the H_i eigenbasis
  RealVector pops(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    pops(k) = std::max(
        0.0,
        std::real(Complex(ei.eigenvectors.col(k).adjoint() * rho0 *
                          ei.eigenvectors.col(k))));
  }

  // transition probabilities |<m|U|n>|^2
  const ComplexMatrix overlap =
      ef.eigenvectors.adjoint() * u_tau * ei.eigenvectors;

  std::vector<WorkPoint> raw;
  raw.reserve(std::size_t(n) * std::size_t(n));
  for (Eigen::Index init = 0; init < n; ++init) {
    if (pops(init) == 0.0) continue;
    for (Eigen::Index fin = 0; fin < n; ++fin) {
      const double p = std::norm(overlap(fin, init)) * pops(init);
      raw.push_back({ef.eigenvalues(fin) - ei.eigenvalues(init), p});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const WorkPoint& a, const WorkPoint& b) { return a.w < b.w; });

  WorkDistribution dist;
  std::size_t i = 0;
  while (i < raw.size()) {
    double mass = 0.0, weighted = 0.0;
    const double anchor = raw[i].w;
    std::size_t j = i;
    for (; j < raw.size() && raw[j].w - anchor <= bin_tol; ++j) {
      mass += raw[j].p;
      weighted += raw[j].p * raw[j].w;
    }
    if (mass > 1e-15) {
      dist.points.push_back({weighted / mass, mass});
    }
    i = j;
  }
  return dist;
}

// Fourier sum over a work distribution (real u only).
inline ChiSample chi_from_distribution(double u, const WorkDistribution& dist) {
  Complex acc = 0.0;
  for (const auto& pt : dist.points) {
    acc += pt.p * std::exp(kImaginary * u * pt.w);
  }
  return {Complex(u, 0.0), acc};
}

// ---------------------------------------------------------------------------
// Characteristic function, trace route
// ---------------------------------------------------------------------------

// Evaluates chi(u) = Tr[U^dag e^{iuH_f} U e^{-iuH_i} rho0] from one pair of
// eigendecompositions, reusable across a whole u-grid. Real u uses plain
// matrix products for any rho0. Complex u (imaginary-time arguments) fuses
// e^{-iuH_i} with the initial populations so nothing overflows; when rho0 is
// not diagonal in the H_i eigenbasis that fusion does not apply and the
// plain product form is used instead, which is safe while |Im u| E_max stays
// inside the double exponent range.
class ChiEvaluator {
 public:
  ChiEvaluator(const ComplexMatrix& h_initial, const ComplexMatrix& h_final,
               const ComplexMatrix& u_tau, const ComplexMatrix& rho0)
      : eig_initial_(hermitian_eig(h_initial)),
        eig_final_(hermitian_eig(h_final)),
        propagator_(u_tau) {
    adj_vf_u_ = eig_final_.eigenvectors.adjoint() * u_tau;
    adj_vi_rho_ = eig_initial_.eigenvectors.adjoint() * rho0;
    transition_ = adj_vf_u_ * eig_initial_.eigenvectors;
    const ComplexMatrix in_basis = adj_vi_rho_ * eig_initial_.eigenvectors;
    populations_ = in_basis.diagonal().real().cwiseMax(0.0);
    const double comm = (rho0 * h_initial - h_initial * rho0).norm();
    dephased_ = comm <= 1e-8 * std::max(1.0, h_initial.norm());
  }

  Complex operator()(Complex u) const {
    if (u.imag() == 0.0 || !dephased_) {
      const ComplexMatrix evolved =
          eig_final_.eigenvectors *
          (eig_final_.exp_vector(kImaginary * u).asDiagonal() * adj_vf_u_);
      const ComplexMatrix heisenberg = propagator_.adjoint() * evolved;
      const ComplexMatrix rotated_state =
          eig_initial_.eigenvectors *
          (eig_initial_.exp_vector(-kImaginary * u).asDiagonal() *
           adj_vi_rho_);
      return heisenberg.cwiseProduct(rotated_state.transpose()).sum();
    }
    // chi = sum_{m,n} e^{iuE'_m} |<m|U|n>|^2 e^{-iuE_n} p_n with the
    // population folded into the exponent, so p_n e^{beta E_n} never goes
    // through an overflowing intermediate.
    const ComplexMatrix& b = transition_;
    const ComplexVector ef = eig_final_.exp_vector(kImaginary * u);
    ComplexVector weights(populations_.size());
    for (Eigen::Index n = 0; n < weights.size(); ++n) {
      weights[n] = std::exp(Complex(std::log(populations_(n)), 0.0) -
                            kImaginary * u * eig_initial_.eigenvalues(n));
    }
    Complex acc = 0.0;
    for (Eigen::Index n = 0; n < b.cols(); ++n) {
      Complex col = 0.0;
      for (Eigen::Index m = 0; m < b.rows(); ++m) {
        col += std::norm(b(m, n)) * ef[m];
      }
      acc += col * weights[n];
    }
    return acc;
  }

  const EigenSystem& initial_eig() const { return eig_initial_; }
  const EigenSystem& final_eig() const { return eig_final_; }

 private:
  EigenSystem eig_initial_;
  EigenSystem eig_final_;
  ComplexMatrix propagator_;
  ComplexMatrix adj_vf_u_;    // V_f^dag U
  ComplexMatrix adj_vi_rho_;  // V_i^dag rho0
  RealVector populations_;
  bool dephased_ = false;
  ComplexMatrix transition_;  // V_f^dag U V_i
};

inline ChiSample chi_direct(Complex u, const ComplexMatrix& h_initial,
                            const ComplexMatrix& h_final,
                            const ComplexMatrix& u_tau,
                            const ComplexMatrix& rho0) {
  return {u, ChiEvaluator(h_initial, h_final, u_tau, rho0)(u)};
}

// Commuting case: both Hamiltonians share the operator part h_op, only the
// prefactor changes, and chi collapses to Tr[e^{i(g_tau - g_0) u h_op} rho0].
inline ChiSample chi_commuting(Complex u, const ComplexMatrix& h_op,
                               double g_initial, double g_final,
                               const ComplexMatrix& rho0) {
  const ComplexMatrix phase =
      expm(h_op, kImaginary * u * (g_final - g_initial));
  return {u, phase.cwiseProduct(rho0.transpose()).sum()};
}

// ---------------------------------------------------------------------------
// Forward/backward processes and fluctuation relations
// ---------------------------------------------------------------------------

struct TwoPointProcess {
  ComplexMatrix h_initial;
  ComplexMatrix h_final;
  ComplexMatrix propagator;
  ComplexMatrix initial_state;
  double beta;
};

// Oscillator process described by a scenario: thermal start under H(lambda_0),
// closed-form propagator, final Hamiltonian at lambda(tau).
inline TwoPointProcess forward_process(const Scenario& sc) {
  sc.validate();
  const OscillatorSystem sys(sc.omega, sc.cutoff);
  const double lambda_start = sc.drive.value_at(0.0);
  const double lambda_end = sc.drive.final_value(sc.tau);
  TwoPointProcess p;
  p.h_initial = h_osc(sys, lambda_start, sc.phi);
  p.h_final = h_osc(sys, lambda_end, sc.phi);
  p.propagator = closed_form(sc.drive, sc.omega, sc.phi, sc.tau, sys).unitary;
  p.initial_state = thermal_state(p.h_initial, sc.beta);
  p.beta = sc.beta;
  return p;
}

// Reversed process: swap the Hamiltonians, invert the propagator, thermalize
// at the final Hamiltonian.
inline TwoPointProcess backward_process(const TwoPointProcess& fwd) {
  TwoPointProcess b;
  b.h_initial = fwd.h_final;
  b.h_final = fwd.h_initial;
  b.propagator = fwd.propagator.adjoint();
  b.initial_state = thermal_state(fwd.h_final, fwd.beta);
  b.beta = fwd.beta;
  return b;
}

inline TwoPointProcess backward_process(const Scenario& sc) {
  return backward_process(forward_process(sc));
}

inline ChiSample chi_direct(Complex u, const TwoPointProcess& p) {
  return chi_direct(u, p.h_initial, p.h_final, p.propagator, p.initial_state);
}

struct CrooksEstimate {
  double delta_f;
  double imag_residual;  // |arg| of the chi ratio; ~0 when the relation holds
};

// Free-energy change recovered from the forward/backward characteristic
// functions: (1/beta) ln[chi_backward(-u + i beta) / chi_forward(u)].
inline CrooksEstimate crooks_delta_f(double beta, Complex chi_forward,
                                     Complex chi_backward_conjugate_point) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("crooks_delta_f: beta must be positive");
  }
  if (std::abs(chi_forward) < 1e-12) {
    throw std::domain_error(
        "crooks_delta_f: |chi(u)| < 1e-12, ratio undefined at this u");
  }
  const Complex ratio = chi_backward_conjugate_point / chi_forward;
  return {std::log(std::abs(ratio)) / beta, std::abs(std::arg(ratio))};
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

inline double work_moments(const WorkDistribution& dist, int k) {
  if (k < 0 || k > 2) {
    throw std::invalid_argument("work_moments: k must be 0, 1 or 2");
  }
  return dist.moment(k);
}

// Moments from chi sampled on the symmetric five-point stencil
// u = {-2h, -h, 0, h, 2h}: <W^k> = (-i)^k d^k chi / du^k at 0.
inline double chi_derivative_moments(const std::array<Complex, 5>& chi,
                                     double spacing, int k) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("chi_derivative_moments: spacing must be > 0");
  }
  switch (k) {
    case 0:
      return std::real(chi[2]);
    case 1: {
      const Complex d1 =
          (chi[0] - 8.0 * chi[1] + 8.0 * chi[3] - chi[4]) / (12.0 * spacing);
      return std::real(-kImaginary * d1);
    }
    case 2: {
      const Complex d2 = (-chi[0] + 16.0 * chi[1] - 30.0 * chi[2] +
                          16.0 * chi[3] - chi[4]) /
                         (12.0 * spacing * spacing);
      return std::real(-d2);
    }
    default:
      throw std::invalid_argument(
          "chi_derivative_moments: k must be 0, 1 or 2");
  }
}

}  // namespace qwork
