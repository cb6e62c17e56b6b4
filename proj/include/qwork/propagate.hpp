#pragma once

#include <cmath>
#include <sstream>

#include "qwork/model.hpp"
#include "qwork/warnings.hpp"

namespace qwork {

enum class PropagatorMethod { stepped, closed_form };

struct PropagatorResult {
  ComplexMatrix unitary;
  Complex alpha = 0.0;  // phase-space displacement accumulated by the drive
  PropagatorMethod method = PropagatorMethod::closed_form;
};

// Diagonal free evolution exp(scale * h_free), built without a solver.
inline ComplexMatrix free_evolution(const OscillatorSystem& sys,
                                    Complex scale) {
  ComplexVector d(sys.cutoff);
  for (Eigen::Index n = 0; n < sys.cutoff; ++n) {
    d[n] = std::exp(scale * sys.omega * double(n));
  }
  return d.asDiagonal();
}

// Displacement operator exp(alpha bdag - alpha* b). Warns when the coherent
// support comes close to the Fock cutoff.
inline ComplexMatrix displacement(Complex alpha, const OscillatorSystem& sys) {
  if (10.0 * std::norm(alpha) > double(sys.cutoff)) {
    std::ostringstream msg;
    msg << "displacement: |alpha|^2 = " << std::norm(alpha)
        << " is large for cutoff N = " << sys.cutoff;
    emit_warning(msg.str());
  }
  // exp(alpha bdag - alpha* b) = exp(iK) with K Hermitian
  const ComplexMatrix k =
      -kImaginary * (alpha * sys.bdag - std::conj(alpha) * sys.b);
  ComplexMatrix d = expm(k, kImaginary);
  const double top_amp = std::abs(d(sys.cutoff - 1, 0));
  if (top_amp > 1e-6) {
    std::ostringstream msg;
    msg << "displacement: top Fock amplitude |<N-1|D|0>| = " << top_amp
        << " exceeds 1e-6 at N = " << sys.cutoff;
    emit_warning(msg.str());
  }
  return d;
}

// Displacement amplitude generated by the drive over [t0, t1]:
//   -i e^{-i w t1} \int_{t0}^{t1} lambda(t) e^{i w t} dt
// by composite Simpson quadrature.
inline Complex alpha_over_window(const DriveProfile& drive, double omega,
                                 double t0, double t1, int quad_steps = 4096) {
  if (quad_steps < 2) {
    throw std::invalid_argument("alpha quadrature needs at least 2 steps");
  }
  if (t1 == t0) return 0.0;
  int n = quad_steps + (quad_steps % 2);  // Simpson needs an even count
  const double h = (t1 - t0) / n;
  const auto f = [&](double t) {
    return drive.integrand_value(t) * std::exp(kImaginary * omega * t);
  };
  Complex acc = f(t0) + f(t1);
  for (int k = 1; k < n; ++k) {
    acc += (k % 2 ? 4.0 : 2.0) * f(t0 + k * h);
  }
  const Complex integral = acc * (h / 3.0);
  return -kImaginary * std::exp(-kImaginary * omega * t1) * integral;
}

inline Complex alpha_of_tau(const DriveProfile& drive, double omega,
                            double tau, int quad_steps = 4096) {
  return alpha_over_window(drive, omega, 0.0, tau, quad_steps);
}

// Numerical propagator: product of midpoint-evaluated step unitaries,
// leftmost factor latest in time. Second-order accurate in the step size.
inline PropagatorResult time_ordered(const DriveProfile& drive, double omega,
                                     double phi, double tau, int steps,
                                     const OscillatorSystem& sys) {
  if (steps < 1) {
    throw std::invalid_argument("time_ordered: steps must be >= 1");
  }
  PropagatorResult out;
  out.method = PropagatorMethod::stepped;
  out.alpha = alpha_of_tau(drive, omega, tau);
  out.unitary = ComplexMatrix::Identity(sys.cutoff, sys.cutoff);
  if (tau == 0.0) return out;
  const double dt = tau / steps;
  for (int k = 0; k < steps; ++k) {
    const double t_mid = (k + 0.5) * dt;
    const ComplexMatrix h = h_osc(sys, drive.value_at(t_mid), phi);
    out.unitary = expm(h, Complex(0, -dt)) * out.unitary;
  }
  return out;
}

// Exact propagator of the driven oscillator: a displacement times the free
// evolution. A drive phase phi rotates the displacement amplitude by e^{i phi}.
inline PropagatorResult closed_form(const DriveProfile& drive, double omega,
                                    double phi, double tau,
                                    const OscillatorSystem& sys,
                                    int quad_steps = 4096) {
  PropagatorResult out;
  out.method = PropagatorMethod::closed_form;
  out.alpha = std::exp(kImaginary * phi) *
              alpha_of_tau(drive, omega, tau, quad_steps);
  out.unitary =
      displacement(out.alpha, sys) * free_evolution(sys, Complex(0, -tau));
  return out;
}

// Phase-insensitive distance between two oscillator propagators, restricted
// to their action on the lower half of the Fock basis. Columns near the
// cutoff are truncation artifacts: the two propagator constructions disagree
// there by design, while every physically populated input lives far below.
inline double propagator_distance(const ComplexMatrix& a,
                                  const ComplexMatrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("propagator_distance: dimension mismatch");
  }
  const Eigen::Index k = a.cols() / 2;
  return distance_up_to_phase(a.leftCols(k), b.leftCols(k));
}

// Backward free evolution exp(+i h_free tau) realized as a forward evolution
// over the remainder of the period. tau outside [0, 2 pi / omega] is reduced
// modulo the period.
inline ComplexMatrix inverse_free_evolution(double omega, double tau,
                                            const OscillatorSystem& sys) {
  const double period = 2.0 * M_PI / omega;
  double t = std::fmod(tau, period);
  if (t < 0.0) t += period;
  return free_evolution(sys, Complex(0, -(period - t)));
}

}  // namespace qwork
