#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qwork {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kImaginary{0.0, 1.0};

// Tensor ordering is fixed project-wide as (system ⊗ ancilla): for a joint
// operator M, M[(s*dA + a), (s'*dA + a')] = S[s,s']·A[a,a'].

inline double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm();
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10) {
  return hermiticity_residual(m) <= rel_tol * m.norm();
}

// Spectral decomposition of a Hermitian matrix. Eigenvalues ascending,
// eigenvector columns matched by index.
struct EigenSystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  // V diag(exp(scale * lambda)) V^dagger
  ComplexMatrix exp_scaled(Complex scale) const {
    return eigenvectors * exp_vector(scale).asDiagonal() *
           eigenvectors.adjoint();
  }

  ComplexVector exp_vector(Complex scale) const {
    ComplexVector w(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
      w[i] = std::exp(scale * eigenvalues[i]);
    }
    return w;
  }

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

inline EigenSystem hermitian_eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix must be square");
  }
  const double residual = hermiticity_residual(m);
  const double norm = m.norm();
  if (residual > 1e-10 * norm) {
    std::ostringstream msg;
    msg << "hermitian_eig: input is not Hermitian, |M - M^dagger|_F = "
        << residual << " exceeds 1e-10 * |M|_F = " << 1e-10 * norm;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(
        "hermitian_eig: eigensolver failed to converge for dimension " +
        std::to_string(m.rows()));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// exp(scale * M) for Hermitian M, evaluated spectrally. Exact for any complex
// scale, so imaginary-time arguments are supported.
inline ComplexMatrix expm(const ComplexMatrix& m, Complex scale) {
  return hermitian_eig(m).exp_scaled(scale);
}

// Kronecker product with A as the slow (system) factor.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace detail {
inline void check_joint_dims(const ComplexMatrix& m, Eigen::Index dim_s,
                             Eigen::Index dim_a, const char* who) {
  if (m.rows() != m.cols() || m.rows() != dim_s * dim_a) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix size does not match dim_s * dim_a");
  }
}
}  // namespace detail

// Trace over the ancilla factor; returns the dim_s x dim_s reduction.
inline ComplexMatrix partial_trace_ancilla(const ComplexMatrix& m,
                                           Eigen::Index dim_s,
                                           Eigen::Index dim_a) {
  detail::check_joint_dims(m, dim_s, dim_a, "partial_trace_ancilla");
  ComplexMatrix out = ComplexMatrix::Zero(dim_s, dim_s);
  for (Eigen::Index s = 0; s < dim_s; ++s) {
    for (Eigen::Index t = 0; t < dim_s; ++t) {
      Complex acc = 0.0;
      for (Eigen::Index a = 0; a < dim_a; ++a) {
        acc += m(s * dim_a + a, t * dim_a + a);
      }
      out(s, t) = acc;
    }
  }
  return out;
}

// Trace over the system factor; returns the dim_a x dim_a reduction.
inline ComplexMatrix partial_trace_system(const ComplexMatrix& m,
                                          Eigen::Index dim_s,
                                          Eigen::Index dim_a) {
  detail::check_joint_dims(m, dim_s, dim_a, "partial_trace_system");
  ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
  for (Eigen::Index a = 0; a < dim_a; ++a) {
    for (Eigen::Index b = 0; b < dim_a; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index s = 0; s < dim_s; ++s) {
        acc += m(s * dim_a + a, s * dim_a + b);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

// Extracts the system-sized block <bra|_A M |ket>_A of a joint operator.
inline ComplexMatrix ancilla_block(const ComplexMatrix& m, Eigen::Index bra,
                                   Eigen::Index ket, Eigen::Index dim_a = 2) {
  const Eigen::Index dim_s = m.rows() / dim_a;
  detail::check_joint_dims(m, dim_s, dim_a, "ancilla_block");
  ComplexMatrix out(dim_s, dim_s);
  for (Eigen::Index s = 0; s < dim_s; ++s) {
    for (Eigen::Index t = 0; t < dim_s; ++t) {
      out(s, t) = m(s * dim_a + bra, t * dim_a + ket);
    }
  }
  return out;
}

// min over theta of |A - e^{i theta} B|_F. Global propagator phases are
// unobservable, so all propagator comparisons go through this. The minimizing
// phase is the argument of Tr(A^dag B); forming the difference at that phase
// is algebraically the same as sqrt(|A|^2 + |B|^2 - 2 |Tr(A^dag B)|) but has
// no cancellation floor when A and B are phase-equal.
inline double distance_up_to_phase(const ComplexMatrix& a,
                                   const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("distance_up_to_phase: dimension mismatch");
  }
  const Complex overlap = a.conjugate().cwiseProduct(b).sum();  // Tr(A^dag B)
  const Complex phase =
      overlap == Complex(0.0) ? Complex(1.0) : std::conj(overlap) /
                                                   std::abs(overlap);
  return (a - phase * b).norm();
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix s(2, 2);
  s << 0, Complex(0, -1), Complex(0, 1), 0;
  return s;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

// |level><level| for a qubit.
inline ComplexMatrix qubit_projector(int level) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(level, level) = 1.0;
  return p;
}

}  // namespace qwork
