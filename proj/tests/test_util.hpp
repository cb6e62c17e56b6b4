#pragma once

// Shared helpers for the test suites: seeded random operators and a couple of
// brute-force reference constructions kept independent of the library paths
// they are used to check.

#include <random>

#include "qwork/linalg.hpp"

namespace test_util {

inline qwork::ComplexMatrix random_complex(Eigen::Index rows,
                                           Eigen::Index cols,
                                           unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  qwork::ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = qwork::Complex(dist(rng), dist(rng));
    }
  }
  return m;
}

inline qwork::ComplexMatrix random_hermitian(Eigen::Index n, unsigned seed) {
  qwork::ComplexMatrix a = random_complex(n, n, seed);
  return 0.5 * (a + a.adjoint());
}

inline qwork::ComplexMatrix random_unitary(Eigen::Index n, unsigned seed) {
  Eigen::HouseholderQR<qwork::ComplexMatrix> qr(random_complex(n, n, seed));
  qwork::ComplexMatrix q = qr.householderQ();
  return q;
}

inline qwork::ComplexMatrix random_density(Eigen::Index n, unsigned seed) {
  qwork::ComplexMatrix a = random_complex(n, n, seed);
  qwork::ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace test_util
