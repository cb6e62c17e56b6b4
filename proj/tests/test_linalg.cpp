#include <catch2/catch_amalgamated.hpp>

#include "qwork/linalg.hpp"
#include "test_util.hpp"

using namespace qwork;

TEST_CASE("hermitian_eig on diagonal matrices") {
  EigenSystem es = hermitian_eig(pauli_z());
  REQUIRE(es.eigenvalues(0) == Catch::Approx(-1.0).margin(1e-14));
  REQUIRE(es.eigenvalues(1) == Catch::Approx(1.0).margin(1e-14));

  EigenSystem zero = hermitian_eig(ComplexMatrix::Zero(2, 2));
  REQUIRE(zero.eigenvalues.norm() == 0.0);
  REQUIRE((zero.eigenvectors.adjoint() * zero.eigenvectors -
           ComplexMatrix::Identity(2, 2))
              .norm() < 1e-14);
}

TEST_CASE("hermitian_eig reconstruction and unitarity residuals") {
  for (Eigen::Index n : {16, 64, 256}) {
    ComplexMatrix m = test_util::random_hermitian(n, 7 + unsigned(n));
    EigenSystem es = hermitian_eig(m);
    REQUIRE((m * es.eigenvectors -
             es.eigenvectors *
                 es.eigenvalues.cast<Complex>().asDiagonal().toDenseMatrix())
                .norm() < 1e-10 * m.norm());
    REQUIRE((es.eigenvectors.adjoint() * es.eigenvectors -
             ComplexMatrix::Identity(n, n))
                .norm() < 1e-10);
    REQUIRE(std::is_sorted(es.eigenvalues.begin(), es.eigenvalues.end()));
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input with a diagnostic") {
  ComplexMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  try {
    hermitian_eig(bad);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& err) {
    REQUIRE(std::string(err.what()).find("Hermitian") != std::string::npos);
    REQUIRE(std::string(err.what()).find("|M - M^dagger|_F") !=
            std::string::npos);
  }
}

TEST_CASE("expm trivial cases") {
  // e^{-i pi/2 sigma_z} = diag(-i, i)
  ComplexMatrix r = expm(pauli_z(), Complex(0, -M_PI / 2));
  REQUIRE(std::abs(r(0, 0) - Complex(0, -1)) < 1e-14);
  REQUIRE(std::abs(r(1, 1) - Complex(0, 1)) < 1e-14);
  REQUIRE(std::abs(r(0, 1)) < 1e-14);

  ComplexMatrix m = test_util::random_hermitian(8, 3);
  REQUIRE((expm(m, 0.0) - ComplexMatrix::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("expm of the free Hamiltonian over a full period is the identity") {
  const Eigen::Index n = 32;
  RealVector levels(n);
  for (Eigen::Index k = 0; k < n; ++k) levels[k] = double(k);
  ComplexMatrix h_free = levels.cast<Complex>().asDiagonal();
  ComplexMatrix u = expm(h_free, Complex(0, -2.0 * M_PI));
  REQUIRE((u - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
}

TEST_CASE("expm group properties") {
  ComplexMatrix m = test_util::random_hermitian(12, 11);
  const double u = 0.37;
  ComplexMatrix forward = expm(m, Complex(0, -u));
  ComplexMatrix backward = expm(m, Complex(0, u));
  REQUIRE((forward * backward - ComplexMatrix::Identity(12, 12)).norm() <
          1e-10);
  REQUIRE((forward.adjoint() * forward - ComplexMatrix::Identity(12, 12))
              .norm() < 1e-10);

  Complex a(0.3, -0.2), b(-0.1, 0.45);
  REQUIRE((expm(m, a) * expm(m, b) - expm(m, a + b)).norm() <
          1e-10 * expm(m, a + b).norm());
}

TEST_CASE("kron basics") {
  REQUIRE((kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) -
           ComplexMatrix::Identity(4, 4))
              .norm() == 0.0);

  ComplexMatrix g = kron(pauli_x(), qubit_projector(1));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(1, 3) = 1.0;
  expected(3, 1) = 1.0;
  REQUIRE((g - expected).norm() == 0.0);
}

TEST_CASE("kron mixed-product property") {
  ComplexMatrix a = test_util::random_complex(3, 3, 21);
  ComplexMatrix b = test_util::random_complex(2, 2, 22);
  ComplexMatrix c = test_util::random_complex(3, 3, 23);
  ComplexMatrix d = test_util::random_complex(2, 2, 24);
  REQUIRE((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
}

TEST_CASE("partial traces") {
  ComplexMatrix rho_s = test_util::random_density(4, 31);
  ComplexMatrix rho_a = test_util::random_density(3, 32);
  ComplexMatrix joint = kron(rho_s, rho_a);

  REQUIRE((partial_trace_ancilla(joint, 4, 3) - rho_s).norm() < 1e-12);
  REQUIRE((partial_trace_system(joint, 4, 3) - rho_a).norm() < 1e-12);

  // maximally mixed system factor traces away exactly
  ComplexMatrix balanced =
      kron(ComplexMatrix::Identity(4, 4) / 4.0, qubit_projector(0));
  REQUIRE((partial_trace_system(balanced, 4, 2) - qubit_projector(0)).norm() <
          1e-14);

  // trace preservation, and chaining both traces gives the full trace
  ComplexMatrix any = test_util::random_density(4, 33);
  REQUIRE(std::abs(partial_trace_ancilla(any, 2, 2).trace() - any.trace()) <
          1e-12);
  REQUIRE(std::abs(partial_trace_system(any, 2, 2).trace() - any.trace()) <
          1e-12);
  REQUIRE(std::abs(partial_trace_ancilla(any, 2, 2).trace() - 1.0) < 1e-12);

  REQUIRE_THROWS_AS(partial_trace_ancilla(any, 3, 2), std::invalid_argument);
}

TEST_CASE("ancilla_block extraction matches kron layout") {
  ComplexMatrix s = test_util::random_complex(3, 3, 41);
  ComplexMatrix joint =
      kron(s, qubit_projector(1)) + 2.0 * kron(s, qubit_projector(0));
  REQUIRE((ancilla_block(joint, 1, 1) - s).norm() < 1e-14);
  REQUIRE((ancilla_block(joint, 0, 0) - 2.0 * s).norm() < 1e-14);
  REQUIRE(ancilla_block(joint, 0, 1).norm() < 1e-14);
}

TEST_CASE("distance_up_to_phase") {
  ComplexMatrix u = test_util::random_unitary(6, 51);
  REQUIRE(distance_up_to_phase(u, std::exp(Complex(0, 0.7)) * u) < 1e-12);

  REQUIRE(distance_up_to_phase(ComplexMatrix::Identity(2, 2), pauli_x()) ==
          Catch::Approx(2.0).margin(1e-14));

  REQUIRE_THROWS_AS(
      distance_up_to_phase(ComplexMatrix::Identity(2, 2),
                           ComplexMatrix::Identity(3, 3)),
      std::invalid_argument);
}
