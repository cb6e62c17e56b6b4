#include <catch2/catch_amalgamated.hpp>

#include "qwork/workstats.hpp"
#include "test_util.hpp"

using namespace qwork;

namespace {

Scenario ramp_scenario(double nbar, double lambda_final, double tau,
                       Eigen::Index cutoff = 64) {
  Scenario sc = Scenario::with_nbar(nbar);
  sc.tau = tau;
  sc.cutoff = cutoff;
  sc.drive = DriveProfile::tanh_ramp(lambda_final, 1.0);
  for (double u = 0.0; u <= 20.0 + 1e-9; u += 0.5) sc.u_grid.push_back(u);
  return sc;
}

double poisson(double kappa, int m) {
  double logp = -kappa + m * std::log(kappa) - std::lgamma(m + 1.0);
  return std::exp(logp);
}

}  // namespace

TEST_CASE("tpm distribution of a trivial process") {
  OscillatorSystem sys(1.0, 16);
  ComplexMatrix h = h_free(sys);
  ComplexMatrix rho = thermal_state(h, std::log(2.0));
  WorkDistribution dist = tpm_distribution(
      h, h, ComplexMatrix::Identity(16, 16), rho, 1e-9);
  REQUIRE(dist.points.size() == 1);
  REQUIRE(dist.points[0].w == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(dist.points[0].p == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("tpm distribution of a ground-state sudden quench is Poisson") {
  OscillatorSystem sys(1.0, 64);
  const double lambda = 0.1, kappa = lambda * lambda;  // (lambda/omega)^2
  ComplexMatrix hi = h_free(sys);
  ComplexMatrix hf = h_osc(sys, lambda, 0.0);
  ComplexMatrix ground =
      thermal_state(hi, std::numeric_limits<double>::infinity());

  WorkDistribution dist = tpm_distribution(
      hi, hf, ComplexMatrix::Identity(64, 64), ground, 1e-9);

  REQUIRE(dist.total() == Catch::Approx(1.0).margin(1e-10));
  // W_m = m omega - lambda^2/omega with weight Poisson(kappa)
  for (int m = 0; m < 6; ++m) {
    const double w_expect = m - kappa;
    auto it = std::find_if(dist.points.begin(), dist.points.end(),
                           [&](const WorkPoint& pt) {
                             return std::abs(pt.w - w_expect) < 1e-6;
                           });
    REQUIRE(it != dist.points.end());
    REQUIRE(it->p == Catch::Approx(poisson(kappa, m)).margin(1e-9));
  }
  REQUIRE(dist.points[0].p == Catch::Approx(std::exp(-0.01)).margin(1e-9));

  // Poisson mean identity: <W> = omega kappa - lambda^2/omega = 0
  REQUIRE(work_moments(dist, 1) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("tpm mean work matches the operator mean") {
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0);
  TwoPointProcess p = forward_process(sc);
  WorkDistribution dist = tpm_distribution(p.h_initial, p.h_final,
                                           p.propagator, p.initial_state,
                                           1e-9);
  REQUIRE(dist.total() == Catch::Approx(1.0).margin(1e-10));

  const ComplexMatrix heisenberg =
      p.propagator.adjoint() * p.h_final * p.propagator - p.h_initial;
  const double mean_op = std::real((heisenberg * p.initial_state).trace());
  REQUIRE(work_moments(dist, 1) == Catch::Approx(mean_op).margin(1e-9));
}

TEST_CASE("tpm rejects non-commuting initial states") {
  OscillatorSystem sys(1.0, 8);
  ComplexMatrix rho = test_util::random_density(8, 5);
  REQUIRE_THROWS_AS(tpm_distribution(h_free(sys), h_free(sys),
                                     ComplexMatrix::Identity(8, 8), rho, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("chi_direct basics") {
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0);
  TwoPointProcess p = forward_process(sc);

  REQUIRE(std::abs(chi_direct(0.0, p).value - Complex(1.0)) < 1e-12);

  // hermiticity chi(-u) = conj(chi(u)) and boundedness on real u
  ChiEvaluator chi(p.h_initial, p.h_final, p.propagator, p.initial_state);
  for (double u : {0.3, 1.7, 6.2, 19.5}) {
    REQUIRE(std::abs(chi(Complex(-u, 0)) - std::conj(chi(Complex(u, 0)))) <
            1e-12);
    REQUIRE(std::abs(chi(Complex(u, 0))) <= 1.0 + 1e-10);
  }

  // complex u with a non-dephased initial state: plain-product route
  OscillatorSystem sys16(1.0, 16);
  ComplexMatrix hi = h_free(sys16);
  ComplexMatrix hf = h_osc(sys16, 0.1, 0.0);
  ComplexMatrix u_t = expm(hf, Complex(0, -1.0));
  ComplexMatrix rho_any = test_util::random_density(16, 9);
  const Complex u_c(0.4, 0.3);
  const Complex via_eval = chi_direct(u_c, hi, hf, u_t, rho_any).value;
  const Complex reference = (u_t.adjoint() * expm(hf, kImaginary * u_c) *
                             u_t * expm(hi, -kImaginary * u_c) * rho_any)
                                .trace();
  REQUIRE(std::abs(via_eval - reference) < 1e-12);
}

TEST_CASE("chi at i beta reproduces the free-energy change") {
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0, 128);
  TwoPointProcess p = forward_process(sc);
  const Complex jarzynski = chi_direct(Complex(0.0, p.beta), p).value;

  FreeEnergy fe = partition_and_free_energy(p.h_initial, p.h_final, p.beta);
  const double expected = std::exp(-p.beta * fe.delta_f);
  REQUIRE(std::abs(jarzynski - expected) / expected < 1e-6);

  // the quench shifts the spectrum by -lambda_tau^2/omega, so
  // e^{-beta dF} = 2^{0.01} at beta omega = ln 2 (lambda_tau ~ 0.1 tanh 10)
  const double lt = sc.drive.value_at(sc.tau);
  REQUIRE(expected ==
          Catch::Approx(std::pow(2.0, lt * lt)).epsilon(1e-8));
  REQUIRE(std::abs(jarzynski.real() - std::pow(2.0, 0.01)) < 1e-6);
}

TEST_CASE("chi_commuting matches the geometric closed form") {
  OscillatorSystem sys(1.0, 64);
  ComplexMatrix h_op = h_free(sys);  // operator part bdag b (omega = 1)
  const double beta = std::log(2.0);
  ComplexMatrix rho = thermal_state(h_op, beta);

  const double g0 = 1.0, gt = 1.2;
  const double q = std::exp(-beta);
  for (double u : {0.4, 2.0, 7.3}) {
    Complex geometric =
        (1.0 - q) / (1.0 - q * std::exp(kImaginary * (gt - g0) * u));
    Complex val = chi_commuting(u, h_op, g0, gt, rho).value;
    REQUIRE(std::abs(val - geometric) < 1e-12);
  }

  REQUIRE(std::abs(chi_commuting(1.3, h_op, 0.7, 0.7, rho).value -
                   Complex(1.0)) < 1e-14);

  // any propagator generated by h_op leaves the commuting result equal to
  // the trace-route value
  ComplexMatrix u_tau = expm(h_op, Complex(0, -2.34));
  for (double u : {0.5, 3.1}) {
    Complex via_direct =
        chi_direct(u, g0 * h_op, gt * h_op, u_tau, rho).value;
    Complex via_commuting = chi_commuting(u, h_op, g0, gt, rho).value;
    REQUIRE(std::abs(via_direct - via_commuting) < 1e-10);
  }
}

TEST_CASE("distribution route equals trace route") {
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0);
  TwoPointProcess p = forward_process(sc);
  WorkDistribution dist = tpm_distribution(p.h_initial, p.h_final,
                                           p.propagator, p.initial_state,
                                           1e-9);
  ChiEvaluator chi(p.h_initial, p.h_final, p.propagator, p.initial_state);
  for (double u : sc.u_grid) {
    const Complex via_dist = chi_from_distribution(u, dist).value;
    REQUIRE(std::abs(via_dist - chi(Complex(u, 0))) < 1e-9);
  }

  // binned work values come out strictly ascending with clipped weights
  for (std::size_t i = 1; i < dist.points.size(); ++i) {
    REQUIRE(dist.points[i].w > dist.points[i - 1].w);
  }
  for (const auto& pt : dist.points) REQUIRE(pt.p >= 0.0);

  // single-point distribution
  WorkDistribution single{{{0.7, 1.0}}};
  REQUIRE(std::abs(chi_from_distribution(2.0, single).value -
                   std::exp(Complex(0, 1.4))) < 1e-14);
  REQUIRE(std::abs(chi_from_distribution(0.0, dist).value - Complex(1.0)) <
          1e-10);
}

TEST_CASE("backward process is an involution") {
  Scenario sc = ramp_scenario(1.0, 0.05, 1.0, 32);
  TwoPointProcess fwd = forward_process(sc);
  TwoPointProcess back = backward_process(fwd);
  TwoPointProcess again = backward_process(back);

  REQUIRE((again.h_initial - fwd.h_initial).norm() < 1e-12);
  REQUIRE((again.h_final - fwd.h_final).norm() < 1e-12);
  REQUIRE((again.propagator - fwd.propagator).norm() < 1e-12);
  REQUIRE((again.initial_state - fwd.initial_state).norm() < 1e-12);

  REQUIRE((back.h_initial - fwd.h_final).norm() == 0.0);
  REQUIRE((back.propagator - fwd.propagator.adjoint()).norm() == 0.0);

  // scenario-level construction agrees with the process-level one
  TwoPointProcess direct = backward_process(sc);
  REQUIRE((direct.h_initial - back.h_initial).norm() == 0.0);
  REQUIRE((direct.initial_state - back.initial_state).norm() == 0.0);
}

TEST_CASE("crooks free-energy recovery") {
  // trivial process
  Scenario flat = ramp_scenario(1.0, 0.0, 1.0, 32);
  TwoPointProcess p0 = forward_process(flat);
  TwoPointProcess b0 = backward_process(p0);
  const double u0 = 0.9;
  CrooksEstimate trivial = crooks_delta_f(
      p0.beta, chi_direct(Complex(u0, 0), p0).value,
      chi_direct(Complex(-u0, p0.beta), b0).value);
  REQUIRE(trivial.delta_f == Catch::Approx(0.0).margin(1e-10));

  // quench: u-independent and equal to the spectral-shift value
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0);
  TwoPointProcess p = forward_process(sc);
  TwoPointProcess b = backward_process(p);
  ChiEvaluator chi_f(p.h_initial, p.h_final, p.propagator, p.initial_state);
  ChiEvaluator chi_b(b.h_initial, b.h_final, b.propagator, b.initial_state);

  const double lt = sc.drive.value_at(sc.tau);
  std::vector<double> estimates;
  for (double u : {0.0, 0.5, 3.0, 11.5, 19.0}) {
    CrooksEstimate est = crooks_delta_f(p.beta, chi_f(Complex(u, 0)),
                                        chi_b(Complex(-u, p.beta)));
    REQUIRE(est.imag_residual < 1e-8);
    estimates.push_back(est.delta_f);
    REQUIRE(est.delta_f == Catch::Approx(-lt * lt).margin(1e-6));
  }
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  REQUIRE(*hi - *lo < 1e-7);

  REQUIRE_THROWS_AS(crooks_delta_f(p.beta, Complex(0.0), Complex(1.0)),
                    std::domain_error);
  REQUIRE_THROWS_AS(crooks_delta_f(-1.0, Complex(1.0), Complex(1.0)),
                    std::invalid_argument);
}

TEST_CASE("moments from the characteristic function") {
  Scenario sc = ramp_scenario(1.0, 0.1, 10.0);
  TwoPointProcess p = forward_process(sc);
  WorkDistribution dist = tpm_distribution(p.h_initial, p.h_final,
                                           p.propagator, p.initial_state,
                                           1e-9);
  ChiEvaluator chi(p.h_initial, p.h_final, p.propagator, p.initial_state);

  const double h = 1e-3;
  std::array<Complex, 5> stencil;
  for (int k = -2; k <= 2; ++k) {
    stencil[k + 2] = chi(Complex(k * h, 0.0));
  }

  REQUIRE(chi_derivative_moments(stencil, h, 0) ==
          Catch::Approx(1.0).margin(1e-12));
  REQUIRE(chi_derivative_moments(stencil, h, 1) ==
          Catch::Approx(work_moments(dist, 1)).margin(1e-8));
  REQUIRE(chi_derivative_moments(stencil, h, 2) ==
          Catch::Approx(work_moments(dist, 2)).margin(1e-6));

  // trivial process has vanishing mean work
  Scenario flat = ramp_scenario(1.0, 0.0, 1.0, 32);
  TwoPointProcess pf = forward_process(flat);
  WorkDistribution df = tpm_distribution(pf.h_initial, pf.h_final,
                                         pf.propagator, pf.initial_state,
                                         1e-9);
  REQUIRE(work_moments(df, 1) == Catch::Approx(0.0).margin(1e-12));

  REQUIRE_THROWS_AS(work_moments(dist, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(chi_derivative_moments(stencil, 0.0, 1),
                    std::invalid_argument);
}
