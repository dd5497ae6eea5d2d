#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("eigenvectors are normalized and eigenvalues lie on the unit circle") {
  for (double k : {-1.2, -0.4, 0.0, 0.3, 1.5}) {
    for (double rho : {0.25, 0.5, 0.9}) {
      const Eigensystem es = eigensystem(k, rho);
      CHECK(std::norm(es.a_plus) + std::norm(es.b_plus) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::norm(es.a_minus) + std::norm(es.b_minus) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(es.lambda_plus) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(es.lambda_minus) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(es.omega_minus == doctest::Approx(kPi - es.omega_plus).epsilon(1e-12));
    }
  }
}

TEST_CASE("eigenvectors diagonalize the momentum-space step operator") {
  const double rho = 0.5;
  const double sr = std::sqrt(rho), sq = std::sqrt(1.0 - rho);
  for (double k : {-1.0, 0.2, 0.9}) {
    const Eigensystem es = eigensystem(k, rho);
    // U(k) = diag(e^{ik}, e^{-ik}) . C acting on (l, r).
    const std::complex<double> eik(std::cos(k), std::sin(k));
    Eigen::Matrix2cd u;
    u << eik * sr, eik * sq, std::conj(eik) * sq, -std::conj(eik) * sr;
    const Eigen::Vector2cd vp(es.a_plus, es.b_plus);
    const Eigen::Vector2cd vm(es.a_minus, es.b_minus);
    CHECK((u * vp - es.lambda_plus * vp).norm() < 1e-12);
    CHECK((u * vm - es.lambda_minus * vm).norm() < 1e-12);
  }
}

TEST_CASE("eigensystem validates its domain") {
  CHECK_THROWS_AS(eigensystem(2.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(eigensystem(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(eigensystem(0.0, 1.5), std::domain_error);
}

TEST_CASE("quadrature route matches the closed form across placements") {
  for (int m : {1, 2, 3, 4, 5}) {
    for (double alpha : {0.0, 0.7, kPi / 2, 2.4, kPi}) {
      const BlochState s = canonicalize(alpha, 1.3);
      const double closed = escape_prob_closed(s, Placement::finite(m));
      const double quad = escape_prob_quadrature(s, Placement::finite(m), 0.5, 1e-10);
      CHECK(std::abs(quad - closed) < 1e-9);
    }
  }
}

TEST_CASE("detached-boundary quadrature matches the limiting closed form") {
  for (double alpha : {0.0, 1.1, kPi}) {
    const BlochState s = canonicalize(alpha, 4.0);
    const double closed = escape_prob_closed(s, Placement::infinite());
    const double quad = escape_prob_quadrature(s, Placement::infinite(), 0.5, 1e-10);
    CHECK(std::abs(quad - closed) < 1e-9);
  }
}

TEST_CASE("detailed quadrature reports its achieved error and work") {
  const EscapeQuadrature r = escape_prob_quadrature_detailed(
      canonicalize(kPi / 4, kPi / 3), Placement::finite(2), 0.5, 1e-10);
  CHECK(std::abs(r.value - escape_prob_closed(kPi / 4, kPi / 3, Placement::finite(2))) < 1e-9);
  CHECK(r.error_estimate <= 1e-10);
  CHECK(r.evaluations > 0);
}

TEST_CASE("closed-form coefficients exist exactly for m in 1..5 and infinity") {
  for (int m : {1, 2, 3, 4, 5}) CHECK(xi_supported(Placement::finite(m)));
  CHECK(xi_supported(Placement::infinite()));
  CHECK_FALSE(xi_supported(Placement::finite(6)));
  CHECK_THROWS_AS(xi_table(Placement::finite(6)), std::domain_error);
  CHECK_THROWS_AS(escape_prob_closed(1.0, 1.0, Placement::finite(7)), std::domain_error);
}

TEST_CASE("closed form reproduces hand-checked values") {
  // From |L> (alpha = 0) with the nearest boundary the walk escapes with 1 - 2/pi.
  CHECK(escape_prob_closed(0.0, 0.0, Placement::finite(1)) ==
        doctest::Approx(1.0 - 2.0 / kPi).epsilon(1e-15));
  // Frozen regression values.
  CHECK(escape_prob_closed(0.0, 0.0, Placement::finite(1)) ==
        doctest::Approx(0.363380227632).epsilon(1e-12));
  CHECK(escape_prob_closed(kPi / 4, kPi / 3, Placement::finite(2)) ==
        doctest::Approx(0.766917378194).epsilon(1e-11));
  CHECK(escape_prob_closed(2.0, 5.0, Placement::finite(3)) ==
        doctest::Approx(0.628471166322).epsilon(1e-11));
  // Fully biased toward |R> against the far-detached boundary: 1/2 up to
  // the rounding of sin(pi) at the double-precision pi.
  CHECK(std::abs(escape_prob_closed(kPi, 2.0, Placement::infinite()) - 0.5) < 1e-15);
}

TEST_CASE("quadrature rejects out-of-range coin bias and non-positive tolerance") {
  const BlochState s = canonicalize(1.0, 1.0);
  CHECK_THROWS_AS(escape_prob_quadrature(s, Placement::finite(1), 0.0, 1e-8), std::domain_error);
  CHECK_THROWS_AS(escape_prob_quadrature(s, Placement::finite(1), 1.2, 1e-8), std::domain_error);
  CHECK_THROWS_AS(escape_prob_quadrature(s, Placement::finite(1), 0.5, -1.0), std::domain_error);
}

TEST_CASE("nearest-boundary quadrature reduces to a weighted two-site problem") {
  // P_E(alpha, beta; 1) = w * P_E(|L>; 2) with w = |sqrt(rho) L0 + sqrt(1-rho) R0|^2.
  const BlochState s = canonicalize(1.9, 0.8);
  const Eigen::Vector2cd amp = initial_amplitudes(s);
  const double w = std::norm(std::sqrt(0.5) * amp(0) + std::sqrt(0.5) * amp(1));
  const double lhs = escape_prob_quadrature(s, Placement::finite(1), 0.5, 1e-11);
  const double rhs =
      w * escape_prob_quadrature(canonicalize(0.0, 0.0), Placement::finite(2), 0.5, 1e-11);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}
