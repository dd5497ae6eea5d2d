#pragma once

#include <complex>

#include "qwalk/bloch.hpp"
#include "qwalk/placement.hpp"

namespace qwalk {

// Scattering eigenproblem data at quasi-momentum k for coin parameter rho.
// Two bands (+/-) with eigenvalues lambda = exp(-i omega).
struct Eigensystem {
  double s = 0.0;  // sqrt(1/rho - sin^2 k)
  double c = 0.0;  // cos k / s
  double a_plus = 0.0;
  double a_minus = 0.0;
  std::complex<double> b_plus;
  std::complex<double> b_minus;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
};

enum class Band { kPlus, kMinus };

Eigensystem eigensystem(double k, double rho);

// Overlap of the initial coin state with the band eigenfunction:
// C_{k,band} = A_band * L0 + conj(B_band) * R0.
std::complex<double> images_coefficient_c(double k, const BlochState& state, double rho,
                                          Band band);

// Boundary-adapted escape amplitude density for a finite absorber at m >= 2:
// F_plus(k; m) = d(k) + exp(i (pi - 2k) (m - 1)) * g(k), with
//   d(k) = a_plus L0 + a_minus e^{ik} R0          (free part)
//   g(k) = -(a_minus^2 / a_plus) L0 + a_minus e^{-ik} R0   (image part).
std::complex<double> f_plus(double k, const BlochState& state, int boundary_m, double rho);

// Escape probability P_E = (1/(2*pi)) Integral_{-pi/2}^{pi/2} 2 |F_plus|^2 dk.
// m = 1 reduces to the m = 2 problem from |L> with weight
// |sqrt(rho) L0 + sqrt(1-rho) R0|^2; m = infinity drops the oscillatory
// image cross term. Throws QuadratureError (carrying the best estimate) if
// tol cannot be met.
double escape_prob_quadrature(const BlochState& state, Placement m, double rho, double tol);

struct EscapeQuadrature {
  double value = 0.0;
  double error_estimate = 0.0;  // on the probability
  long evaluations = 0;
};
EscapeQuadrature escape_prob_quadrature_detailed(const BlochState& state, Placement m,
                                                 double rho, double tol);

// Closed-form coefficients of P_E = xi1 cos^2(a/2) + xi2 sin^2(a/2)
//                                 + xi3 cos(a/2) sin(a/2) cos(b)
// for the balanced coin (rho = 1/2); exact for m in {1..5, infinity}.
struct XiCoefficients {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi3 = 0.0;
};
XiCoefficients xi_table(Placement m);
bool xi_supported(Placement m);

// Same probability in the numerically friendly form
// P_E = (xi1 + xi2 - (xi2 - xi1) cos a + xi3 sin a cos b) / 2.
double escape_prob_closed(const BlochState& state, Placement m);
// Raw-angle overload: the trig form is entire in (alpha, beta), so finite
// difference probes may step outside the canonical domain.
double escape_prob_closed(double alpha, double beta, Placement m);

}  // namespace qwalk
