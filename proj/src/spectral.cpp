#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qwalk/quadrature.hpp"

namespace qwalk {

namespace {

constexpr double kPi = std::numbers::pi;
using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::domain_error("rho must lie in (0, 1]");
}

// Free and image parts of the escape amplitude density (see f_plus).
struct FreeImage {
  Complex d;
  Complex g;
};

FreeImage free_image_parts(double k, const BlochState& state, double rho) {
  const Eigensystem es = eigensystem(k, rho);
  const Eigen::Vector2cd amp = initial_amplitudes(state);
  const Complex eik = std::polar(1.0, k);
  FreeImage fi;
  fi.d = es.a_plus * amp(0) + es.a_minus * eik * amp(1);
  fi.g = -(es.a_minus * es.a_minus / es.a_plus) * amp(0) + es.a_minus * std::conj(eik) * amp(1);
  return fi;
}

double clamp_probability(double p, const char* what) {
  if (p < -1e-12 || p > 1.0 + 1e-12) throw std::runtime_error(std::string(what) + ": probability out of range");
  return std::min(std::max(p, 0.0), 1.0);
}

EscapeQuadrature quadrature_impl(const BlochState& state, Placement m, double rho, double tol) {
  check_rho(rho);
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::domain_error("escape_prob_quadrature: tol must be positive and finite");

  if (!m.is_infinite() && m.distance() == 1) {
    // One step reduces m = 1 to the m = 2 problem started from |L>, carrying
    // the weight of the amplitude that survives the first absorption.
    const Eigen::Vector2cd amp = initial_amplitudes(state);
    const double w =
        std::norm(std::sqrt(rho) * amp(0) + std::sqrt(1.0 - rho) * amp(1));
    if (w == 0.0) return EscapeQuadrature{0.0, 0.0, 0};
    EscapeQuadrature inner =
        quadrature_impl(BlochState{0.0, 0.0}, Placement::finite(2), rho, tol / w);
    return EscapeQuadrature{w * inner.value, w * inner.error_estimate, inner.evaluations};
  }

  std::function<double(double)> integrand;
  int initial_panels = 6;
  if (m.is_infinite()) {
    integrand = [&state, rho](double k) {
      const FreeImage fi = free_image_parts(k, state, rho);
      return 2.0 * (std::norm(fi.d) + std::norm(fi.g));
    };
  } else {
    const int md = m.distance();
    initial_panels = std::max(6, md - 1);
    integrand = [&state, rho, md](double k) {
      return 2.0 * std::norm(f_plus(k, state, md, rho));
    };
  }

  // P = integral / (2*pi); spend half the tolerance budget inside the rule.
  const double integral_tol = tol * (2.0 * kPi) * 0.5;
  QuadratureResult q =
      adaptive_gauss_legendre(integrand, -kPi / 2.0, kPi / 2.0, integral_tol, initial_panels);
  EscapeQuadrature out;
  out.value = q.value / (2.0 * kPi);
  out.error_estimate = q.error_estimate / (2.0 * kPi);
  out.evaluations = q.evaluations;
  if (!q.converged)
    throw QuadratureError("escape_prob_quadrature: tolerance not met", out.value,
                          out.error_estimate);
  out.value = clamp_probability(out.value, "escape_prob_quadrature");
  return out;
}

}  // namespace

Placement Placement::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "inf" || s == "infinity") return Placement::infinite();
  std::size_t used = 0;
  int m = 0;
  try {
    m = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("Placement: cannot parse '" + text + "'");
  }
  if (used != s.size()) throw std::invalid_argument("Placement: cannot parse '" + text + "'");
  return Placement::finite(m);
}

Eigensystem eigensystem(double k, double rho) {
  check_rho(rho);
  if (!(k >= -kPi / 2.0 && k <= kPi / 2.0))
    throw std::domain_error("eigensystem: k must lie in [-pi/2, pi/2]");
  Eigensystem es;
  const double sink = std::sin(k);
  const double cosk = std::cos(k);
  es.s = std::sqrt(1.0 / rho - sink * sink);
  es.c = cosk / es.s;
  es.a_plus = std::sqrt(0.5 * (1.0 + es.c));
  es.a_minus = std::sqrt(std::max(0.0, 0.5 * (1.0 - es.c)));
  const Complex emik = std::polar(1.0, -k);
  es.b_plus = emik * es.a_minus;
  es.b_minus = -emik * es.a_plus;
  es.omega_plus = -std::asin(std::sqrt(rho) * sink);
  es.omega_minus = kPi - es.omega_plus;
  es.lambda_plus = std::polar(1.0, -es.omega_plus);
  es.lambda_minus = std::polar(1.0, -es.omega_minus);
  return es;
}

std::complex<double> images_coefficient_c(double k, const BlochState& state, double rho,
                                          Band band) {
  const Eigensystem es = eigensystem(k, rho);
  const Eigen::Vector2cd amp = initial_amplitudes(state);
  if (band == Band::kPlus) return es.a_plus * amp(0) + std::conj(es.b_plus) * amp(1);
  return es.a_minus * amp(0) + std::conj(es.b_minus) * amp(1);
}

std::complex<double> f_plus(double k, const BlochState& state, int boundary_m, double rho) {
  if (boundary_m < 2)
    throw std::domain_error("f_plus: image construction needs boundary_m >= 2");
  const FreeImage fi = free_image_parts(k, state, rho);
  const Complex phase = std::polar(1.0, (kPi - 2.0 * k) * (boundary_m - 1));
  return fi.d + phase * fi.g;
}

double escape_prob_quadrature(const BlochState& state, Placement m, double rho, double tol) {
  return quadrature_impl(state, m, rho, tol).value;
}

EscapeQuadrature escape_prob_quadrature_detailed(const BlochState& state, Placement m,
                                                 double rho, double tol) {
  return quadrature_impl(state, m, rho, tol);
}

bool xi_supported(Placement m) {
  return m.is_infinite() || m.distance() <= 5;
}

XiCoefficients xi_table(Placement m) {
  if (m.is_infinite()) return XiCoefficients{1.5 - 2.0 / kPi, 0.5, 1.0 - 2.0 / kPi};
  switch (m.distance()) {
    case 1:
      return XiCoefficients{1.0 - 2.0 / kPi, 1.0 - 2.0 / kPi, 2.0 - 4.0 / kPi};
    case 2:
      return XiCoefficients{2.0 - 4.0 / kPi, 3.0 - 8.0 / kPi, 3.0 - 8.0 / kPi};
    case 3:
      return XiCoefficients{4.0 - 10.0 / kPi, 13.0 - 118.0 / (3.0 * kPi),
                            11.0 - 100.0 / (3.0 * kPi)};
    case 4:
      return XiCoefficients{14.0 - 124.0 / (3.0 * kPi), 65.0 - 608.0 / (3.0 * kPi),
                            53.0 - 496.0 / (3.0 * kPi)};
    case 5:
      return XiCoefficients{66.0 - 614.0 / (3.0 * kPi), 341.0 - 16046.0 / (15.0 * kPi),
                            277.0 - 13036.0 / (15.0 * kPi)};
    default:
      throw std::domain_error("xi_table: no closed-form coefficients for m = " + m.str() +
                              "; use escape_prob_quadrature");
  }
}

double escape_prob_closed(double alpha, double beta, Placement m) {
  const XiCoefficients xi = xi_table(m);
  const double f = xi.xi1 + xi.xi2 - (xi.xi2 - xi.xi1) * std::cos(alpha) +
                   xi.xi3 * std::sin(alpha) * std::cos(beta);
  return clamp_probability(0.5 * f, "escape_prob_closed");
}

double escape_prob_closed(const BlochState& state, Placement m) {
  return escape_prob_closed(state.alpha, state.beta, m);
}

}  // namespace qwalk
