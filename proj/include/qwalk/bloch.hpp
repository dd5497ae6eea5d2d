#pragma once

#include <Eigen/Dense>
#include <string>

namespace qwalk {

// Coin state on the Bloch sphere: |psi> = cos(alpha/2)|L> + e^{i beta} sin(alpha/2)|R>.
// Canonical domain: alpha in [0, pi], beta in [0, 2*pi).
struct BlochState {
  double alpha = 0.0;
  double beta = 0.0;
};

// Maps arbitrary finite angles into the canonical domain. beta wraps mod 2*pi;
// alpha must already lie in [0, pi] up to 1e-9 slack (then clamps), because
// alpha outside that range denotes a different physical state, not an alias.
BlochState canonicalize(double alpha, double beta);

// (L0, R0) spinor amplitudes of the canonical state.
Eigen::Vector2cd initial_amplitudes(const BlochState& state);

// Real 2x2 coin [[sqrt(rho), sqrt(1-rho)], [sqrt(1-rho), -sqrt(rho)]].
Eigen::Matrix2d coin_matrix(double rho);

// Parses "0.75", "pi", "pi/2", "3pi/4", "2pi", "-pi/3", "0.5pi", ...
double parse_angle(const std::string& text);

}  // namespace qwalk
