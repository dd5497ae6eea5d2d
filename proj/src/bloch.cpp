#include "qwalk/bloch.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace qwalk {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

BlochState canonicalize(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("canonicalize: angles must be finite");
  if (alpha < -1e-9 || alpha > kPi + 1e-9)
    throw std::domain_error("canonicalize: alpha must lie in [0, pi]");
  alpha = std::min(std::max(alpha, 0.0), kPi);
  double b = std::fmod(beta, kTwoPi);
  if (b < 0.0) b += kTwoPi;
  if (b >= kTwoPi) b = 0.0;  // fmod rounding can land exactly on 2*pi
  return BlochState{alpha, b};
}

Eigen::Vector2cd initial_amplitudes(const BlochState& state) {
  const double half = 0.5 * state.alpha;
  Eigen::Vector2cd amp;
  amp(0) = std::complex<double>(std::cos(half), 0.0);
  amp(1) = std::polar(1.0, state.beta) * std::sin(half);
  return amp;
}

Eigen::Matrix2d coin_matrix(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::domain_error("coin_matrix: rho must lie in [0, 1]");
  const double sr = std::sqrt(rho);
  const double sq = std::sqrt(1.0 - rho);
  Eigen::Matrix2d coin;
  coin << sr, sq, sq, -sr;
  return coin;
}

namespace {

// Parses a plain decimal using the whole string; returns false on any junk.
bool parse_decimal(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + s.size() && std::isfinite(out);
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("parse_angle: empty angle");

  double sign = 1.0;
  std::size_t at = 0;
  if (s[at] == '+' || s[at] == '-') {
    if (s[at] == '-') sign = -1.0;
    ++at;
  }

  const std::size_t pi_pos = s.find("pi", at);
  if (pi_pos == std::string::npos) {
    double value = 0.0;
    if (!parse_decimal(s.substr(at), value))
      throw std::invalid_argument("parse_angle: cannot parse '" + text + "'");
    return sign * value;
  }

  double coef = 1.0;
  if (pi_pos > at) {
    std::string head = s.substr(at, pi_pos - at);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (!parse_decimal(head, coef))
      throw std::invalid_argument("parse_angle: cannot parse '" + text + "'");
  }

  double divisor = 1.0;
  const std::size_t rest = pi_pos + 2;
  if (rest < s.size()) {
    if (s[rest] != '/' || rest + 1 >= s.size() || !parse_decimal(s.substr(rest + 1), divisor) ||
        divisor == 0.0)
      throw std::invalid_argument("parse_angle: cannot parse '" + text + "'");
  }
  return sign * coef * kPi / divisor;
}

}  // namespace qwalk
