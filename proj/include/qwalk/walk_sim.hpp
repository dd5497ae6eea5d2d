#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qwalk/bloch.hpp"

namespace qwalk {

struct WalkConfig {
  double rho = 0.5;
  int boundary_m = 1;
  int max_steps = 10000;
};
void validate(const WalkConfig& config);  // throws std::domain_error

// Two-component amplitude window over sites j in [j_min, boundary_m].
// l_amp[j] moves left each step, r_amp[j] moves right; the absorber at
// boundary_m removes every amplitude that arrives there.
struct AmplitudeField {
  Eigen::VectorXcd l_amp;
  Eigen::VectorXcd r_amp;
  int j_min = 0;
  int boundary_m = 1;
  int step_index = 0;
  double absorbed_cumulative = 0.0;

  Eigen::Index index_of(int j) const { return j - j_min; }
  std::complex<double> l(int j) const { return l_amp(index_of(j)); }
  std::complex<double> r(int j) const { return r_amp(index_of(j)); }

  // Scratch buffers so step() allocates nothing.
  Eigen::VectorXcd l_next;
  Eigen::VectorXcd r_next;
};

// Window sized for max_steps of light-cone growth; walker starts at j = 0.
AmplitudeField make_field(const BlochState& state, int boundary_m, int max_steps);

// One coin+shift+absorb update; returns the probability absorbed this step.
// Throws std::runtime_error if amplitude would spill past the window edge.
double step(AmplitudeField& field, const Eigen::Matrix2d& coin);

double surviving_norm(const AmplitudeField& field);

struct SurvivalTrace {
  Eigen::VectorXd absorbed_per_step;  // entry t-1 = probability absorbed at step t
  double absorbed_cumulative_final = 0.0;
  double escape_estimate = 1.0;  // 1 - absorbed_cumulative_final
  int steps_run = 0;
};

SurvivalTrace run(const WalkConfig& config, const BlochState& state);

// Directed classical random walk with the same absorber: site probabilities
// move right with p_right, left otherwise.
SurvivalTrace simulate_classical(double p_right, int boundary_m, int max_steps);

// Sum of the last `window` per-step absorptions: convergence diagnostic.
double tail_residual(const SurvivalTrace& trace, int window);

}  // namespace qwalk
