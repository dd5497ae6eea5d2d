#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qwalk/bloch.hpp"
#include "qwalk/placement.hpp"

namespace qwalk {

struct ExperimentDesign {
  std::vector<Placement> placements;
  std::int64_t trials_per_placement = 0;
  std::uint64_t seed = 0;
};
void validate(const ExperimentDesign& design);  // throws std::domain_error

struct CountRecord {
  std::vector<Placement> placements;
  std::vector<std::int64_t> escapes;  // escapes[i] out of `trials` at placements[i]
  std::int64_t trials = 0;
};

// Binomial escape counts, one independent splitmix64 stream per
// (seed, replicate, placement-slot); bit-reproducible.
CountRecord sample_counts(const BlochState& truth, const ExperimentDesign& design,
                          std::uint64_t replicate = 0);

// Binomial log-likelihood (up to the count-only combinatorial constant).
double log_likelihood(const CountRecord& counts, const BlochState& state);

struct MleOptions {
  int grid_resolution = 41;
  double refine_tol = 1e-6;
};

struct CrbResult {
  // Inverse total information when invertible, NaN otherwise.
  Eigen::Matrix2d covariance =
      Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
  bool matrix_valid = false;
  // Fallback single-parameter bounds 1 / (N * F_theta_theta).
  double var_alpha = std::numeric_limits<double>::quiet_NaN();
  double var_beta = std::numeric_limits<double>::quiet_NaN();
  bool alpha_valid = false;
  bool beta_valid = false;
};

// Cramer-Rao bound at `state` for the given design (N = trials_per_placement).
CrbResult crb(const BlochState& state, const ExperimentDesign& design);

struct EstimationReport {
  BlochState mle_primary;
  BlochState mle_mirror;  // mirror.beta = 2*pi - primary.beta (mod 2*pi)
  double log_likelihood_at_max = -std::numeric_limits<double>::infinity();
  CrbResult crb;
  // Monte Carlo only; NaN otherwise.
  Eigen::Matrix2d empirical_covariance =
      Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
  int n_replicates = 0;
  bool rank_deficient_design = false;
  bool boundary_solution = false;
  std::string rng_algorithm = "splitmix64-bernoulli";
};

// Maximum-likelihood estimate: coarse grid over [0, pi] x [0, pi] (beta
// restricted by the mirror symmetry of the model), then coordinate-wise
// golden-section refinement to refine_tol. Throws std::runtime_error if the
// likelihood is flat.
EstimationReport mle(const CountRecord& counts, const MleOptions& options = {});

// replicates >= 100 independent experiments; empirical covariance of the
// estimates (over the mirror-reduced domain) next to the CRB at the truth.
EstimationReport monte_carlo(const BlochState& truth, const ExperimentDesign& design,
                             int replicates, const MleOptions& options = {});

struct TomographyComparison {
  int modes = 0;               // K = 2 * walk_steps + 1 occupied modes
  long settings_tomo = 0;      // 3 K measurement settings for state tomography
  long settings_abs = 0;       // absorption-based: one per placement
  double ratio = 0.0;          // settings_tomo / settings_abs
};
TomographyComparison tomography_comparison(int walk_steps, int placements_used);

}  // namespace qwalk
