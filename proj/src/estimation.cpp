#include "qwalk/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "qwalk/detail/golden.hpp"
#include "qwalk/fisher.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double ll_term(std::int64_t k, std::int64_t n, double p) {
  double sum = 0.0;
  if (k > 0) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    sum += static_cast<double>(k) * std::log(p);
  }
  if (n - k > 0) {
    if (p >= 1.0) return -std::numeric_limits<double>::infinity();
    sum += static_cast<double>(n - k) * std::log(1.0 - p);
  }
  return sum;
}

}  // namespace

void validate(const ExperimentDesign& design) {
  if (design.placements.empty())
    throw std::domain_error("ExperimentDesign: need at least one placement");
  for (const Placement& m : design.placements)
    if (!xi_supported(m))
      throw std::domain_error("ExperimentDesign: placement " + m.str() +
                              " has no closed-form model");
  if (design.trials_per_placement < 1 || design.trials_per_placement > 1000000)
    throw std::domain_error("ExperimentDesign: trials_per_placement must lie in [1, 1e6]");
}

CountRecord sample_counts(const BlochState& truth, const ExperimentDesign& design,
                          std::uint64_t replicate) {
  validate(design);
  CountRecord counts;
  counts.placements = design.placements;
  counts.trials = design.trials_per_placement;
  counts.escapes.resize(design.placements.size());
  for (std::size_t i = 0; i < design.placements.size(); ++i) {
    rng::SplitMix64 stream(rng::derive_stream(design.seed, replicate, i));
    const double p = escape_prob_closed(truth, design.placements[i]);
    counts.escapes[i] = rng::binomial(stream, design.trials_per_placement, p);
  }
  return counts;
}

double log_likelihood(const CountRecord& counts, const BlochState& state) {
  if (counts.placements.size() != counts.escapes.size() || counts.placements.empty())
    throw std::invalid_argument("log_likelihood: malformed count record");
  if (counts.trials < 1) throw std::invalid_argument("log_likelihood: trials must be >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.placements.size(); ++i) {
    if (counts.escapes[i] < 0 || counts.escapes[i] > counts.trials)
      throw std::invalid_argument("log_likelihood: counts out of range");
    sum += ll_term(counts.escapes[i], counts.trials,
                   escape_prob_closed(state, counts.placements[i]));
    if (sum == -std::numeric_limits<double>::infinity()) return sum;
  }
  return sum;
}

CrbResult crb(const BlochState& state, const ExperimentDesign& design) {
  validate(design);
  CrbResult res;
  res.covariance.setConstant(kNaN);
  const FisherMatrix total = fisher_total(state, design.placements);
  if (total.tag != ValueTag::kRegular) return res;
  const Eigen::Matrix2d info = static_cast<double>(design.trials_per_placement) * total.info;
  if (info(0, 0) > 0.0) {
    res.var_alpha = 1.0 / info(0, 0);
    res.alpha_valid = true;
  }
  if (info(1, 1) > 0.0) {
    res.var_beta = 1.0 / info(1, 1);
    res.beta_valid = true;
  }
  const double det = info.determinant();
  if (det > 1e-12 * info.squaredNorm()) {
    res.covariance = info.inverse();
    res.matrix_valid = true;
  }
  return res;
}

EstimationReport mle(const CountRecord& counts, const MleOptions& options) {
  if (options.grid_resolution < 2)
    throw std::domain_error("mle: grid_resolution must be >= 2");
  if (!(options.refine_tol > 0.0) || options.refine_tol > 0.1)
    throw std::domain_error("mle: refine_tol must lie in (0, 0.1]");

  const auto ll = [&counts](double a, double b) {
    return log_likelihood(counts, canonicalize(a, b));
  };

  // Coarse scan over the mirror-reduced rectangle [0, pi] x [0, pi].
  const int res = options.grid_resolution;
  double best_a = 0.0, best_b = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double worst_finite = std::numeric_limits<double>::infinity();
  double best_finite = -std::numeric_limits<double>::infinity();
  int n_infinite = 0;
  for (int i = 0; i < res; ++i) {
    const double a = i * kPi / (res - 1);
    for (int j = 0; j < res; ++j) {
      const double b = j * kPi / (res - 1);
      const double v = ll(a, b);
      if (std::isfinite(v)) {
        worst_finite = std::min(worst_finite, v);
        best_finite = std::max(best_finite, v);
      } else {
        ++n_infinite;
      }
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("mle: likelihood is degenerate everywhere");
  if (n_infinite == 0 && best_finite - worst_finite < 1e-12)
    throw std::runtime_error("mle: flat likelihood; the design carries no information");

  // Coordinate-wise golden-section ascent around the best cell.
  const double spacing = kPi / (res - 1);
  double a = best_a, b = best_b;
  for (int pass = 0; pass < 100; ++pass) {
    const double b_c = b;
    const double a_new =
        detail::golden_max([&](double x) { return ll(x, b_c); }, std::max(0.0, a - spacing),
                           std::min(kPi, a + spacing), options.refine_tol * 0.25)
            .first;
    const double b_new =
        detail::golden_max([&](double x) { return ll(a_new, x); }, std::max(0.0, b - spacing),
                           std::min(kPi, b + spacing), options.refine_tol * 0.25)
            .first;
    const double moved = std::abs(a_new - a) + std::abs(b_new - b);
    a = a_new;
    b = b_new;
    if (moved < options.refine_tol) break;
  }

  EstimationReport report;
  report.mle_primary = canonicalize(a, b);
  report.mle_mirror = canonicalize(a, kTwoPi - b);
  report.log_likelihood_at_max = ll(a, b);
  report.empirical_covariance.setConstant(kNaN);
  report.n_replicates = 0;

  const double edge = 10.0 * options.refine_tol;
  report.boundary_solution = a < edge || a > kPi - edge || b < edge || b > kPi - edge;

  std::set<Placement> distinct(counts.placements.begin(), counts.placements.end());
  report.rank_deficient_design = distinct.size() < 2;
  const FisherMatrix total = fisher_total(report.mle_primary, counts.placements);
  if (total.tag != ValueTag::kRegular ||
      total.info.determinant() <= 1e-12 * total.info.squaredNorm())
    report.rank_deficient_design = true;

  ExperimentDesign design;
  design.placements = counts.placements;
  design.trials_per_placement = counts.trials;
  report.crb = crb(report.mle_primary, design);
  return report;
}

EstimationReport monte_carlo(const BlochState& truth, const ExperimentDesign& design,
                             int replicates, const MleOptions& options) {
  validate(design);
  if (replicates < 100) throw std::domain_error("monte_carlo: need at least 100 replicates");

  std::vector<double> a_hat(replicates), b_hat(replicates);
  std::vector<EstimationReport> first(1);
  parallel_for(replicates, [&](std::int64_t r) {
    const CountRecord counts = sample_counts(truth, design, static_cast<std::uint64_t>(r));
    EstimationReport rep = mle(counts, options);
    a_hat[r] = rep.mle_primary.alpha;
    b_hat[r] = rep.mle_primary.beta;
    if (r == 0) first[0] = rep;
  });

  EstimationReport report = first[0];
  report.n_replicates = replicates;
  report.crb = crb(truth, design);

  double mean_a = 0.0, mean_b = 0.0;
  for (int r = 0; r < replicates; ++r) {
    mean_a += a_hat[r];
    mean_b += b_hat[r];
  }
  mean_a /= replicates;
  mean_b /= replicates;
  double caa = 0.0, cab = 0.0, cbb = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const double da = a_hat[r] - mean_a;
    const double db = b_hat[r] - mean_b;
    caa += da * da;
    cab += da * db;
    cbb += db * db;
  }
  const double norm = 1.0 / (replicates - 1);
  report.empirical_covariance << caa * norm, cab * norm, cab * norm, cbb * norm;

  // Degenerate designs: a single distinct placement can never identify both
  // angles, and a truth where the total information collapses cannot be
  // locally estimated at all.
  std::set<Placement> distinct(design.placements.begin(), design.placements.end());
  const FisherMatrix at_truth = fisher_total(truth, design.placements);
  report.rank_deficient_design =
      distinct.size() < 2 || at_truth.tag != ValueTag::kRegular ||
      at_truth.info.determinant() <= 1e-12 * at_truth.info.squaredNorm();
  return report;
}

TomographyComparison tomography_comparison(int walk_steps, int placements_used) {
  if (walk_steps < 1) throw std::domain_error("tomography_comparison: walk_steps must be >= 1");
  if (placements_used < 1)
    throw std::domain_error("tomography_comparison: placements_used must be >= 1");
  TomographyComparison cmp;
  cmp.modes = 2 * walk_steps + 1;
  cmp.settings_tomo = 3L * cmp.modes;
  cmp.settings_abs = placements_used;
  cmp.ratio = static_cast<double>(cmp.settings_tomo) / static_cast<double>(cmp.settings_abs);
  return cmp;
}

}  // namespace qwalk
