#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qwalk/bloch.hpp"
#include "qwalk/placement.hpp"

namespace qwalk {

// How a reported value was obtained at points where the defining ratio
// degenerates: LIMIT = 0/0 resolved by a directional probe along the
// parameter's own axis; SINGULAR = diverging ratio (finite numerator over a
// vanishing denominator); UNDEFINED = the quantity has no meaning there
// (e.g. efficiency of beta at a Bloch pole, where nothing depends on beta).
enum class ValueTag { kRegular, kLimit, kSingular, kUndefined };

const char* tag_name(ValueTag tag);
ValueTag tag_from_name(const std::string& name);

struct FisherScalar {
  double value = 0.0;
  ValueTag tag = ValueTag::kRegular;
  bool has_value() const { return tag == ValueTag::kRegular || tag == ValueTag::kLimit; }
};

// Per-observation classical Fisher information of the binary escape/absorb
// outcome with respect to alpha resp. beta.
FisherScalar fisher_alpha(const BlochState& state, Placement m);
FisherScalar fisher_beta(const BlochState& state, Placement m);

struct FisherMatrix {
  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();  // order (alpha, beta)
  ValueTag tag = ValueTag::kRegular;
  std::vector<Placement> placements;
  std::vector<Placement> skipped;  // singular contributions omitted from info
};

// Rank-one matrix grad P . grad P^T / (P (1 - P)) for one placement.
FisherMatrix fisher_matrix(const BlochState& state, Placement m);

// Central-difference cross-check of fisher_matrix; h must lie in [1e-6, 1e-3].
FisherMatrix fisher_numeric(const BlochState& state, Placement m, double h = 1e-4);

// Sum over placements (repetitions allowed; information is additive).
FisherMatrix fisher_total(const BlochState& state, std::span<const Placement> placements);

// Quantum Fisher information of the coin state: H_alpha = 1, H_beta = sin^2(alpha).
struct Qfi {
  double h_alpha = 1.0;
  double h_beta = 0.0;
};
Qfi qfi(const BlochState& state);

// eta_theta = F_theta / H_theta <= 1. eta_beta is evaluated in the cancelled
// form xi3^2 sin^2(beta) / (f (2 - f)) which is finite up to (but undefined
// exactly at) the poles alpha in {0, pi}.
struct Efficiency {
  FisherScalar eta_alpha;
  FisherScalar eta_beta;
};
Efficiency efficiency(const BlochState& state, Placement m);

enum class GridQuantity { kEscapeProb, kFisherAlpha, kFisherBeta, kEtaAlpha, kEtaBeta, kDetFisherTotal };
const char* quantity_name(GridQuantity q);
GridQuantity quantity_from_name(const std::string& name);

// Scalar field sampled over the Bloch rectangle [0, pi] x [0, 2 pi).
// Values and axes are quantized to 12 significant digits so the emitted
// 12-digit CSV/JSON round-trips bit-exactly. Cells without a value
// (SINGULAR/UNDEFINED) hold NaN.
struct Grid {
  std::string quantity;
  std::vector<Placement> placements;
  Eigen::VectorXd alpha_axis;
  Eigen::VectorXd beta_axis;
  Eigen::MatrixXd raw;      // n_alpha x n_beta
  Eigen::MatrixXd display;  // raw clipped at cap_value
  std::vector<ValueTag> tags;  // row-major
  bool half_cell_offset = false;
  double cap_percentile = std::numeric_limits<double>::quiet_NaN();  // NaN = uncapped
  double cap_value = std::numeric_limits<double>::quiet_NaN();

  ValueTag tag(Eigen::Index i, Eigen::Index j) const {
    return tags[static_cast<std::size_t>(i) * beta_axis.size() + j];
  }
};

// Default axes are endpoint-inclusive in alpha over [0, pi] and half-open
// periodic in beta over [0, 2 pi); half_cell_offset instead centers samples
// inside cells (used for quantities with on-edge poles). cap_percentile caps
// the display copy at that percentile of the valued raw entries.
Grid grid_scan(std::span<const Placement> placements, GridQuantity quantity, int n_alpha,
               int n_beta, std::optional<double> cap_percentile = std::nullopt,
               bool half_cell_offset = false);

// Percentile (linear interpolation between order statistics) of a sample.
double percentile(std::vector<double> values, double pct);

struct HotSpot {
  double alpha = 0.0;
  double beta = 0.0;
  double f_beta = 0.0;
  double p_e = 0.0;
};

// Local maxima of F_beta over an offset scan grid (resolution x 2*resolution),
// refined by coordinate-wise golden-section ascent to 1e-6, deduplicated,
// sorted by F_beta descending then beta ascending.
std::vector<HotSpot> hot_spots(Placement m, int resolution);

}  // namespace qwalk
