#include "qwalk/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qwalk/detail/golden.hpp"
#include "qwalk/num_format.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDenTol = 1e-12;   // on f (2 - f)
constexpr double kNumTol = 1e-12;   // on the squared numerator
constexpr double kProbeOffset = 1e-5;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// P_E = f / 2; the Fisher denominator is P (1 - P) = f (2 - f) / 4.
double f_of(const XiCoefficients& xi, double alpha, double beta) {
  return xi.xi1 + xi.xi2 - (xi.xi2 - xi.xi1) * std::cos(alpha) +
         xi.xi3 * std::sin(alpha) * std::cos(beta);
}

double dp_dalpha(const XiCoefficients& xi, double alpha, double beta) {
  return 0.5 * ((xi.xi2 - xi.xi1) * std::sin(alpha) + xi.xi3 * std::cos(alpha) * std::cos(beta));
}

double dp_dbeta(const XiCoefficients& xi, double alpha, double beta) {
  return -0.5 * xi.xi3 * std::sin(alpha) * std::sin(beta);
}

// Shared 0/0 handling: ratio num / den with num, den >= 0, probed along one
// axis when both vanish. probe(alpha, beta) re-evaluates the full ratio.
template <typename Ratio>
FisherScalar tagged_ratio(double num, double den, double alpha, double beta, bool probe_alpha,
                          const Ratio& ratio) {
  if (den >= kDenTol) return FisherScalar{num / den, ValueTag::kRegular};
  if (num >= kNumTol) return FisherScalar{kNaN, ValueTag::kSingular};
  double pa = alpha, pb = beta;
  if (probe_alpha)
    pa += alpha <= kPi / 2.0 ? kProbeOffset : -kProbeOffset;
  else
    pb += beta <= kPi ? kProbeOffset : -kProbeOffset;
  return FisherScalar{ratio(pa, pb), ValueTag::kLimit};
}

double fisher_alpha_raw(const XiCoefficients& xi, double alpha, double beta) {
  const double g = 2.0 * dp_dalpha(xi, alpha, beta);
  const double f = f_of(xi, alpha, beta);
  return g * g / (f * (2.0 - f));
}

double fisher_beta_raw(const XiCoefficients& xi, double alpha, double beta) {
  const double g = 2.0 * dp_dbeta(xi, alpha, beta);
  const double f = f_of(xi, alpha, beta);
  return g * g / (f * (2.0 - f));
}

double eta_beta_raw(const XiCoefficients& xi, double alpha, double beta) {
  const double s = xi.xi3 * std::sin(beta);
  const double f = f_of(xi, alpha, beta);
  return s * s / (f * (2.0 - f));
}

}  // namespace

const char* tag_name(ValueTag tag) {
  switch (tag) {
    case ValueTag::kRegular: return "regular";
    case ValueTag::kLimit: return "limit";
    case ValueTag::kSingular: return "singular";
    case ValueTag::kUndefined: return "undefined";
  }
  return "regular";
}

ValueTag tag_from_name(const std::string& name) {
  if (name.empty() || name == "regular") return ValueTag::kRegular;
  if (name == "limit") return ValueTag::kLimit;
  if (name == "singular") return ValueTag::kSingular;
  if (name == "undefined") return ValueTag::kUndefined;
  throw std::invalid_argument("tag_from_name: unknown tag '" + name + "'");
}

FisherScalar fisher_alpha(const BlochState& state, Placement m) {
  const XiCoefficients xi = xi_table(m);
  const double g = 2.0 * dp_dalpha(xi, state.alpha, state.beta);
  const double f = f_of(xi, state.alpha, state.beta);
  return tagged_ratio(g * g, f * (2.0 - f), state.alpha, state.beta, /*probe_alpha=*/true,
                      [&xi](double a, double b) { return fisher_alpha_raw(xi, a, b); });
}

FisherScalar fisher_beta(const BlochState& state, Placement m) {
  const XiCoefficients xi = xi_table(m);
  const double g = 2.0 * dp_dbeta(xi, state.alpha, state.beta);
  const double f = f_of(xi, state.alpha, state.beta);
  return tagged_ratio(g * g, f * (2.0 - f), state.alpha, state.beta, /*probe_alpha=*/false,
                      [&xi](double a, double b) { return fisher_beta_raw(xi, a, b); });
}

FisherMatrix fisher_matrix(const BlochState& state, Placement m) {
  const XiCoefficients xi = xi_table(m);
  FisherMatrix fm;
  fm.placements = {m};
  const double f = f_of(xi, state.alpha, state.beta);
  const double den = 0.25 * f * (2.0 - f);
  if (f * (2.0 - f) < kDenTol) {
    // The matrix limit at a 0/0 point depends on the probe direction, so no
    // single matrix value is reported there.
    fm.tag = ValueTag::kSingular;
    fm.info.setConstant(kNaN);
    fm.skipped = {m};
    return fm;
  }
  Eigen::Vector2d grad(dp_dalpha(xi, state.alpha, state.beta),
                       dp_dbeta(xi, state.alpha, state.beta));
  fm.info = grad * grad.transpose() / den;
  return fm;
}

FisherMatrix fisher_numeric(const BlochState& state, Placement m, double h) {
  if (!(h >= 1e-6 && h <= 1e-3))
    throw std::domain_error("fisher_numeric: h must lie in [1e-6, 1e-3]");
  FisherMatrix fm;
  fm.placements = {m};
  const double p = escape_prob_closed(state, m);
  const double den = p * (1.0 - p);
  if (4.0 * den < kDenTol) {
    fm.tag = ValueTag::kSingular;
    fm.info.setConstant(kNaN);
    fm.skipped = {m};
    return fm;
  }
  // The closed form is entire in both angles, so probes may leave the
  // canonical domain.
  Eigen::Vector2d grad(
      (escape_prob_closed(state.alpha + h, state.beta, m) -
       escape_prob_closed(state.alpha - h, state.beta, m)) /
          (2.0 * h),
      (escape_prob_closed(state.alpha, state.beta + h, m) -
       escape_prob_closed(state.alpha, state.beta - h, m)) /
          (2.0 * h));
  fm.info = grad * grad.transpose() / den;
  return fm;
}

FisherMatrix fisher_total(const BlochState& state, std::span<const Placement> placements) {
  if (placements.empty()) throw std::domain_error("fisher_total: need at least one placement");
  FisherMatrix total;
  total.info.setZero();
  for (const Placement& m : placements) {
    total.placements.push_back(m);
    FisherMatrix one = fisher_matrix(state, m);
    if (one.tag == ValueTag::kRegular)
      total.info += one.info;
    else
      total.skipped.push_back(m);
  }
  if (total.skipped.size() == placements.size()) {
    total.tag = ValueTag::kSingular;
    total.info.setConstant(kNaN);
  }
  return total;
}

Qfi qfi(const BlochState& state) {
  const double s = std::sin(state.alpha);
  return Qfi{1.0, s * s};
}

Efficiency efficiency(const BlochState& state, Placement m) {
  Efficiency eta;
  eta.eta_alpha = fisher_alpha(state, m);  // H_alpha = 1
  const double h_beta = qfi(state).h_beta;
  if (h_beta <= 1e-30) {
    eta.eta_beta = FisherScalar{kNaN, ValueTag::kUndefined};
    return eta;
  }
  const XiCoefficients xi = xi_table(m);
  const double s = xi.xi3 * std::sin(state.beta);
  const double f = f_of(xi, state.alpha, state.beta);
  eta.eta_beta = tagged_ratio(s * s, f * (2.0 - f), state.alpha, state.beta,
                              /*probe_alpha=*/false,
                              [&xi](double a, double b) { return eta_beta_raw(xi, a, b); });
  return eta;
}

const char* quantity_name(GridQuantity q) {
  switch (q) {
    case GridQuantity::kEscapeProb: return "P_E";
    case GridQuantity::kFisherAlpha: return "F_alpha";
    case GridQuantity::kFisherBeta: return "F_beta";
    case GridQuantity::kEtaAlpha: return "eta_alpha";
    case GridQuantity::kEtaBeta: return "eta_beta";
    case GridQuantity::kDetFisherTotal: return "detF_tot";
  }
  return "P_E";
}

GridQuantity quantity_from_name(const std::string& name) {
  if (name == "P_E") return GridQuantity::kEscapeProb;
  if (name == "F_alpha") return GridQuantity::kFisherAlpha;
  if (name == "F_beta") return GridQuantity::kFisherBeta;
  if (name == "eta_alpha") return GridQuantity::kEtaAlpha;
  if (name == "eta_beta") return GridQuantity::kEtaBeta;
  if (name == "detF_tot") return GridQuantity::kDetFisherTotal;
  throw std::invalid_argument("quantity_from_name: unknown quantity '" + name + "'");
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(pct >= 0.0 && pct <= 100.0))
    throw std::invalid_argument("percentile: pct must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * (static_cast<double>(values.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Grid grid_scan(std::span<const Placement> placements, GridQuantity quantity, int n_alpha,
               int n_beta, std::optional<double> cap_percentile, bool half_cell_offset) {
  if (placements.empty()) throw std::domain_error("grid_scan: need at least one placement");
  if (quantity != GridQuantity::kDetFisherTotal && placements.size() != 1)
    throw std::domain_error("grid_scan: scalar quantities take exactly one placement");
  if (n_alpha < 2 || n_beta < 2) throw std::domain_error("grid_scan: resolution must be >= 2");
  if (cap_percentile && !(*cap_percentile > 0.0 && *cap_percentile <= 100.0))
    throw std::domain_error("grid_scan: cap percentile must lie in (0, 100]");

  Grid grid;
  grid.quantity = quantity_name(quantity);
  grid.placements.assign(placements.begin(), placements.end());
  grid.half_cell_offset = half_cell_offset;
  grid.alpha_axis.resize(n_alpha);
  grid.beta_axis.resize(n_beta);
  for (int i = 0; i < n_alpha; ++i)
    grid.alpha_axis(i) = half_cell_offset ? (i + 0.5) * kPi / n_alpha
                                          : i * kPi / (n_alpha - 1);
  for (int j = 0; j < n_beta; ++j)
    grid.beta_axis(j) = half_cell_offset ? (j + 0.5) * kTwoPi / n_beta : j * kTwoPi / n_beta;

  grid.raw.resize(n_alpha, n_beta);
  grid.tags.assign(static_cast<std::size_t>(n_alpha) * n_beta, ValueTag::kRegular);

  parallel_for(n_alpha, [&](std::int64_t i) {
    for (int j = 0; j < n_beta; ++j) {
      const BlochState state = canonicalize(grid.alpha_axis(i), grid.beta_axis(j));
      FisherScalar cell;
      switch (quantity) {
        case GridQuantity::kEscapeProb:
          cell = FisherScalar{escape_prob_closed(state, placements[0]), ValueTag::kRegular};
          break;
        case GridQuantity::kFisherAlpha:
          cell = fisher_alpha(state, placements[0]);
          break;
        case GridQuantity::kFisherBeta:
          cell = fisher_beta(state, placements[0]);
          break;
        case GridQuantity::kEtaAlpha:
          cell = efficiency(state, placements[0]).eta_alpha;
          break;
        case GridQuantity::kEtaBeta:
          cell = efficiency(state, placements[0]).eta_beta;
          break;
        case GridQuantity::kDetFisherTotal: {
          FisherMatrix total = fisher_total(state, placements);
          if (total.tag != ValueTag::kRegular)
            cell = FisherScalar{kNaN, ValueTag::kSingular};
          else if (!total.skipped.empty())
            cell = FisherScalar{kNaN, ValueTag::kSingular};
          else
            cell = FisherScalar{total.info.determinant(), ValueTag::kRegular};
          break;
        }
      }
      grid.raw(i, j) = cell.has_value() ? cell.value : kNaN;
      grid.tags[static_cast<std::size_t>(i) * n_beta + j] = cell.tag;
    }
  });

  if (cap_percentile) {
    std::vector<double> valued;
    valued.reserve(grid.raw.size());
    for (Eigen::Index i = 0; i < grid.raw.rows(); ++i)
      for (Eigen::Index j = 0; j < grid.raw.cols(); ++j)
        if (std::isfinite(grid.raw(i, j))) valued.push_back(grid.raw(i, j));
    grid.cap_percentile = *cap_percentile;
    grid.cap_value = percentile(valued, *cap_percentile);
    grid.display = grid.raw.cwiseMin(grid.cap_value);
  } else {
    grid.display = grid.raw;
  }

  for (Eigen::Index i = 0; i < grid.alpha_axis.size(); ++i)
    grid.alpha_axis(i) = round12(grid.alpha_axis(i));
  for (Eigen::Index j = 0; j < grid.beta_axis.size(); ++j)
    grid.beta_axis(j) = round12(grid.beta_axis(j));
  for (Eigen::Index i = 0; i < grid.raw.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.raw.cols(); ++j) {
      grid.raw(i, j) = round12(grid.raw(i, j));
      grid.display(i, j) = round12(grid.display(i, j));
    }
  if (std::isfinite(grid.cap_value)) grid.cap_value = round12(grid.cap_value);
  return grid;
}

std::vector<HotSpot> hot_spots(Placement m, int resolution) {
  if (resolution < 8) throw std::domain_error("hot_spots: resolution must be >= 8");
  const XiCoefficients xi = xi_table(m);
  const int na = resolution;
  const int nb = 2 * resolution;

  const auto value_at = [&xi](double alpha, double beta) {
    const double g = xi.xi3 * std::sin(alpha) * std::sin(beta);
    const double f = f_of(xi, alpha, beta);
    const double den = f * (2.0 - f);
    if (den < kDenTol) return -std::numeric_limits<double>::infinity();
    return g * g / den;
  };

  Eigen::MatrixXd values(na, nb);
  for (int i = 0; i < na; ++i) {
    const double alpha = (i + 0.5) * kPi / na;
    for (int j = 0; j < nb; ++j) values(i, j) = value_at(alpha, (j + 0.5) * kTwoPi / nb);
  }

  const double da = kPi / na;
  const double db = kTwoPi / nb;
  std::vector<HotSpot> spots;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v <= 0.0) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = i + di;
          if (ni < 0 || ni >= na) continue;          // alpha edges clamp
          const int nj = (j + dj + nb) % nb;         // beta wraps
          if (values(ni, nj) >= v) is_max = false;
        }
      }
      if (!is_max) continue;

      double alpha = (i + 0.5) * da;
      double beta = (j + 0.5) * db;
      for (int pass = 0; pass < 50; ++pass) {
        const double beta_c = beta;
        const double a_new = detail::golden_max(
                                 [&](double a) { return value_at(a, beta_c); },
                                 std::max(1e-9, alpha - da), std::min(kPi - 1e-9, alpha + da),
                                 1e-7)
                                 .first;
        const double b_new = detail::golden_max(
                                 [&](double b) { return value_at(a_new, b); },
                                 std::max(1e-9, beta - db), std::min(kTwoPi - 1e-9, beta + db),
                                 1e-7)
                                 .first;
        const double moved = std::abs(a_new - alpha) + std::abs(b_new - beta);
        alpha = a_new;
        beta = b_new;
        if (moved < 1e-7) break;
      }
      spots.push_back(HotSpot{alpha, beta, value_at(alpha, beta),
                              escape_prob_closed(alpha, beta, m)});
    }
  }

  // Merge refinements that converged to the same point.
  std::sort(spots.begin(), spots.end(), [](const HotSpot& x, const HotSpot& y) {
    if (x.f_beta != y.f_beta) return x.f_beta > y.f_beta;
    return x.beta < y.beta;
  });
  std::vector<HotSpot> unique;
  for (const HotSpot& s : spots) {
    bool dup = false;
    for (const HotSpot& u : unique)
      if (std::abs(s.alpha - u.alpha) < 1e-4 && std::abs(s.beta - u.beta) < 1e-4) dup = true;
    if (!dup) unique.push_back(s);
  }
  return unique;
}

}  // namespace qwalk
