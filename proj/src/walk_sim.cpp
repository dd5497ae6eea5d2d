#include "qwalk/walk_sim.hpp"

#include <cmath>
#include <stdexcept>

#if defined(__SSE2__) || defined(_M_X64)
#include <immintrin.h>
#define QWALK_HAVE_MXCSR 1
#endif

namespace qwalk {

namespace {
using Complex = std::complex<double>;

// The wavefunction's far tail decays exponentially, so most of the window
// eventually holds subnormal doubles; on x86 every arithmetic op touching
// them takes a microcode assist (~20x slowdown observed). Flushing them to
// zero perturbs amplitudes by < 1e-307, far below any observable, so the
// long-run driver enables FTZ/DAZ for its own scope only.
struct ScopedFlushSubnormals {
#if defined(QWALK_HAVE_MXCSR)
  unsigned int saved_csr = _mm_getcsr();
  ScopedFlushSubnormals() { _mm_setcsr(saved_csr | 0x8040u); }
  ~ScopedFlushSubnormals() { _mm_setcsr(saved_csr); }
#else
  ScopedFlushSubnormals() {}
#endif
  ScopedFlushSubnormals(const ScopedFlushSubnormals&) = delete;
  ScopedFlushSubnormals& operator=(const ScopedFlushSubnormals&) = delete;
};
}

void validate(const WalkConfig& config) {
  if (!(config.rho > 0.0 && config.rho <= 1.0))
    throw std::domain_error("WalkConfig: rho must lie in (0, 1]");
  if (config.boundary_m < 1) throw std::domain_error("WalkConfig: boundary_m must be >= 1");
  if (config.max_steps < 1) throw std::domain_error("WalkConfig: max_steps must be >= 1");
}

AmplitudeField make_field(const BlochState& state, int boundary_m, int max_steps) {
  if (boundary_m < 1) throw std::domain_error("make_field: boundary_m must be >= 1");
  if (max_steps < 1) throw std::domain_error("make_field: max_steps must be >= 1");
  AmplitudeField field;
  field.j_min = -max_steps;
  field.boundary_m = boundary_m;
  const Eigen::Index size = static_cast<Eigen::Index>(boundary_m) + max_steps + 1;
  field.l_amp = Eigen::VectorXcd::Zero(size);
  field.r_amp = Eigen::VectorXcd::Zero(size);
  field.l_next = Eigen::VectorXcd::Zero(size);
  field.r_next = Eigen::VectorXcd::Zero(size);
  const Eigen::Vector2cd amp = initial_amplitudes(state);
  field.l_amp(field.index_of(0)) = amp(0);
  field.r_amp(field.index_of(0)) = amp(1);
  return field;
}

double step(AmplitudeField& field, const Eigen::Matrix2d& coin) {
  if (field.l_amp(0) != 0.0 || field.r_amp(0) != 0.0)
    throw std::runtime_error("step: amplitude reached the window edge; enlarge max_steps");
  const double c00 = coin(0, 0), c01 = coin(0, 1);
  const double c10 = coin(1, 0), c11 = coin(1, 1);
  const int lo = std::max(field.j_min, -(field.step_index + 1));
  const Eigen::Index a = field.index_of(lo);
  const Eigen::Index b = field.index_of(field.boundary_m - 1);
  const Complex flux = c10 * field.l_amp(b) + c11 * field.r_amp(b);

  // The coin is real, so real and imaginary parts update independently;
  // viewing the complex storage as flat double arrays keeps the loops
  // SIMD-friendly. Left-movers pull from j+1; the cell at the absorber
  // (index b+1) is permanently zero, so no amplitude returns from it.
  const double* __restrict__ lp = reinterpret_cast<const double*>(field.l_amp.data());
  const double* __restrict__ rp = reinterpret_cast<const double*>(field.r_amp.data());
  double* __restrict__ ln = reinterpret_cast<double*>(field.l_next.data());
  double* __restrict__ rn = reinterpret_cast<double*>(field.r_next.data());
  for (Eigen::Index i = 2 * a; i <= 2 * b + 1; ++i) ln[i] = c00 * lp[i + 2] + c01 * rp[i + 2];
  for (Eigen::Index i = 2 * a + 2; i <= 2 * b + 1; ++i)
    rn[i] = c10 * lp[i - 2] + c11 * rp[i - 2];
  rn[2 * a] = a > 0 ? c10 * lp[2 * a - 2] + c11 * rp[2 * a - 2] : 0.0;
  rn[2 * a + 1] = a > 0 ? c10 * lp[2 * a - 1] + c11 * rp[2 * a - 1] : 0.0;

  field.l_amp.swap(field.l_next);
  field.r_amp.swap(field.r_next);
  field.step_index += 1;
  const double increment = std::norm(flux);
  field.absorbed_cumulative += increment;
  return increment;
}

double surviving_norm(const AmplitudeField& field) {
  return field.l_amp.squaredNorm() + field.r_amp.squaredNorm();
}

// run() uses a parity-packed kernel: the walker starts on one site, so at
// time s only sites with j = s (mod 2) carry amplitude. Packing each parity
// class contiguously halves the work and the memory traffic relative to
// step(), while performing the identical arithmetic (the traces agree
// bitwise; a unit test pins that).
SurvivalTrace run(const WalkConfig& config, const BlochState& state) {
  validate(config);
  const ScopedFlushSubnormals flush_subnormals;
  const Eigen::Matrix2d coin = coin_matrix(config.rho);
  const double c00 = coin(0, 0), c01 = coin(0, 1);
  const double c10 = coin(1, 0), c11 = coin(1, 1);
  const int t_max = config.max_steps;
  const int boundary = config.boundary_m;

  // u = j + t_max indexes the window [-t_max, boundary]; parity class of u.
  const Eigen::Index half = (static_cast<Eigen::Index>(boundary) + t_max + 1) / 2 + 2;
  Eigen::VectorXcd l_cls[2] = {Eigen::VectorXcd::Zero(half), Eigen::VectorXcd::Zero(half)};
  Eigen::VectorXcd r_cls[2] = {Eigen::VectorXcd::Zero(half), Eigen::VectorXcd::Zero(half)};
  const Eigen::Vector2cd amp = initial_amplitudes(state);
  const Eigen::Index u_start = t_max;  // site j = 0
  l_cls[u_start & 1](u_start >> 1) = amp(0);
  r_cls[u_start & 1](u_start >> 1) = amp(1);

  SurvivalTrace trace;
  trace.absorbed_per_step.resize(t_max);
  double absorbed = 0.0;
  const Eigen::Index u_edge = static_cast<Eigen::Index>(boundary) - 1 + t_max;  // site m-1

  for (int s = 0; s < t_max; ++s) {
    const int q_src = (s + t_max) & 1;
    const int q_dst = 1 - q_src;
    double increment = 0.0;
    if ((u_edge & 1) == q_src) {
      const std::complex<double> flux =
          c10 * l_cls[q_src](u_edge >> 1) + c11 * r_cls[q_src](u_edge >> 1);
      increment = std::norm(flux);
    }
    absorbed += increment;
    trace.absorbed_per_step(s) = increment;

    const Eigen::Index u_lo = std::max<Eigen::Index>(0, t_max - (s + 1));
    const Eigen::Index u_first = u_lo + ((u_lo ^ q_dst) & 1);
    const Eigen::Index u_last = u_edge - ((u_edge ^ q_dst) & 1);
    if (u_first > u_last) continue;
    const Eigen::Index h_lo = u_first >> 1;
    const Eigen::Index h_hi = u_last >> 1;
    const double* __restrict__ ls = reinterpret_cast<const double*>(l_cls[q_src].data());
    const double* __restrict__ rs = reinterpret_cast<const double*>(r_cls[q_src].data());
    double* __restrict__ ld = reinterpret_cast<double*>(l_cls[q_dst].data());
    double* __restrict__ rd = reinterpret_cast<double*>(r_cls[q_dst].data());
    // Site u = 2h + q_dst reads u+1 at source index h + q_dst and u-1 at
    // h - 1 + q_dst (flat doubles: twice that).
    const Eigen::Index up = 2 * q_dst;
    for (Eigen::Index i = 2 * h_lo; i <= 2 * h_hi + 1; ++i)
      ld[i] = c00 * ls[i + up] + c01 * rs[i + up];
    const Eigen::Index dn = 2 - up;
    for (Eigen::Index i = 2 * h_lo + (up == 0 ? 2 : 0); i <= 2 * h_hi + 1; ++i)
      rd[i] = c10 * ls[i - dn] + c11 * rs[i - dn];
    if (up == 0) {
      rd[2 * h_lo] = h_lo > 0 ? c10 * ls[2 * h_lo - 2] + c11 * rs[2 * h_lo - 2] : 0.0;
      rd[2 * h_lo + 1] = h_lo > 0 ? c10 * ls[2 * h_lo - 1] + c11 * rs[2 * h_lo - 1] : 0.0;
    }
  }

  trace.absorbed_cumulative_final = absorbed;
  trace.escape_estimate = 1.0 - absorbed;
  trace.steps_run = t_max;
  return trace;
}

SurvivalTrace simulate_classical(double p_right, int boundary_m, int max_steps) {
  if (!(p_right >= 0.0 && p_right <= 1.0))
    throw std::domain_error("simulate_classical: p_right must lie in [0, 1]");
  if (boundary_m < 1) throw std::domain_error("simulate_classical: boundary_m must be >= 1");
  if (max_steps < 1) throw std::domain_error("simulate_classical: max_steps must be >= 1");

  const int j_min = -max_steps;
  const auto index_of = [j_min](int j) { return static_cast<Eigen::Index>(j) - j_min; };
  Eigen::VectorXd prob = Eigen::VectorXd::Zero(index_of(boundary_m) + 1);
  Eigen::VectorXd next = prob;
  prob(index_of(0)) = 1.0;

  SurvivalTrace trace;
  trace.absorbed_per_step.resize(max_steps);
  double absorbed = 0.0;
  for (int t = 0; t < max_steps; ++t) {
    const int lo = std::max(j_min, -(t + 1));
    const Eigen::Index a = index_of(lo);
    const Eigen::Index b = index_of(boundary_m - 1);
    const double* p = prob.data();
    double* n = next.data();
    const double flux = p_right * p[b];
    for (Eigen::Index i = a; i <= b; ++i)
      n[i] = (1.0 - p_right) * p[i + 1] + (i > 0 ? p_right * p[i - 1] : 0.0);
    prob.swap(next);
    absorbed += flux;
    trace.absorbed_per_step(t) = flux;
  }
  trace.absorbed_cumulative_final = absorbed;
  trace.escape_estimate = 1.0 - absorbed;
  trace.steps_run = max_steps;
  return trace;
}

double tail_residual(const SurvivalTrace& trace, int window) {
  if (window < 0 || window > trace.steps_run)
    throw std::invalid_argument("tail_residual: window must lie in [0, steps_run]");
  return trace.absorbed_per_step.tail(window).sum();
}

}  // namespace qwalk
