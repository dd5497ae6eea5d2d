#include "qwalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace qwalk {

namespace {

// 15-point Gauss-Legendre abscissae/weights on [-1, 1] (positive half; the
// rule is symmetric).
constexpr double kNode[8] = {
    0.0000000000000000000,  0.2011940939974345223, 0.3941513470775633699,
    0.5709721726085388475,  0.7244177313601700474, 0.8482065834104272162,
    0.9372733924007059043,  0.9879925180204854284,
};
constexpr double kWeight[8] = {
    0.2025782419255612729, 0.1984314853271115765, 0.1861610000155622110,
    0.1662692058169939336, 0.1395706779261543144, 0.1071592204671719351,
    0.0703660474881081247, 0.0307532419961172684,
};

double gl15(const std::function<double(double)>& f, double a, double b, long& evals) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = kWeight[0] * f(mid);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNode[i];
    sum += kWeight[i] * (f(mid - dx) + f(mid + dx));
  }
  evals += 15;
  return sum * half;
}

struct Panel {
  double a, b;
  double coarse;  // GL15 over [a, b]
  double fine;    // GL15 over the two halves
  double err;     // |coarse - fine|

  bool operator<(const Panel& other) const { return err < other.err; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, long& evals) {
  Panel p;
  p.a = a;
  p.b = b;
  p.coarse = gl15(f, a, b, evals);
  const double mid = 0.5 * (a + b);
  p.fine = gl15(f, a, mid, evals) + gl15(f, mid, b, evals);
  p.err = std::abs(p.coarse - p.fine);
  return p;
}

}  // namespace

QuadratureResult adaptive_gauss_legendre(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol, int initial_panels,
                                         int max_panels) {
  if (!(abs_tol > 0.0)) throw std::domain_error("adaptive_gauss_legendre: abs_tol must be > 0");
  if (!(b > a)) throw std::domain_error("adaptive_gauss_legendre: need b > a");
  initial_panels = std::max(1, initial_panels);

  QuadratureResult res;
  std::priority_queue<Panel> active;  // worst panel first
  long evals = 0;
  double total_err = 0.0;
  for (int i = 0; i < initial_panels; ++i) {
    const double lo = a + (b - a) * i / initial_panels;
    const double hi = a + (b - a) * (i + 1) / initial_panels;
    Panel p = make_panel(f, lo, hi, evals);
    total_err += p.err;
    active.push(p);
  }

  int n_panels = initial_panels;
  while (total_err > abs_tol && n_panels < max_panels) {
    Panel worst = active.top();
    active.pop();
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    for (double edge : {worst.a, mid}) {
      Panel p = make_panel(f, edge, edge == worst.a ? mid : worst.b, evals);
      total_err += p.err;
      active.push(p);
    }
    ++n_panels;
  }

  double value = 0.0;
  double err_sum = 0.0;  // re-accumulated to shed cancellation in the running sum
  res.panels = n_panels;
  while (!active.empty()) {
    value += active.top().fine;
    err_sum += active.top().err;
    active.pop();
  }
  res.value = value;
  res.error_estimate = err_sum;
  res.evaluations = evals;
  res.converged = err_sum <= abs_tol;
  return res;
}

}  // namespace qwalk
