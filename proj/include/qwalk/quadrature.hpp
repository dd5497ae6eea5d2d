#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace qwalk {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;        // accepted panels
  long evaluations = 0;  // integrand calls
  bool converged = false;
};

// Thrown when a requested tolerance cannot be met; carries the best estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double achieved)
      : std::runtime_error(what), estimate(estimate), achieved_tol(achieved) {}
  double estimate;
  double achieved_tol;
};

// Adaptive panel-halving Gauss-Legendre (15-point rule per panel). The panel
// error proxy is |GL15(panel) - GL15(left half) - GL15(right half)|; panels
// are accepted once the proxy fits their share of abs_tol. Starts from
// initial_panels uniform panels so oscillatory integrands are resolved before
// adaptivity kicks in. Never throws for non-convergence: converged=false and
// the achieved error estimate are reported instead.
QuadratureResult adaptive_gauss_legendre(const std::function<double(double)>& f, double a,
                                         double b, double abs_tol, int initial_panels = 8,
                                         int max_panels = 20000);

}  // namespace qwalk
