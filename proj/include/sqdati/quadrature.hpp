#ifndef SQDATI_QUADRATURE_HPP
#define SQDATI_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace sqdati {

// Adaptive Gauss-Kronrod (G7/K15) integration of a complex-valued function
// over a real interval. Bisects intervals until the K15-G7 error estimate
// meets max(abs_floor, rel_tol * |result so far|) per panel.
std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b,
                                  double rel_tol = 1e-12,
                                  double abs_floor = 1e-14,
                                  int max_depth = 40);

// Single (non-adaptive) K15 panel with error estimate; building block for
// integrate_gk, exposed for test oracles that want custom panel orderings.
std::complex<double> gk15_panel(const std::function<std::complex<double>(double)>& f,
                                double a, double b, double& err);

// The 15 Kronrod nodes on [-1,1] in ascending order, with the K15 weights
// and the embedded G7 weights (zero on the Kronrod-only nodes). For callers
// that need to visit quadrature nodes in path order.
void gk15_ordered(double nodes[15], double wk[15], double wg[15]);

// Gauss-Hermite nodes/weights for weight e^{-u^2} on (-inf, inf),
// via Golub-Welsch.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace sqdati

#endif
