#ifndef SQDATI_DATI_HPP
#define SQDATI_DATI_HPP

#include "sqdati/field.hpp"
#include "sqdati/qoptics.hpp"
#include "sqdati/saddle.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace sqdati {

// Rectangular observable table with axis values and run metadata.
struct ScanTable {
    std::string row_axis;
    std::string col_axis;
    std::vector<double> rows;
    std::vector<double> cols;
    Eigen::MatrixXd cells;
    std::map<std::string, std::string> metadata;
};

// Purity of the field state right after ionization at (real) time t1, within
// the classical-dominance approximation: a |h|^2-weighted ensemble of
// coherent states c(x) = x F(xi,t1), evaluated by 64-point Gauss-Hermite
// quadrature on each axis.
double ionization_purity(double t1, const SqueezeParams& sq, const LaserParams& lp,
                         int gh_order = 64);

// Normalized post-selected optical state for final momentum v_f: saddle sum of
// displaced |0> / |1> components weighted by the SPA amplitudes.
FockVector assemble_phi_d(double v_f, const LaserParams& lp, const SqueezeParams& sq,
                          SqueezeKind kind, int cutoff);

// Wigner-negativity volume N(v_f) over a momentum grid.
ScanTable negativity_scan(const std::vector<double>& v_grid, const LaserParams& lp,
                          const SqueezeParams& sq, int cutoff, int threads = 1,
                          double wigner_step = 0.1);

// Momentum-filtered field density operator: midpoint-rule mixture over
// v in [-v_lim, v_lim] of the post-selected states, weighted by their
// unnormalized squared norms. Squeeze kind follows sq.theta.
DensityOperator postselected_density(double v_lim, int n_samples, const LaserParams& lp,
                                     const SqueezeParams& sq, int cutoff);

// Linear entropy S_lin(rho) per (epsilon, n_cyc) cell, phase squeezing,
// default filter v_lim = sqrt(2 Up) with 96 midpoint samples.
ScanTable entropy_scan(const std::vector<double>& eps_grid,
                       const std::vector<int>& ncyc_grid, const LaserParams& lp,
                       int cutoff, int threads = 1);

// Deterministic index-ordered parallel map helper shared by the scans.
void parallel_map(int n, int threads, const std::function<void(int)>& fn);

} // namespace sqdati

#endif
