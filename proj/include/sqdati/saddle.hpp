#ifndef SQDATI_SADDLE_HPP
#define SQDATI_SADDLE_HPP

#include "sqdati/field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sqdati {

enum class SqueezeKind { phase, amplitude };

// Saddle coordinates. For the phase-squeezing system only (t1, x1) are
// active; x2 and v are carried along fixed at (0, v_f).
struct SaddleVars {
    cplx t1{};
    cplx x1{};
    cplx x2{};
    cplx v{};
};

struct SaddleSolution {
    SaddleVars vars;
    cplx action{};      // S at the saddle, including the -(i/2) alpha*alphabar term
    cplx alpha_total{}; // total displacement alpha(theta_s)
    cplx prefactor{};   // G(theta_s): smooth factor x Hessian product (no e^{-iS})
    double residual_norm = 0.0;
    int seed_id = 0;
};

// Gaussian-model bound-state amplitude h(x) = sqrt(a/pi) (1/(pi a))^{1/4} (x/a^2) e^{-a x^2/2},
// a = 0.8 Ip.
double tunneling_amplitude(double x, double Ip);

// Quantum-optically corrected action. With u(tau) = v + A_cl(tau), a = 0.8 Ip:
//   S = S_cl(v,t1,t) - Ip t1 - (i a/2) x1^2 - (i/2) alpha(theta) alphabar(theta)
//       [- x2 (v - v_f), amplitude kind only]
// where alphabar is the holomorphic continuation of conj(alpha). The rapidly
// oscillating x1 u(t1) factor of the exact integrand is kept out of S and
// handled as a smooth prefactor; this makes the system reduce exactly to the
// semiclassical ionization equation as epsilon -> 0.
cplx action_qo(const SaddleVars& vars, double v_f, const LaserParams& lp,
               const SqueezeParams& sq, SqueezeKind kind);

// Gradient of action_qo; order [t1, x1] (phase) or [t1, x1, x2, v] (amplitude).
Eigen::VectorXcd residuals(const SaddleVars& vars, double v_f, const LaserParams& lp,
                           const SqueezeParams& sq, SqueezeKind kind);

// Analytic Hessian (complex symmetric), same ordering as residuals.
Eigen::MatrixXcd hessian(const SaddleVars& vars, double v_f, const LaserParams& lp,
                         const SqueezeParams& sq, SqueezeKind kind);

// All roots of [v_f + A_cl(t1)]^2 / 2 + Ip = 0 with Im(t1) > 0 and
// Re(t1) in [0, t_meas), sorted by Re(t1). Throws NoSeed if none exist.
std::vector<cplx> semiclassical_seeds(double v_f, const LaserParams& lp);

// Damped-Newton continuation in log(epsilon) from ~0 to sq.epsilon for every
// semiclassical seed. Throws Diverged(seed_id) on failure.
std::vector<SaddleSolution> solve_saddles(double v_f, const LaserParams& lp,
                                          const SqueezeParams& sq, SqueezeKind kind);

// SPA prefactor at a converged saddle: the smooth factor h(x1) e^{-i x1 u}
// (u = v + A_cl(t1)) integrated exactly against the saddle Gaussian,
// including the cross couplings of x1 to the t1 (and, for amplitude
// squeezing, v) fluctuations. With M = iH + dQ and linear source J from the
// quadratic expansion of -i x1 u:
//   G = C_h (x1_s + (M^-1 J)_x1) e^{-i x1_s u_s + J M^-1 J / 2} (2 pi)^{n/2} / sqrt(det M).
// The sqrt(det M) branch follows w_k = sqrt(i lambda_k), lambda_k the Hessian
// eigenvalues (tracked by continuity in epsilon inside solve_saddles; this
// standalone entry point uses the principal branch). As epsilon -> 0, G
// recovers the Fourier transform of h times the cross-corrected Gaussian
// volume. Throws SingularHessian if any |lambda_k| < 1e-14.
cplx spa_prefactor(const SaddleSolution& sol, const LaserParams& lp,
                   const SqueezeParams& sq, SqueezeKind kind);

} // namespace sqdati

#endif
