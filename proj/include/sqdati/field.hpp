#ifndef SQDATI_FIELD_HPP
#define SQDATI_FIELD_HPP

#include <cmath>
#include <complex>
#include <utility>

namespace sqdati {

using cplx = std::complex<double>;

// Classical driver parameters, all in atomic units (hbar = m_e = e = 1).
struct LaserParams {
    double E0 = 0.053;    // peak field amplitude
    double omega = 0.057; // angular frequency
    double g = 1e-8;      // single-mode light-matter coupling
    double Ip = 0.5;      // ionization potential
    int n_cyc = 1;        // whole optical cycles before measurement

    bool operator==(const LaserParams&) const = default;

    double t_meas() const { return 2.0 * M_PI * n_cyc / omega; }
    double ponderomotive() const { return E0 * E0 / (4.0 * omega * omega); }
    double keldysh() const { return std::sqrt(2.0 * Ip) * omega / E0; }
};

// Squeezing of the driving mode; epsilon = e^r * g is the effective coupling
// scale that controls all quantum-optical backaction.
struct SqueezeParams {
    double r = 0.0;     // squeeze magnitude, >= 0
    double theta = 0.0; // squeeze angle; 0 = phase, pi = amplitude squeezing
    double epsilon = 0.0;
};

SqueezeParams make_squeeze(double r, double theta, const LaserParams& lp);

// Choose (r, lp.g) so that e^r * lp.g == eps with r >= 0: if eps < lp.g the
// coupling itself is lowered to eps (r = 0). eps == 0 turns the coupling off.
SqueezeParams squeeze_from_epsilon(double eps, double theta, LaserParams& lp);

// E_cl(t) = E0 cos(wt), A_cl(t) = -(E0/w) sin(wt); entire in t.
cplx E_classical(cplx t, const LaserParams& lp);
cplx A_classical(cplx t, const LaserParams& lp);
std::pair<double, double> classical_field(double t, const LaserParams& lp);

// Squeezed-frame mode functions
//   f(xi,t) = g[cosh(r) e^{-iwt} + sinh(r) e^{i(wt-theta)}]
//   F(xi,t) = ig[(cosh r/w) e^{iwt} - (sinh r/w) e^{-i(wt-theta)}]
// satisfying dF/dt = -conj(f) on the real axis. The _bar variants are the
// holomorphic continuations of the conjugates, fbar(t) = conj(f(conj t)) and
// Fbar(t) = conj(F(conj t)), so that F' = -fbar and Fbar' = -f everywhere.
cplx f_mode(const SqueezeParams& sq, const LaserParams& lp, cplx t);
cplx F_mode(const SqueezeParams& sq, const LaserParams& lp, cplx t);
cplx f_mode_bar(const SqueezeParams& sq, const LaserParams& lp, cplx t);
cplx F_mode_bar(const SqueezeParams& sq, const LaserParams& lp, cplx t);

// Continuum-induced displacement delta(v,t,t1) = (1/2) int_{t1}^{t} [v + A_cl(tau)] F(xi,tau) dtau
// evaluated in closed form (the integrand is a degree-2 trigonometric
// polynomial). Holomorphic in all arguments.
cplx delta_displacement(cplx v, cplx t1, cplx t,
                        const SqueezeParams& sq, const LaserParams& lp);
cplx delta_displacement_bar(cplx v, cplx t1, cplx t,
                            const SqueezeParams& sq, const LaserParams& lp);

// int_{t1}^{t} F(xi,tau) dtau and its barred continuation.
cplx F_integral(cplx t1, cplx t, const SqueezeParams& sq, const LaserParams& lp);
cplx F_integral_bar(cplx t1, cplx t, const SqueezeParams& sq, const LaserParams& lp);

// Excursion int_{t1}^{t} [v + A_cl(tau)] dtau.
cplx excursion(cplx v, cplx t1, cplx t, const LaserParams& lp);

// Classical continuum action S_cl(v,t,t1) = (1/2) int_{t1}^{t} [v + A_cl(tau)]^2 dtau.
cplx action_cl(cplx v, cplx t1, cplx t, const LaserParams& lp);

// Mean-field comparison displacement
//   (g/2) int_{t1}^{t2} dt' int_{t1}^{t'} dtau [v1 + A_cl(tau)] e^{i w tau},
// nested adaptive quadrature; diagnostic only.
cplx meanfield_displacement(double v1, double t1, double t2, const LaserParams& lp);

// Total quantum-optical displacement alpha(theta) = delta(v,t,t1) - x2 F(xi,t) + x1 F(xi,t1).
cplx total_displacement(cplx t1, cplx x2, cplx v, cplx x1, cplx t,
                        const SqueezeParams& sq, const LaserParams& lp);
cplx total_displacement_bar(cplx t1, cplx x2, cplx v, cplx x1, cplx t,
                            const SqueezeParams& sq, const LaserParams& lp);

} // namespace sqdati

#endif
