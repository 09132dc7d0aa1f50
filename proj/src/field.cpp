#include "sqdati/field.hpp"

#include "sqdati/quadrature.hpp"

#include <array>
#include <cassert>

namespace sqdati {

namespace {

constexpr cplx kI{0.0, 1.0};

// Degree-2 trigonometric polynomial sum_{k=-2}^{2} c[k+2] e^{i k w t}.
struct TrigPoly {
    double w = 0.0;
    std::array<cplx, 5> c{};

    cplx eval(cplx t) const {
        cplx s = 0.0;
        for (int k = -2; k <= 2; ++k)
            s += c[k + 2] * std::exp(kI * (double(k) * w) * t);
        return s;
    }

    // Exact integral from t1 to t along any path (entire integrand).
    cplx integral(cplx t1, cplx t) const {
        cplx s = c[2] * (t - t1);
        for (int k = -2; k <= 2; ++k) {
            if (k == 0) continue;
            const cplx ikw = kI * (double(k) * w);
            s += c[k + 2] * (std::exp(ikw * t) - std::exp(ikw * t1)) / ikw;
        }
        return s;
    }

    TrigPoly operator*(const TrigPoly& o) const {
        TrigPoly p;
        p.w = w;
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) {
                if (c[a + 2] == 0.0 || o.c[b + 2] == 0.0) continue;
                const int k = a + b;
                assert(k >= -2 && k <= 2);
                p.c[k + 2] += c[a + 2] * o.c[b + 2];
            }
        return p;
    }

    // Coefficients of the holomorphic continuation of conj(P(conj t)).
    TrigPoly bar() const {
        TrigPoly p;
        p.w = w;
        for (int k = -2; k <= 2; ++k) p.c[k + 2] = std::conj(c[-k + 2]);
        return p;
    }
};

TrigPoly F_poly(const SqueezeParams& sq, const LaserParams& lp) {
    TrigPoly p;
    p.w = lp.omega;
    p.c[1 + 2] = kI * lp.g * std::cosh(sq.r) / lp.omega;
    p.c[-1 + 2] = -kI * lp.g * std::sinh(sq.r) * std::exp(kI * sq.theta) / lp.omega;
    return p;
}

TrigPoly f_poly(const SqueezeParams& sq, const LaserParams& lp) {
    TrigPoly p;
    p.w = lp.omega;
    p.c[-1 + 2] = lp.g * std::cosh(sq.r);
    p.c[1 + 2] = lp.g * std::sinh(sq.r) * std::exp(-kI * sq.theta);
    return p;
}

// v + A_cl(t) with A_cl = -(E0/w) sin(wt) = (iE0/2w)(e^{iwt} - e^{-iwt}).
TrigPoly kinetic_poly(cplx v, const LaserParams& lp) {
    TrigPoly p;
    p.w = lp.omega;
    p.c[0 + 2] = v;
    p.c[1 + 2] = kI * lp.E0 / (2.0 * lp.omega);
    p.c[-1 + 2] = -kI * lp.E0 / (2.0 * lp.omega);
    return p;
}

} // namespace

SqueezeParams make_squeeze(double r, double theta, const LaserParams& lp) {
    SqueezeParams sq;
    sq.r = r;
    sq.theta = theta;
    sq.epsilon = std::exp(r) * lp.g;
    return sq;
}

SqueezeParams squeeze_from_epsilon(double eps, double theta, LaserParams& lp) {
    SqueezeParams sq;
    sq.theta = theta;
    sq.epsilon = eps;
    if (eps <= 0.0) {
        sq.r = 0.0;
        lp.g = 0.0;
        sq.epsilon = 0.0;
    } else if (eps >= lp.g) {
        sq.r = std::log(eps / lp.g);
    } else {
        sq.r = 0.0;
        lp.g = eps;
    }
    return sq;
}

cplx E_classical(cplx t, const LaserParams& lp) {
    return lp.E0 * std::cos(lp.omega * t);
}

cplx A_classical(cplx t, const LaserParams& lp) {
    return -(lp.E0 / lp.omega) * std::sin(lp.omega * t);
}

std::pair<double, double> classical_field(double t, const LaserParams& lp) {
    return {lp.E0 * std::cos(lp.omega * t), -(lp.E0 / lp.omega) * std::sin(lp.omega * t)};
}

cplx f_mode(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    return f_poly(sq, lp).eval(t);
}

cplx F_mode(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    return F_poly(sq, lp).eval(t);
}

cplx f_mode_bar(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    return f_poly(sq, lp).bar().eval(t);
}

cplx F_mode_bar(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    return F_poly(sq, lp).bar().eval(t);
}

cplx delta_displacement(cplx v, cplx t1, cplx t,
                        const SqueezeParams& sq, const LaserParams& lp) {
    const TrigPoly p = kinetic_poly(v, lp) * F_poly(sq, lp);
    return 0.5 * p.integral(t1, t);
}

cplx delta_displacement_bar(cplx v, cplx t1, cplx t,
                            const SqueezeParams& sq, const LaserParams& lp) {
    // bar() conjugates all coefficients; feeding conj(v) keeps the result
    // holomorphic in v itself.
    const TrigPoly p = (kinetic_poly(std::conj(v), lp) * F_poly(sq, lp)).bar();
    return 0.5 * p.integral(t1, t);
}

cplx F_integral(cplx t1, cplx t, const SqueezeParams& sq, const LaserParams& lp) {
    return F_poly(sq, lp).integral(t1, t);
}

cplx F_integral_bar(cplx t1, cplx t, const SqueezeParams& sq, const LaserParams& lp) {
    return F_poly(sq, lp).bar().integral(t1, t);
}

cplx excursion(cplx v, cplx t1, cplx t, const LaserParams& lp) {
    return v * (t - t1) +
           (lp.E0 / (lp.omega * lp.omega)) * (std::cos(lp.omega * t) - std::cos(lp.omega * t1));
}

cplx action_cl(cplx v, cplx t1, cplx t, const LaserParams& lp) {
    const double w = lp.omega;
    const cplx lin = (lp.E0 / (w * w)) * (std::cos(w * t) - std::cos(w * t1));
    const cplx quad = (lp.E0 * lp.E0 / (w * w)) *
                      (0.5 * (t - t1) - (std::sin(2.0 * w * t) - std::sin(2.0 * w * t1)) / (4.0 * w));
    return 0.5 * (v * v * (t - t1) + 2.0 * v * lin + quad);
}

cplx meanfield_displacement(double v1, double t1, double t2, const LaserParams& lp) {
    const double w = lp.omega;
    auto inner = [&](double tp) {
        return integrate_gk(
            [&](double tau) {
                return (v1 + std::real(A_classical(tau, lp))) * std::exp(kI * (w * tau));
            },
            t1, tp, 1e-11, 1e-16);
    };
    return 0.5 * lp.g * integrate_gk(inner, t1, t2, 1e-10, 1e-15);
}

cplx total_displacement(cplx t1, cplx x2, cplx v, cplx x1, cplx t,
                        const SqueezeParams& sq, const LaserParams& lp) {
    return delta_displacement(v, t1, t, sq, lp) - x2 * F_mode(sq, lp, t) +
           x1 * F_mode(sq, lp, t1);
}

cplx total_displacement_bar(cplx t1, cplx x2, cplx v, cplx x1, cplx t,
                            const SqueezeParams& sq, const LaserParams& lp) {
    return delta_displacement_bar(v, t1, t, sq, lp) - x2 * F_mode_bar(sq, lp, t) +
           x1 * F_mode_bar(sq, lp, t1);
}

} // namespace sqdati
