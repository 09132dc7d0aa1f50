#include "sqdati/saddle.hpp"

#include "sqdati/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sqdati {

namespace {

constexpr cplx kI{0.0, 1.0};

double gauss_a(const LaserParams& lp) { return 0.8 * lp.Ip; }

// d/dt of f and fbar (closed forms of the mode-function derivatives).
cplx fp_mode(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    const double w = lp.omega;
    return -kI * w * lp.g * std::cosh(sq.r) * std::exp(-kI * w * t) +
           kI * w * lp.g * std::sinh(sq.r) * std::exp(-kI * sq.theta) * std::exp(kI * w * t);
}

cplx fp_mode_bar(const SqueezeParams& sq, const LaserParams& lp, cplx t) {
    const double w = lp.omega;
    return kI * w * lp.g * std::cosh(sq.r) * std::exp(kI * w * t) -
           kI * w * lp.g * std::sinh(sq.r) * std::exp(kI * sq.theta) * std::exp(-kI * w * t);
}

// Everything the action, gradient and Hessian need at one point.
struct Eval {
    cplx v, u1, E1;
    cplx F1, Fb1, f1, fb1, fp1, fbp1;
    cplx Ft, Fbt;
    cplx IF, IFb;
    cplx alpha, alphabar;
    cplx a_t1, ab_t1;
};

Eval evaluate(const SaddleVars& vars, double v_f, const LaserParams& lp,
              const SqueezeParams& sq, SqueezeKind kind) {
    Eval e;
    const cplx t1 = vars.t1;
    const double t = lp.t_meas();
    e.v = (kind == SqueezeKind::phase) ? cplx(v_f) : vars.v;
    e.u1 = e.v + A_classical(t1, lp);
    e.E1 = E_classical(t1, lp);
    e.F1 = F_mode(sq, lp, t1);
    e.Fb1 = F_mode_bar(sq, lp, t1);
    e.f1 = f_mode(sq, lp, t1);
    e.fb1 = f_mode_bar(sq, lp, t1);
    e.fp1 = fp_mode(sq, lp, t1);
    e.fbp1 = fp_mode_bar(sq, lp, t1);
    e.Ft = F_mode(sq, lp, t);
    e.Fbt = F_mode_bar(sq, lp, t);
    e.IF = F_integral(t1, t, sq, lp);
    e.IFb = F_integral_bar(t1, t, sq, lp);
    e.alpha = delta_displacement(e.v, t1, t, sq, lp) + vars.x1 * e.F1;
    e.alphabar = delta_displacement_bar(e.v, t1, t, sq, lp) + vars.x1 * e.Fb1;
    if (kind == SqueezeKind::amplitude) {
        e.alpha -= vars.x2 * e.Ft;
        e.alphabar -= vars.x2 * e.Fbt;
    }
    e.a_t1 = -0.5 * e.u1 * e.F1 - vars.x1 * e.fb1;
    e.ab_t1 = -0.5 * e.u1 * e.Fb1 - vars.x1 * e.f1;
    return e;
}

} // namespace

double tunneling_amplitude(double x, double Ip) {
    const double a = 0.8 * Ip;
    return std::sqrt(a / M_PI) * std::pow(1.0 / (M_PI * a), 0.25) * (x / (a * a)) *
           std::exp(-0.5 * a * x * x);
}

cplx action_qo(const SaddleVars& vars, double v_f, const LaserParams& lp,
               const SqueezeParams& sq, SqueezeKind kind) {
    const Eval e = evaluate(vars, v_f, lp, sq, kind);
    const double t = lp.t_meas();
    cplx s = action_cl(e.v, vars.t1, t, lp) - lp.Ip * vars.t1 -
             0.5 * kI * gauss_a(lp) * vars.x1 * vars.x1 -
             0.5 * kI * e.alpha * e.alphabar;
    if (kind == SqueezeKind::amplitude) s -= vars.x2 * (e.v - v_f);
    return s;
}

Eigen::VectorXcd residuals(const SaddleVars& vars, double v_f, const LaserParams& lp,
                           const SqueezeParams& sq, SqueezeKind kind) {
    const Eval e = evaluate(vars, v_f, lp, sq, kind);
    const double t = lp.t_meas();
    const int n = (kind == SqueezeKind::phase) ? 2 : 4;
    Eigen::VectorXcd g(n);
    g(0) = -0.5 * e.u1 * e.u1 - lp.Ip -
           0.5 * kI * (e.a_t1 * e.alphabar + e.alpha * e.ab_t1);
    g(1) = -kI * gauss_a(lp) * vars.x1 -
           0.5 * kI * (e.F1 * e.alphabar + e.Fb1 * e.alpha);
    if (kind == SqueezeKind::amplitude) {
        g(2) = -(e.v - v_f) + 0.5 * kI * (e.Ft * e.alphabar + e.Fbt * e.alpha);
        g(3) = excursion(e.v, vars.t1, t, lp) - vars.x2 -
               0.25 * kI * (e.IF * e.alphabar + e.alpha * e.IFb);
    }
    return g;
}

Eigen::MatrixXcd hessian(const SaddleVars& vars, double v_f, const LaserParams& lp,
                         const SqueezeParams& sq, SqueezeKind kind) {
    const Eval e = evaluate(vars, v_f, lp, sq, kind);
    const double t = lp.t_meas();
    const double a = gauss_a(lp);
    const cplx x1 = vars.x1;

    // Second partials of alpha / alphabar.
    const cplx a_t1t1 = 0.5 * (e.E1 * e.F1 + e.u1 * e.fb1) - x1 * e.fbp1;
    const cplx ab_t1t1 = 0.5 * (e.E1 * e.Fb1 + e.u1 * e.f1) - x1 * e.fp1;

    const int n = (kind == SqueezeKind::phase) ? 2 : 4;
    Eigen::MatrixXcd h(n, n);

    const cplx P_t1t1 = a_t1t1 * e.alphabar + 2.0 * e.a_t1 * e.ab_t1 + e.alpha * ab_t1t1;
    h(0, 0) = e.u1 * e.E1 - 0.5 * kI * P_t1t1;

    const cplx P_t1x1 = -e.fb1 * e.alphabar + e.a_t1 * e.Fb1 + e.F1 * e.ab_t1 -
                        e.alpha * e.f1;
    h(0, 1) = h(1, 0) = -0.5 * kI * P_t1x1;

    h(1, 1) = -kI * a - kI * e.F1 * e.Fb1;

    if (kind == SqueezeKind::amplitude) {
        const cplx P_t1x2 = -e.a_t1 * e.Fbt - e.Ft * e.ab_t1;
        h(0, 2) = h(2, 0) = -0.5 * kI * P_t1x2;

        const cplx P_t1v = -0.5 * e.F1 * e.alphabar + 0.5 * e.a_t1 * e.IFb +
                           0.5 * e.IF * e.ab_t1 - 0.5 * e.alpha * e.Fb1;
        h(0, 3) = h(3, 0) = -e.u1 - 0.5 * kI * P_t1v;

        h(1, 2) = h(2, 1) = 0.5 * kI * (e.F1 * e.Fbt + e.Ft * e.Fb1);
        h(1, 3) = h(3, 1) = -0.25 * kI * (e.F1 * e.IFb + e.IF * e.Fb1);
        h(2, 2) = -kI * e.Ft * e.Fbt;
        h(2, 3) = h(3, 2) = -1.0 + 0.25 * kI * (e.Ft * e.IFb + e.IF * e.Fbt);
        h(3, 3) = (t - vars.t1) - 0.25 * kI * e.IF * e.IFb;
    }
    return h;
}

std::vector<cplx> semiclassical_seeds(double v_f, const LaserParams& lp) {
    if (std::abs(v_f) >= lp.E0 / lp.omega + std::sqrt(2.0 * lp.Ip))
        throw NoSeed("semiclassical_seeds: |v_f| outside solvable range");
    const double w = lp.omega;
    const double t = lp.t_meas();
    std::vector<cplx> roots;
    for (const double sigma : {1.0, -1.0}) {
        const cplx z = (w / lp.E0) * (cplx(v_f) - sigma * kI * std::sqrt(2.0 * lp.Ip));
        const cplx s = std::asin(z);
        for (const cplx base : {s, M_PI - s}) {
            // Enumerate 2*pi shifts that can land Re(t1) inside [0, t).
            const int k_lo = static_cast<int>(std::floor(-std::real(base) / (2.0 * M_PI))) - 1;
            const int k_hi = static_cast<int>(std::ceil((w * t - std::real(base)) / (2.0 * M_PI))) + 1;
            for (int k = k_lo; k <= k_hi; ++k) {
                const cplx t1 = (base + 2.0 * M_PI * k) / w;
                if (std::imag(t1) <= 1e-12) continue;
                if (std::real(t1) < 0.0 || std::real(t1) >= t) continue;
                const cplx u = cplx(v_f) + A_classical(t1, lp);
                if (std::abs(0.5 * u * u + lp.Ip) > 1e-8) continue;
                bool dup = false;
                for (const cplx r : roots)
                    if (std::abs(r - t1) < 1e-9 * (2.0 * M_PI / w)) dup = true;
                if (!dup) roots.push_back(t1);
            }
        }
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (std::real(a) != std::real(b)) return std::real(a) < std::real(b);
        return std::imag(a) < std::imag(b);
    });
    if (roots.empty()) throw NoSeed("semiclassical_seeds: no roots found");
    return roots;
}

namespace {

Eigen::VectorXcd pack(const SaddleVars& v, SqueezeKind kind) {
    if (kind == SqueezeKind::phase) {
        Eigen::VectorXcd x(2);
        x << v.t1, v.x1;
        return x;
    }
    Eigen::VectorXcd x(4);
    x << v.t1, v.x1, v.x2, v.v;
    return x;
}

SaddleVars unpack(const Eigen::VectorXcd& x, const SaddleVars& tmpl, SqueezeKind kind) {
    SaddleVars v = tmpl;
    v.t1 = x(0);
    v.x1 = x(1);
    if (kind == SqueezeKind::amplitude) {
        v.x2 = x(2);
        v.v = x(3);
    }
    return v;
}

double scaled_norm(const Eigen::VectorXcd& dx, double omega) {
    double m = std::abs(dx(0)) * omega;
    for (int i = 1; i < dx.size(); ++i) m = std::max(m, std::abs(dx(i)));
    return m;
}

struct EigTrack {
    Eigen::MatrixXcd vecs;   // columns = eigenvectors, tracked order
    Eigen::VectorXcd sqrts;  // w_k = sqrt(i lambda_k), tracked branch
    bool valid = false;
};

// Eigen-decompose the (complex symmetric) Hessian, match eigenvector order to
// the previous continuation step, and keep each sqrt(i lambda) on the branch
// continuous with the previous step.
void track_eigs(const Eigen::MatrixXcd& h, EigTrack& tr) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
    const int n = static_cast<int>(h.rows());
    Eigen::VectorXcd lam = es.eigenvalues();
    Eigen::MatrixXcd vec = es.eigenvectors();

    std::vector<int> order(n);
    if (!tr.valid) {
        for (int i = 0; i < n; ++i) order[i] = i;
    } else {
        std::vector<bool> used(n, false);
        for (int prev = 0; prev < n; ++prev) {
            int best = -1;
            double best_ov = -1.0;
            for (int cur = 0; cur < n; ++cur) {
                if (used[cur]) continue;
                const double ov = std::abs(tr.vecs.col(prev).adjoint().dot(vec.col(cur)));
                if (ov > best_ov) {
                    best_ov = ov;
                    best = cur;
                }
            }
            used[best] = true;
            order[prev] = best;
        }
    }

    Eigen::MatrixXcd vecs(n, n);
    Eigen::VectorXcd sqrts(n);
    for (int i = 0; i < n; ++i) {
        vecs.col(i) = vec.col(order[i]);
        cplx w = std::sqrt(kI * lam(order[i]));
        if (tr.valid && std::real(w / tr.sqrts(i)) < 0.0) w = -w;
        sqrts(i) = w;
    }
    tr.vecs = std::move(vecs);
    tr.sqrts = std::move(sqrts);
    tr.valid = true;
}

// Smooth factor h(x1) e^{-i x1 u(t1, v)} integrated exactly against the
// saddle Gaussian. The Gaussian part of h is already inside S, so the
// integrand is (x1_s + dx1) exp(-d M d / 2 + J d) with
//   M = iH + dQ,   J_t1 = -i x1_s u',  J_x1 = -i u_s,  J_v = -i x1_s,
// where dQ holds the quadratic expansion of -i x1 u (cross couplings of x1
// to t1 and v, u' = A_cl'(t1_s)), giving
//   G = C_h (x1_s + (M^-1 J)_x1) e^{-i x1_s u_s + J M^-1 J / 2} (2 pi)^{n/2} / sqrt(det M).
// The branch of sqrt(det M) follows the continuation-tracked w_k = sqrt(i lambda_k)
// through the principal square root of det M / det(iH). As epsilon -> 0 this
// reduces to the Fourier transform h~(u) times the cross-corrected Gaussian
// volume.
cplx prefactor_from(const SaddleVars& vars, const Eval& e, const LaserParams& lp,
                    const Eigen::MatrixXcd& hess, const Eigen::VectorXcd& sqrts) {
    const double a = gauss_a(lp);
    for (int i = 0; i < sqrts.size(); ++i)
        if (std::norm(sqrts(i)) < 1e-14)
            throw SingularHessian("spa_prefactor: Hessian eigenvalue below 1e-14");
    const double c_h = std::sqrt(a / M_PI) * std::pow(1.0 / (M_PI * a), 0.25) / (a * a);
    const int n = static_cast<int>(hess.rows());
    const cplx up = -e.E1;                              // u' = A_cl'
    const cplx upp = -lp.omega * lp.omega * (e.u1 - e.v); // u'' = A_cl''
    Eigen::MatrixXcd m = kI * hess;
    m(0, 0) += kI * vars.x1 * upp;
    m(0, 1) += kI * up;
    m(1, 0) += kI * up;
    Eigen::VectorXcd j = Eigen::VectorXcd::Zero(n);
    j(0) = -kI * vars.x1 * up;
    j(1) = -kI * e.u1;
    if (n == 4) {
        m(1, 3) += kI;
        m(3, 1) += kI;
        j(3) = -kI * vars.x1;
    }
    cplx prod_w = 1.0;
    for (int i = 0; i < n; ++i) prod_w *= sqrts(i);
    const cplx sqrt_det_m = prod_w * std::sqrt(m.determinant() / (prod_w * prod_w));
    const Eigen::VectorXcd mj = m.fullPivLu().solve(j);
    const cplx jmj = j.cwiseProduct(mj).sum();
    return c_h * (vars.x1 + mj(1)) *
           std::exp(-kI * vars.x1 * e.u1 + 0.5 * jmj) *
           std::pow(2.0 * M_PI, 0.5 * n) / sqrt_det_m;
}

// Newton iteration at fixed coupling; returns false if it fails to converge.
bool newton_at(Eigen::VectorXcd& x, const SaddleVars& tmpl, double v_f,
               const LaserParams& lp, const SqueezeParams& sq, SqueezeKind kind,
               double& final_step_norm) {
    for (int it = 0; it < 100; ++it) {
        const SaddleVars vars = unpack(x, tmpl, kind);
        const Eigen::VectorXcd g = residuals(vars, v_f, lp, sq, kind);
        const Eigen::MatrixXcd h = hessian(vars, v_f, lp, sq, kind);
        const Eigen::VectorXcd dx = h.fullPivLu().solve(-g);
        const double g0 = g.norm();
        double lambda = 1.0;
        Eigen::VectorXcd x_new;
        bool accepted = false;
        for (int halve = 0; halve < 12; ++halve) {
            x_new = x + lambda * dx;
            const double g1 =
                residuals(unpack(x_new, tmpl, kind), v_f, lp, sq, kind).norm();
            if (g1 <= g0 || g1 < 1e-14) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return false;
        x = x_new;
        final_step_norm = scaled_norm(lambda * dx, lp.omega) ;
        if (final_step_norm < 1e-10) return true;
    }
    return false;
}

} // namespace

std::vector<SaddleSolution> solve_saddles(double v_f, const LaserParams& lp,
                                          const SqueezeParams& sq, SqueezeKind kind) {
    const std::vector<cplx> seeds = semiclassical_seeds(v_f, lp);
    const double t = lp.t_meas();
    std::vector<SaddleSolution> out;

    for (size_t sid = 0; sid < seeds.size(); ++sid) {
        SaddleVars tmpl;
        tmpl.t1 = seeds[sid];
        tmpl.x1 = 0.0;
        tmpl.x2 = excursion(cplx(v_f), seeds[sid], t, lp);
        tmpl.v = v_f;
        Eigen::VectorXcd x = pack(tmpl, kind);

        // Continuation in log10(coupling), r and theta held at their target
        // values, 0.25-decade steps over 10 decades.
        const double g_target = lp.g;
        std::vector<double> ladder;
        if (g_target <= 0.0 || sq.epsilon <= 0.0) {
            ladder.push_back(0.0);
        } else {
            for (int k = 40; k >= 0; --k) ladder.push_back(g_target * std::pow(10.0, -0.25 * k));
        }

        EigTrack track;
        double step_norm = 0.0;
        double g_prev = 0.0;
        size_t li = 0;
        int halvings = 0;
        while (li < ladder.size()) {
            LaserParams lp_step = lp;
            lp_step.g = ladder[li];
            Eigen::VectorXcd x_try = x;
            if (newton_at(x_try, tmpl, v_f, lp_step, sq, kind, step_norm)) {
                x = x_try;
                const SaddleVars vars = unpack(x, tmpl, kind);
                track_eigs(hessian(vars, v_f, lp_step, sq, kind), track);
                g_prev = ladder[li];
                ++li;
                halvings = 0;
            } else {
                // Halve the continuation step (in log space when possible).
                if (++halvings > 8)
                    throw Diverged(static_cast<int>(sid),
                                   "solve_saddles: Newton diverged for seed " +
                                       std::to_string(sid));
                const double mid = (g_prev > 0.0) ? std::sqrt(g_prev * ladder[li])
                                                  : 0.5 * ladder[li];
                ladder.insert(ladder.begin() + static_cast<long>(li), mid);
            }
        }

        const SaddleVars vars = unpack(x, tmpl, kind);
        if (std::imag(vars.t1) <= 0.0) continue; // physical-branch filter

        SaddleSolution sol;
        sol.vars = vars;
        sol.seed_id = static_cast<int>(sid);
        sol.residual_norm = step_norm;
        sol.action = action_qo(vars, v_f, lp, sq, kind);
        const Eval e = evaluate(vars, v_f, lp, sq, kind);
        sol.alpha_total = e.alpha;
        sol.prefactor =
            prefactor_from(vars, e, lp, hessian(vars, v_f, lp, sq, kind), track.sqrts);
        out.push_back(sol);
    }
    return out;
}

cplx spa_prefactor(const SaddleSolution& sol, const LaserParams& lp,
                   const SqueezeParams& sq, SqueezeKind kind) {
    const double v_f = std::real(sol.vars.v);
    EigTrack track;
    const Eigen::MatrixXcd h = hessian(sol.vars, v_f, lp, sq, kind);
    track_eigs(h, track);
    const Eval e = evaluate(sol.vars, v_f, lp, sq, kind);
    return prefactor_from(sol.vars, e, lp, h, track.sqrts);
}

} // namespace sqdati

