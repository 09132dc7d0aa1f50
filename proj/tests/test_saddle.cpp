#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sqdati/errors.hpp"
#include "sqdati/quadrature.hpp"
#include "sqdati/saddle.hpp"

#include "oracle.hpp"

#include <cmath>
#include <random>

using namespace sqdati;
using sqdati::testing::cd4;

namespace {

LaserParams laser(int n_cyc = 1) {
    LaserParams lp;
    lp.n_cyc = n_cyc;
    return lp;
}

SaddleVars random_vars(std::mt19937& rng, const LaserParams& lp, double v_f) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SaddleVars w;
    w.t1 = cplx(0.5 * lp.t_meas() * (1.0 + uni(rng)), 10.0 + 8.0 * uni(rng));
    w.x1 = cplx(uni(rng), uni(rng));
    w.x2 = cplx(20.0 * uni(rng), 10.0 * uni(rng));
    w.v = v_f + cplx(0.1 * uni(rng), 0.05 * uni(rng));
    return w;
}

// action_qo as a function of one packed coordinate, others held fixed.
cplx action_at(SaddleVars w, int idx, cplx z, double v_f, const LaserParams& lp,
               const SqueezeParams& sq, SqueezeKind kind) {
    (idx == 0 ? w.t1 : idx == 1 ? w.x1 : idx == 2 ? w.x2 : w.v) = z;
    return action_qo(w, v_f, lp, sq, kind);
}

cplx var_of(const SaddleVars& w, int idx) {
    return idx == 0 ? w.t1 : idx == 1 ? w.x1 : idx == 2 ? w.x2 : w.v;
}

// Local 2-D quadrature around a converged phase-kind saddle, along rotated
// straight contours through it. With quadratic_model = true the integrand is
// the moment-formula model exp(-d M d / 2 + J d) with M = iH + dQ, so the
// result should match sol.prefactor to quadrature accuracy; with false it is
// the exact integrand, which additionally probes how good that quadratic
// model is. Comparable to sol.prefactor up to the contour-orientation sign.
cplx local_quadrature_prefactor(const SaddleSolution& s, double v_f,
                                const LaserParams& lp, const SqueezeParams& sq,
                                double extent, bool quadratic_model) {
    const Eigen::MatrixXcd h2 = hessian(s.vars, v_f, lp, sq, SqueezeKind::phase);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h2);
    Eigen::MatrixXcd v = es.eigenvectors();
    for (int k = 0; k < 2; ++k) { // complex-orthogonal normalization, V^T V = 1
        const cplx nk = (v.col(k).transpose() * v.col(k))(0, 0);
        v.col(k) /= std::sqrt(nk);
    }
    Eigen::Vector2cd dir;
    for (int k = 0; k < 2; ++k) {
        const cplx il = cplx(0.0, 1.0) * es.eigenvalues()(k);
        dir(k) = std::exp(cplx(0.0, -0.5 * std::arg(il))) / std::sqrt(std::abs(il));
    }
    const cplx jac = (v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0)) * dir(0) * dir(1);

    const double a = 0.8 * lp.Ip;
    const cplx c_h = tunneling_amplitude(1.0, lp.Ip) * std::exp(0.5 * a);
    const cplx s0 = action_qo(s.vars, v_f, lp, sq, SqueezeKind::phase);
    const cplx kI(0.0, 1.0);
    const cplx u_s = cplx(v_f) + A_classical(s.vars.t1, lp);
    const cplx up = -E_classical(s.vars.t1, lp);
    const cplx upp = -lp.omega * lp.omega * A_classical(s.vars.t1, lp);
    Eigen::Matrix2cd m = kI * h2;
    m(0, 0) += kI * s.vars.x1 * upp;
    m(0, 1) += kI * up;
    m(1, 0) += kI * up;
    Eigen::Vector2cd jv;
    jv << -kI * s.vars.x1 * up, -kI * u_s;

    const auto f = [&](double s1, double s2) {
        Eigen::Vector2cd sv;
        sv << dir(0) * s1, dir(1) * s2;
        const Eigen::Vector2cd d = v * sv;
        if (quadratic_model)
            return c_h * (s.vars.x1 + d(1)) *
                   std::exp(-kI * s.vars.x1 * u_s -
                            0.5 * (d.transpose() * m * d)(0, 0) +
                            jv.cwiseProduct(d).sum());
        SaddleVars w = s.vars;
        w.t1 += d(0);
        w.x1 += d(1);
        const cplx u = w.v + A_classical(w.t1, lp);
        const cplx ds = action_qo(w, v_f, lp, sq, SqueezeKind::phase) - s0;
        return c_h * w.x1 * std::exp(-kI * (w.x1 * u + ds));
    };
    const cplx inner = integrate_gk(
        [&](double s1) {
            return integrate_gk([&](double s2) { return f(s1, s2); }, -extent, extent,
                                1e-10, 1e-13);
        },
        -extent, extent, 1e-10, 1e-13);
    return inner * jac;
}

} // namespace

TEST_CASE("tunneling amplitude shape") {
    const double Ip = 0.5, a = 0.8 * Ip;
    CHECK(tunneling_amplitude(0.0, Ip) == 0.0);
    CHECK(tunneling_amplitude(0.7, Ip) == doctest::Approx(-tunneling_amplitude(-0.7, Ip)));
    // odd Gaussian peaks at 1/sqrt(a)
    const double xs = 1.0 / std::sqrt(a);
    CHECK(tunneling_amplitude(xs, Ip) > tunneling_amplitude(xs - 0.1, Ip));
    CHECK(tunneling_amplitude(xs, Ip) > tunneling_amplitude(xs + 0.1, Ip));
}

TEST_CASE("semiclassical seeds solve the textbook equation") {
    for (const int nc : {1, 2, 3}) {
        const LaserParams lp = laser(nc);
        const auto seeds = semiclassical_seeds(0.3, lp);
        CHECK(static_cast<int>(seeds.size()) == 2 * nc); // two per cycle
        for (size_t i = 0; i < seeds.size(); ++i) {
            const cplx u = 0.3 + A_classical(seeds[i], lp);
            CHECK(std::abs(0.5 * u * u + lp.Ip) < 1e-12);
            CHECK(seeds[i].imag() > 0.0);
            CHECK(seeds[i].real() >= 0.0);
            CHECK(seeds[i].real() < lp.t_meas());
            if (i > 0) CHECK(seeds[i].real() > seeds[i - 1].real());
        }
    }
}

TEST_CASE("residuals are the gradient of the action") {
    const LaserParams lp = laser(2);
    auto rng = std::mt19937(31);
    for (const SqueezeKind kind : {SqueezeKind::phase, SqueezeKind::amplitude}) {
        const double theta = (kind == SqueezeKind::phase) ? 0.0 : M_PI;
        LaserParams lpc = lp;
        const SqueezeParams sq = squeeze_from_epsilon(1e-3, theta, lpc);
        const int n = (kind == SqueezeKind::phase) ? 2 : 4;
        for (int trial = 0; trial < 50; ++trial) {
            const double v_f = -0.4 + 0.8 * (trial / 49.0);
            const SaddleVars w = random_vars(rng, lpc, v_f);
            const Eigen::VectorXcd grad = residuals(w, v_f, lpc, sq, kind);
            REQUIRE(grad.size() == n);
            for (int idx = 0; idx < n; ++idx) {
                const cplx fd = cd4(
                    [&](cplx z) { return action_at(w, idx, z, v_f, lpc, sq, kind); },
                    var_of(w, idx), 1e-3);
                CHECK(std::abs(fd - grad(idx)) < 1e-9 * (1.0 + std::abs(grad(idx))));
            }
        }
    }
}

TEST_CASE("analytic Hessian matches finite differences of the gradient") {
    const LaserParams lp = laser(1);
    auto rng = std::mt19937(32);
    for (const SqueezeKind kind : {SqueezeKind::phase, SqueezeKind::amplitude}) {
        const double theta = (kind == SqueezeKind::phase) ? 0.0 : M_PI;
        LaserParams lpc = lp;
        const SqueezeParams sq = squeeze_from_epsilon(3e-4, theta, lpc);
        const int n = (kind == SqueezeKind::phase) ? 2 : 4;
        for (int trial = 0; trial < 50; ++trial) {
            const double v_f = -0.3 + 0.6 * (trial / 49.0);
            const SaddleVars w = random_vars(rng, lpc, v_f);
            const Eigen::MatrixXcd h = hessian(w, v_f, lpc, sq, kind);
            REQUIRE(h.rows() == n);
            CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            for (int col = 0; col < n; ++col) {
                for (int row = 0; row < n; ++row) {
                    const cplx fd = cd4(
                        [&](cplx z) {
                            SaddleVars wc = w;
                            (col == 0   ? wc.t1
                             : col == 1 ? wc.x1
                             : col == 2 ? wc.x2
                                        : wc.v) = z;
                            return residuals(wc, v_f, lpc, sq, kind)(row);
                        },
                        var_of(w, col), 1e-3);
                    CHECK(std::abs(fd - h(row, col)) < 1e-6 * (1.0 + std::abs(h(row, col))));
                }
            }
        }
    }
}

TEST_CASE("epsilon -> 0 reduces to the semiclassical ionization times") {
    LaserParams lp = laser(1);
    const SqueezeParams sq = squeeze_from_epsilon(1e-12, 0.0, lp);
    for (const double v_f : {-0.45, -0.2, 0.05, 0.3}) {
        const auto seeds = semiclassical_seeds(v_f, lp);
        const auto sols = solve_saddles(v_f, lp, sq, SqueezeKind::phase);
        REQUIRE(sols.size() == seeds.size());
        for (size_t i = 0; i < sols.size(); ++i) {
            CHECK(std::abs(sols[i].vars.t1 - seeds[i]) < 1e-8);
            const cplx u = v_f + A_classical(sols[i].vars.t1, lp);
            CHECK(std::abs(0.5 * u * u + lp.Ip) < 1e-10);
        }
    }
}

TEST_CASE("converged saddles: residual norm and displacement consistency") {
    LaserParams lp = laser(2);
    for (const SqueezeKind kind : {SqueezeKind::phase, SqueezeKind::amplitude}) {
        const double theta = (kind == SqueezeKind::phase) ? 0.0 : M_PI;
        LaserParams lpc = lp;
        const SqueezeParams sq = squeeze_from_epsilon(1e-3, theta, lpc);
        const auto sols = solve_saddles(0.25, lpc, sq, kind);
        REQUIRE(!sols.empty());
        for (const SaddleSolution& s : sols) {
            CHECK(s.residual_norm < 1e-9);
            CHECK(residuals(s.vars, 0.25, lpc, sq, kind).norm() < 1e-9);
            CHECK(s.vars.t1.imag() > 0.0);
            const cplx alpha = total_displacement(s.vars.t1, s.vars.x2, s.vars.v,
                                                  s.vars.x1, lpc.t_meas(), sq, lpc);
            // delta_displacement is adaptive quadrature with ~1e-10 absolute goal
            CHECK(std::abs(s.alpha_total - alpha) < 1e-9);
            CHECK(std::abs(s.action - action_qo(s.vars, 0.25, lpc, sq, kind)) < 1e-12);
            // phase-kind saddles do not move v (x2 is an inert template slot)
            if (kind == SqueezeKind::phase) CHECK(std::abs(s.vars.v - 0.25) < 1e-15);
        }
    }
}

TEST_CASE("SPA prefactor against local quadrature of the exact integrand") {
    LaserParams lp = laser(1);
    for (const double eps : {1e-12, 1e-3}) {
        LaserParams lpc = lp;
        const SqueezeParams sq = squeeze_from_epsilon(eps, 0.0, lpc);
        const auto sols = solve_saddles(0.3, lpc, sq, SqueezeKind::phase);
        REQUIRE(!sols.empty());
        for (const SaddleSolution& s : sols) {
            const cplx got = s.prefactor;
            // quadrature of the quadratic-model integrand must reproduce the
            // closed-form Gaussian moments (branch of sqrt(det M) included);
            // phase only mod pi since contour orientation fixes the sign
            const cplx qm = local_quadrature_prefactor(s, 0.3, lpc, sq, 6.0, true);
            const double dm =
                std::min(std::abs(qm - got), std::abs(qm + got)) / std::abs(got);
            CHECK(dm < 1e-4);
            // the exact integrand agrees with the quadratic model only up to
            // the neglected cubic action terms (~12% at Keldysh parameter ~1)
            const cplx q6 = local_quadrature_prefactor(s, 0.3, lpc, sq, 6.0, false);
            const cplx q5 = local_quadrature_prefactor(s, 0.3, lpc, sq, 5.0, false);
            CHECK(std::abs(q6 - q5) < 5e-3 * std::abs(q6)); // converged window
            const double diff =
                std::min(std::abs(q6 - got), std::abs(q6 + got)) / std::abs(got);
            CHECK(diff < 0.2);
        }
    }
}

TEST_CASE("amplitude- and phase-kind amplitudes coincide in the classical limit") {
    LaserParams lp = laser(1);
    const SqueezeParams sp = squeeze_from_epsilon(1e-12, 0.0, lp);
    LaserParams lpa = laser(1);
    const SqueezeParams sa = squeeze_from_epsilon(1e-12, M_PI, lpa);
    const auto ph = solve_saddles(0.2, lp, sp, SqueezeKind::phase);
    const auto am = solve_saddles(0.2, lpa, sa, SqueezeKind::amplitude);
    REQUIRE(ph.size() == am.size());
    for (size_t i = 0; i < ph.size(); ++i) {
        CHECK(std::abs(ph[i].vars.t1 - am[i].vars.t1) < 1e-6);
        const cplx gp = ph[i].prefactor * std::exp(cplx(0.0, -1.0) * ph[i].action);
        // the amplitude kind integrates the conjugate pair (x2, v) as well,
        // whose exact value is the 2 pi of int dx2 dv e^{-i x2 (v - v_f)}
        const cplx ga = am[i].prefactor * std::exp(cplx(0.0, -1.0) * am[i].action) /
                        (2.0 * M_PI);
        CHECK(std::abs(gp - ga) < 1e-5 * std::abs(gp));
    }
}
