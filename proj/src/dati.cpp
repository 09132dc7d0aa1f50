#include "sqdati/dati.hpp"

#include "sqdati/errors.hpp"
#include "sqdati/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace sqdati {

namespace {

constexpr cplx kI{0.0, 1.0};

SqueezeKind kind_from(const SqueezeParams& sq) {
    return (std::cos(sq.theta) < 0.0) ? SqueezeKind::amplitude : SqueezeKind::phase;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void stamp_metadata(ScanTable& tab, const LaserParams& lp, const SqueezeParams& sq,
                    int cutoff) {
    tab.metadata["E0_au"] = fmt(lp.E0);
    tab.metadata["omega_au"] = fmt(lp.omega);
    tab.metadata["g_au"] = fmt(lp.g);
    tab.metadata["Ip_au"] = fmt(lp.Ip);
    tab.metadata["n_cyc"] = std::to_string(lp.n_cyc);
    tab.metadata["r"] = fmt(sq.r);
    tab.metadata["theta"] = fmt(sq.theta);
    tab.metadata["epsilon_au"] = fmt(sq.epsilon);
    tab.metadata["cutoff"] = std::to_string(cutoff);
}

struct PhiD {
    FockVector raw;     // unnormalized state
    double weight = 0;  // squared norm of raw
    double reach = 0;   // max |alpha| over saddles and boundary paths
};

// Bargmann-scaled channel columns at displacement (alpha, alphabar), where
// alphabar is the holomorphic continuation of conj(alpha) (they differ at
// complex ionization times). col0(m) = e^{-|alpha|^2/2} alpha^m / sqrt(m!)
// and col1 = (a^dag - alphabar) col0; the amplitude multiplying them carries
// the compensating e^{(|alpha|^2 - alpha alphabar)/2}.
void bargmann_columns(cplx alpha, cplx alphabar, int cutoff,
                      Eigen::VectorXcd& col0, Eigen::VectorXcd& col1) {
    col0.resize(cutoff + 1);
    col1.resize(cutoff + 1);
    col0(0) = std::exp(-0.5 * std::norm(alpha));
    for (int m = 1; m <= cutoff; ++m)
        col0(m) = col0(m - 1) * alpha / std::sqrt(static_cast<double>(m));
    col1(0) = -alphabar * col0(0);
    for (int m = 1; m <= cutoff; ++m)
        col1(m) = std::sqrt(static_cast<double>(m)) * col0(m - 1) - alphabar * col0(m);
}

// State threaded through a boundary path so the reduced stationary point and
// the Gaussian branch stay continuous from node to node (nodes are visited in
// path order).
struct PathState {
    SaddleVars guess;
    cplx prod; // product of sqrt(i lambda_k) over the reduced directions
    bool valid = false;
};

struct BoundaryPoint {
    cplx amp; // G_reduced * e^{-iS + |alpha|^2/2}
    cplx alpha, alphabar;
    cplx e1, fb1;
};

// Integrand of the ionization-time integral at fixed (complex) t1 with all
// remaining variables integrated out: the x1-resummed smooth factor times the
// reduced Gaussian volume. For phase squeezing the x1 stationary point is
// exact (the action is quadratic in x1 at fixed t1); for amplitude squeezing
// the reduced (x1, x2, v) point is found by Newton from the previous node.
BoundaryPoint boundary_point(cplx t1, double v_f, const LaserParams& lp,
                             const SqueezeParams& sq, SqueezeKind kind,
                             PathState& st) {
    const double t = lp.t_meas();
    const double a = 0.8 * lp.Ip;
    const double c_h = std::sqrt(a / M_PI) * std::pow(1.0 / (M_PI * a), 0.25) / (a * a);
    SaddleVars vars;
    cplx coeff;
    BoundaryPoint bp;
    if (kind == SqueezeKind::phase) {
        const cplx f1 = F_mode(sq, lp, t1);
        const cplx fb1 = F_mode_bar(sq, lp, t1);
        const cplx db = delta_displacement(v_f, t1, t, sq, lp);
        const cplx dbb = delta_displacement_bar(v_f, t1, t, sq, lp);
        const cplx denom = a + f1 * fb1;
        vars = SaddleVars{t1, -(f1 * dbb + fb1 * db) / (2.0 * denom), 0.0, v_f};
        const cplx u = v_f + A_classical(t1, lp);
        const cplx c11 = 1.0 / denom;
        // iH_red = a + F Fbar stays near a > 0, so the principal branch is
        // continuous along the whole path; at fixed t1 the x1 integral is an
        // exact Gaussian moment.
        coeff = c_h * (vars.x1 - kI * u * c11) *
                std::exp(-kI * u * vars.x1 - 0.5 * u * u * c11) *
                std::sqrt(2.0 * M_PI) / std::sqrt(denom);
        bp.alpha = db + vars.x1 * f1;
        bp.alphabar = dbb + vars.x1 * fb1;
    } else {
        vars = st.valid ? st.guess
                        : SaddleVars{t1, 0.0, excursion(v_f, t1, t, lp), v_f};
        vars.t1 = t1;
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            const Eigen::VectorXcd g = residuals(vars, v_f, lp, sq, kind).tail(3);
            const Eigen::MatrixXcd h =
                hessian(vars, v_f, lp, sq, kind).bottomRightCorner(3, 3);
            const Eigen::VectorXcd dx = h.fullPivLu().solve(-g);
            vars.x1 += dx(0);
            vars.x2 += dx(1);
            vars.v += dx(2);
            if (dx.norm() < 1e-12) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ComputeError("assemble_phi_d: boundary stationary point did not converge");
        // At fixed t1 the action is exactly quadratic in (x1, x2, v), so the
        // reduced integral of x1 e^{-i x1 u(v)} is an exact Gaussian moment
        // once the x1-v cross coupling of the smooth factor enters M.
        Eigen::MatrixXcd m =
            kI * hessian(vars, v_f, lp, sq, kind).bottomRightCorner(3, 3);
        m(0, 2) += kI;
        m(2, 0) += kI;
        cplx prod;
        if (!st.valid) {
            // Absolute branch at the (real) path start: principal
            // sqrt(lambda_k) per eigenvalue, the convergent choice for real
            // integration directions.
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
            prod = 1.0;
            for (int i = 0; i < 3; ++i) prod *= std::sqrt(es.eigenvalues()(i));
        } else {
            prod = std::sqrt(m.determinant());
            if (std::real(prod / st.prod) < 0.0) prod = -prod;
        }
        st.guess = vars;
        st.prod = prod;
        const cplx u = vars.v + A_classical(t1, lp);
        Eigen::VectorXcd j(3);
        j << -kI * u, 0.0, -kI * vars.x1;
        const Eigen::VectorXcd mj = m.fullPivLu().solve(j);
        coeff = c_h * (vars.x1 + mj(0)) *
                std::exp(-kI * u * vars.x1 + 0.5 * j.cwiseProduct(mj).sum()) *
                std::pow(2.0 * M_PI, 1.5) / prod;
        bp.alpha = delta_displacement(vars.v, t1, t, sq, lp) +
                   vars.x1 * F_mode(sq, lp, t1) - vars.x2 * F_mode(sq, lp, t);
        bp.alphabar = delta_displacement_bar(vars.v, t1, t, sq, lp) +
                      vars.x1 * F_mode_bar(sq, lp, t1) -
                      vars.x2 * F_mode_bar(sq, lp, t);
    }
    st.valid = true;
    const cplx s = action_qo(vars, v_f, lp, sq, kind);
    bp.amp = coeff * std::exp(-kI * s + 0.5 * std::norm(bp.alpha));
    bp.e1 = E_classical(t1, lp);
    bp.fb1 = f_mode_bar(sq, lp, t1);
    return bp;
}

// Composite ordered GK15 quadrature of the boundary integrand along a
// polyline in the complex t1 plane; panels shrink until the embedded G7
// estimate agrees.
Eigen::VectorXcd integrate_boundary(const std::vector<cplx>& pts, double v_f,
                                    const LaserParams& lp, const SqueezeParams& sq,
                                    SqueezeKind kind, int cutoff, double& reach) {
    double xg[15], wk[15], wg[15];
    gk15_ordered(xg, wk, wg);
    Eigen::VectorXcd col0, col1;
    for (int attempt = 0;; ++attempt) {
        const double h_target = 2.0 / (1 << attempt);
        PathState st;
        Eigen::VectorXcd kron = Eigen::VectorXcd::Zero(cutoff + 1);
        Eigen::VectorXcd gauss = Eigen::VectorXcd::Zero(cutoff + 1);
        // (|alpha|, node weight) pairs; only nodes carrying non-negligible
        // amplitude should widen the Wigner reach of the assembled state.
        std::vector<std::pair<double, double>> alphas;
        for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
            const cplx a = pts[seg], b = pts[seg + 1];
            const double len = std::abs(b - a);
            if (len == 0.0) continue;
            const int np = std::max(1, static_cast<int>(std::ceil(len / h_target)));
            for (int p = 0; p < np; ++p) {
                const cplx pa = a + (b - a) * (static_cast<double>(p) / np);
                const cplx pb = a + (b - a) * (static_cast<double>(p + 1) / np);
                const cplx mid = 0.5 * (pa + pb);
                const cplx half = 0.5 * (pb - pa);
                for (int i = 0; i < 15; ++i) {
                    const BoundaryPoint bp =
                        boundary_point(mid + half * xg[i], v_f, lp, sq, kind, st);
                    alphas.emplace_back(
                        std::abs(bp.alpha),
                        std::abs(bp.amp) * (std::abs(bp.e1) + std::abs(bp.fb1)));
                    bargmann_columns(bp.alpha, bp.alphabar, cutoff, col0, col1);
                    const Eigen::VectorXcd val =
                        (half * bp.amp) * (bp.e1 * col0 + kI * bp.fb1 * col1);
                    kron += wk[i] * val;
                    gauss += wg[i] * val;
                }
            }
        }
        const double err = (kron - gauss).norm();
        const double scale = std::max(kron.norm(), 1e-300);
        if (err <= 1e-8 * scale || attempt >= 3) {
            if (err > 1e-6 * scale)
                throw ComputeError("assemble_phi_d: boundary quadrature did not converge");
            double wmax = 0.0;
            for (const auto& [r, w] : alphas) wmax = std::max(wmax, w);
            for (const auto& [r, w] : alphas)
                if (w > 1e-7 * wmax) reach = std::max(reach, r);
            return kron;
        }
    }
}

PhiD assemble_raw(double v_f, const LaserParams& lp, const SqueezeParams& sq,
                  SqueezeKind kind, int cutoff) {
    const std::vector<SaddleSolution> sols = solve_saddles(v_f, lp, sq, kind);
    const double t = lp.t_meas();
    // The ionization-time window is finite, so the integral is deformed onto
    // steepest-descent pieces plus two boundary contours that run up the
    // "valley" lines above the first and last field zeros (where the
    // integrand decays superexponentially). Saddles between the valleys enter
    // through the stationary-phase sum; a saddle closer to a window edge than
    // the adjacent field zero is inside the corresponding boundary contour
    // and is integrated there exactly.
    const double valley_lo = 0.5 * M_PI / lp.omega;
    const double valley_hi = t - valley_lo;
    PhiD out;
    out.raw.amplitudes = Eigen::VectorXcd::Zero(cutoff + 1);
    Eigen::VectorXcd col0, col1;
    for (const SaddleSolution& s : sols) {
        if (std::real(s.vars.t1) <= valley_lo || std::real(s.vars.t1) >= valley_hi)
            continue;
        const cplx alpha = s.alpha_total;
        if (std::norm(alpha) + 8.0 * std::abs(alpha) + 16.0 > cutoff)
            throw TruncationError("assemble_phi_d: |alpha| too large for cutoff");
        out.reach = std::max(out.reach, std::abs(alpha));
        const cplx vs = (kind == SqueezeKind::phase) ? cplx(v_f) : s.vars.v;
        cplx alphabar = delta_displacement_bar(vs, s.vars.t1, t, sq, lp) +
                        s.vars.x1 * F_mode_bar(sq, lp, s.vars.t1);
        if (kind == SqueezeKind::amplitude)
            alphabar -= s.vars.x2 * F_mode_bar(sq, lp, t);
        // e^{-iS} carries the Bargmann factor e^{-alpha alphabar / 2}; the
        // columns supply e^{-|alpha|^2 / 2} instead, so the coefficient keeps
        // the (generally complex) ratio explicit.
        const cplx amp =
            s.prefactor * std::exp(-kI * s.action + 0.5 * std::norm(alpha));
        const cplx c0 = amp * E_classical(s.vars.t1, lp);
        const cplx c1 = amp * kI * f_mode_bar(sq, lp, s.vars.t1);
        bargmann_columns(alpha, alphabar, cutoff, col0, col1);
        out.raw.amplitudes += c0 * col0;
        out.raw.amplitudes += c1 * col1;
    }
    const double y0 =
        std::asinh(lp.omega * std::sqrt(v_f * v_f + 2.0 * lp.Ip) / lp.E0) / lp.omega;
    const double y_top = y0 + 25.0;
    const std::vector<cplx> path_lo = {cplx(0.0), cplx(0.0, y0),
                                       cplx(valley_lo, y0), cplx(valley_lo, y_top)};
    // The high-side path is traversed from the real endpoint upward (so the
    // Newton/branch threading starts on the real axis) and subtracted.
    const std::vector<cplx> path_hi = {cplx(t), cplx(t, y0), cplx(valley_hi, y0),
                                       cplx(valley_hi, y_top)};
    out.raw.amplitudes +=
        integrate_boundary(path_lo, v_f, lp, sq, kind, cutoff, out.reach);
    out.raw.amplitudes -=
        integrate_boundary(path_hi, v_f, lp, sq, kind, cutoff, out.reach);
    if (out.reach * out.reach + 8.0 * out.reach + 16.0 > cutoff)
        throw TruncationError("assemble_phi_d: |alpha| too large for cutoff");
    out.weight = out.raw.norm2();
    return out;
}

} // namespace

void parallel_map(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mtx;
    for (int w = 0; w < std::min(threads, n); ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

double ionization_purity(double t1, const SqueezeParams& sq, const LaserParams& lp,
                         int gh_order) {
    static thread_local std::vector<double> nodes, weights;
    static thread_local int cached_order = 0;
    if (cached_order != gh_order) {
        gauss_hermite(gh_order, nodes, weights);
        cached_order = gh_order;
    }
    const double a = 0.8 * lp.Ip;
    const double q = std::norm(F_mode(sq, lp, t1)) / a;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) den += weights[i] * nodes[i] * nodes[i];
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = 0; j < nodes.size(); ++j) {
            const double d = nodes[i] - nodes[j];
            num += weights[i] * weights[j] * nodes[i] * nodes[i] * nodes[j] * nodes[j] *
                   std::exp(-q * d * d);
        }
    }
    return num / (den * den);
}

FockVector assemble_phi_d(double v_f, const LaserParams& lp, const SqueezeParams& sq,
                          SqueezeKind kind, int cutoff) {
    PhiD phi = assemble_raw(v_f, lp, sq, kind, cutoff);
    phi.raw.normalize();
    return phi.raw;
}

ScanTable negativity_scan(const std::vector<double>& v_grid, const LaserParams& lp,
                          const SqueezeParams& sq, int cutoff, int threads,
                          double wigner_step) {
    const double vmax = 2.0 * std::sqrt(lp.ponderomotive());
    for (const double v : v_grid)
        if (std::abs(v) >= vmax)
            throw ComputeError("negativity_scan: v_f outside (-sqrt(4Up), sqrt(4Up))");
    ScanTable tab;
    tab.row_axis = "v_f_au";
    tab.col_axis = "N";
    tab.rows = v_grid;
    tab.cols = {0.0};
    tab.cells.resize(static_cast<long>(v_grid.size()), 1);
    stamp_metadata(tab, lp, sq, cutoff);
    const SqueezeKind kind = kind_from(sq);
    parallel_map(static_cast<int>(v_grid.size()), threads, [&](int i) {
        try {
            PhiD phi = assemble_raw(v_grid[i], lp, sq, kind, cutoff);
            phi.raw.normalize();
            tab.cells(i, 0) =
                negativity_of_state(phi.raw, std::sqrt(2.0) * phi.reach, wigner_step);
        } catch (const std::exception& ex) {
            throw ComputeError("negativity_scan at v_f=" + fmt(v_grid[i]) + ": " +
                               ex.what());
        }
    });
    return tab;
}

DensityOperator postselected_density(double v_lim, int n_samples, const LaserParams& lp,
                                     const SqueezeParams& sq, int cutoff) {
    if (!(v_lim < 2.0 * std::sqrt(lp.ponderomotive())))
        throw ComputeError("postselected_density: v_lim must be < sqrt(4 Up)");
    if (n_samples < 1)
        throw ComputeError("postselected_density: n_samples must be >= 1");
    const SqueezeKind kind = kind_from(sq);
    const double h = 2.0 * v_lim / n_samples;
    std::vector<double> weights(n_samples);
    std::vector<FockVector> states(n_samples);
    for (int j = 0; j < n_samples; ++j) {
        const double v = -v_lim + (j + 0.5) * h;
        PhiD phi = assemble_raw(v, lp, sq, kind, cutoff);
        weights[j] = phi.weight;
        phi.raw.normalize();
        states[j] = std::move(phi.raw);
    }
    return density_from_ensemble(weights, states);
}

ScanTable entropy_scan(const std::vector<double>& eps_grid,
                       const std::vector<int>& ncyc_grid, const LaserParams& lp,
                       int cutoff, int threads) {
    if (eps_grid.empty() || ncyc_grid.empty())
        throw ComputeError("entropy_scan: empty grid");
    ScanTable tab;
    tab.row_axis = "epsilon_au";
    tab.col_axis = "n_cyc";
    tab.rows = eps_grid;
    tab.cols.assign(ncyc_grid.begin(), ncyc_grid.end());
    tab.cells.resize(static_cast<long>(eps_grid.size()),
                     static_cast<long>(ncyc_grid.size()));
    stamp_metadata(tab, lp, SqueezeParams{}, cutoff);
    tab.metadata["v_lim_au"] = "sqrt(2 Up)";
    tab.metadata["v_samples"] = "96";
    const int nr = static_cast<int>(eps_grid.size());
    const int nc = static_cast<int>(ncyc_grid.size());
    parallel_map(nr * nc, threads, [&](int cell) {
        const int i = cell / nc;
        const int j = cell % nc;
        try {
            LaserParams lp2 = lp;
            lp2.n_cyc = ncyc_grid[j];
            const SqueezeParams sq2 = squeeze_from_epsilon(eps_grid[i], 0.0, lp2);
            const double v_lim = std::sqrt(2.0 * lp2.ponderomotive());
            const DensityOperator rho =
                postselected_density(v_lim, 96, lp2, sq2, cutoff);
            tab.cells(i, j) = linear_entropy(rho);
        } catch (const std::exception& ex) {
            throw ComputeError("entropy_scan at epsilon=" + fmt(eps_grid[i]) +
                               ", n_cyc=" + std::to_string(ncyc_grid[j]) + ": " +
                               ex.what());
        }
    });
    return tab;
}

} // namespace sqdati
