#include "sqdati/qoptics.hpp"

#include "sqdati/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace sqdati {

namespace {

// Coherent column <m|D(beta)|0> built multiplicatively to avoid overflow in
// beta^m / sqrt(m!).
void coherent_column(cplx beta, Eigen::VectorXcd& col) {
    const int dim = static_cast<int>(col.size());
    col(0) = std::exp(-0.5 * std::norm(beta));
    for (int m = 1; m < dim; ++m) col(m) = col(m - 1) * beta / std::sqrt(double(m));
}

// out = D(beta) psi without any truncation checks. Columns of D(beta) are
// generated by the bounded recurrence
//   <m|D|k+1> = (sqrt(m) <m-1|D|k> - conj(beta) <m|D|k>) / sqrt(k+1).
void displace_into(cplx beta, const Eigen::VectorXcd& psi, int support,
                   Eigen::VectorXcd& out) {
    const int dim = static_cast<int>(psi.size());
    // D(beta) psi carries < e^-18 of its mass above the number shell
    // (|beta| + sqrt(support+1) + 6)^2; running the recurrence over the full
    // vector would only amplify rounding garbage in those empty top entries.
    const double shell = std::abs(beta) + std::sqrt(double(support) + 1.0) + 6.0;
    const int dim_eff = std::min(dim, static_cast<int>(shell * shell) + 1);
    Eigen::VectorXcd col(dim_eff), next(dim_eff);
    coherent_column(beta, col);
    out = Eigen::VectorXcd::Zero(dim);
    out.head(dim_eff) = psi(0) * col;
    const cplx bc = std::conj(beta);
    for (int k = 0; k + 1 <= support; ++k) {
        const double inv = 1.0 / std::sqrt(double(k + 1));
        next(0) = -bc * col(0) * inv;
        for (int m = 1; m < dim_eff; ++m)
            next(m) = (std::sqrt(double(m)) * col(m - 1) - bc * col(m)) * inv;
        col.swap(next);
        if (psi(k + 1) != 0.0) out.head(dim_eff) += psi(k + 1) * col;
    }
}

double tail_mass_top_decile(const Eigen::VectorXcd& v) {
    const int dim = static_cast<int>(v.size());
    const int start = dim - std::max(1, dim / 10);
    return v.tail(dim - start).squaredNorm();
}

// A state confined below Fock level N carries no Wigner weight beyond the
// classical turning radius sqrt(N+1): three Gaussian widths past it the true
// value is < 2e-8 of the peak, so such points are reported as exactly 0.
// This keeps far grid boundaries exactly quiet and skips most of the work on
// the padded grids used for negativity integrals.
bool beyond_turning_radius(int support, cplx beta) {
    const double r = std::sqrt(double(support) + 1.0) + 3.0;
    return std::norm(beta) > r * r;
}

// Full displacement matrix <n'|D(w)|n> for n', n <= N, built one diagonal at
// a time from the generalized-Laguerre degree recurrence (stable, unlike
// propagating displaced columns through a long chain recurrence) with
// log-space prefactors so huge Laguerre values and tiny e^{-|w|^2/2} factors
// never over- or underflow on their own:
//   <n+k|D(w)|n> = sqrt(n!/(n+k)!) w^k e^{-|w|^2/2} L_n^{(k)}(|w|^2)
//   <n|D(w)|n+k> = sqrt(n!/(n+k)!) (-conj w)^k e^{-|w|^2/2} L_n^{(k)}(|w|^2).
void displacement_matrix(cplx w, int N, Eigen::MatrixXcd& d) {
    d.resize(N + 1, N + 1);
    const double x = std::norm(w);
    if (x == 0.0) {
        d.setIdentity();
        return;
    }
    const double lw = 0.5 * std::log(x);
    const double aw = std::arg(w);
    thread_local std::vector<double> lg, lag;
    lg.resize(N + 1);
    lag.resize(N + 1);
    for (int n = 0; n <= N; ++n) lg[n] = std::lgamma(n + 1.0);
    for (int k = 0; k <= N; ++k) {
        for (int n = 0; n <= N - k; ++n)
            lag[n] = (n == 0)   ? 1.0
                     : (n == 1) ? 1.0 + k - x
                                : ((2 * n - 1 + k - x) * lag[n - 1] -
                                   (n - 1 + k) * lag[n - 2]) /
                                      n;
        for (int n = 0; n <= N - k; ++n) {
            const double logmag = -0.5 * x + 0.5 * (lg[n] - lg[n + k]) + k * lw;
            d(n + k, n) = std::exp(cplx(logmag, k * aw)) * lag[n];
            d(n, n + k) = std::exp(cplx(logmag, k * (M_PI - aw))) * lag[n];
        }
    }
}

// <psi|D(2z) P|psi> evaluated from the displacement matrix over the state's
// Fock support; W(x,p) is this over pi.
double parity_expectation(const Eigen::VectorXcd& amps, int support, cplx z) {
    thread_local Eigen::MatrixXcd d;
    displacement_matrix(2.0 * z, support, d);
    cplx s = 0.0;
    for (int n = 0; n <= support; ++n) {
        cplx q = 0.0;
        for (int m = 0; m <= support; ++m) q += std::conj(amps(m)) * d(m, n);
        s += ((n % 2) ? -q : q) * amps(n);
    }
    return s.real();
}

// tr(rho D(2z) P) for a density operator confined below Fock level `support`.
double parity_expectation(const Eigen::MatrixXcd& rho, int support, cplx z) {
    thread_local Eigen::MatrixXcd d;
    displacement_matrix(2.0 * z, support, d);
    cplx s = 0.0;
    for (int n = 0; n <= support; ++n) {
        cplx q = 0.0;
        for (int m = 0; m <= support; ++m) q += rho(n, m) * d(m, n);
        s += (n % 2) ? -q : q;
    }
    return s.real();
}

// Fock level below which all but 1e-12 of tr(rho) lives.
int density_support(const Eigen::MatrixXcd& rho) {
    const int dim = static_cast<int>(rho.rows());
    double tail = 0.0;
    for (int n = dim - 1; n >= 1; --n) {
        tail += std::abs(rho(n, n).real());
        if (tail > 1e-12) return std::min(n + 1, dim - 1);
    }
    return 0;
}

} // namespace

void FockVector::normalize() {
    const double n = amplitudes.norm();
    if (n > 0.0) amplitudes /= n;
}

int FockVector::effective_support(double tol) const {
    const double total = amplitudes.squaredNorm();
    double tail = 0.0;
    for (int n = cutoff(); n >= 1; --n) {
        tail += std::norm(amplitudes(n));
        if (tail > tol * total) return std::min(n + 1, cutoff());
    }
    return 0;
}

int PhaseSpaceGrid::nx() const {
    return static_cast<int>(std::lround((x_max - x_min) / step)) + 1;
}

int PhaseSpaceGrid::np() const {
    return static_cast<int>(std::lround((p_max - p_min) / step)) + 1;
}

namespace {

double trapezoid(const Eigen::MatrixXd& v, double step, bool absolute) {
    const auto f = [&](int i, int j) {
        const double x = absolute ? std::abs(v(i, j)) : v(i, j);
        double w = 1.0;
        if (i == 0 || i == v.rows() - 1) w *= 0.5;
        if (j == 0 || j == v.cols() - 1) w *= 0.5;
        return w * x;
    };
    double s = 0.0;
    for (int i = 0; i < v.rows(); ++i)
        for (int j = 0; j < v.cols(); ++j) s += f(i, j);
    return s * step * step;
}

} // namespace

double WignerMap::integral() const { return trapezoid(values, grid.step, false); }
double WignerMap::abs_integral() const { return trapezoid(values, grid.step, true); }
double WignerMap::max_abs() const { return values.cwiseAbs().maxCoeff(); }

double WignerMap::boundary_max_abs() const {
    double m = 0.0;
    const int nr = static_cast<int>(values.rows());
    const int nc = static_cast<int>(values.cols());
    for (int j = 0; j < nc; ++j)
        m = std::max({m, std::abs(values(0, j)), std::abs(values(nr - 1, j))});
    for (int i = 0; i < nr; ++i)
        m = std::max({m, std::abs(values(i, 0)), std::abs(values(i, nc - 1))});
    return m;
}

cplx coherent_overlap(cplx alpha, cplx beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                    std::conj(alpha) * beta);
}

FockVector displaced_fock(cplx beta, int n, int cutoff) {
    if (n > cutoff) throw DimensionMismatch("displaced_fock: n exceeds cutoff");
    Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(cutoff + 1);
    basis(n) = 1.0;
    FockVector out;
    displace_into(beta, basis, n, out.amplitudes);
    if (tail_mass_top_decile(out.amplitudes) > 1e-8)
        throw TruncationError("displaced_fock: tail mass exceeds 1e-8");
    out.normalize();
    return out;
}

FockVector apply_displacement(cplx beta, const FockVector& psi) {
    FockVector out;
    displace_into(beta, psi.amplitudes, psi.effective_support(), out.amplitudes);
    return out;
}

FockVector apply_squeeze(double r, double theta, const FockVector& psi) {
    const int dim = psi.cutoff() + 1;
    const cplx xi = r * std::exp(cplx(0.0, theta));
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n + 2 < dim; ++n) {
        const double c = std::sqrt(double((n + 1) * (n + 2)));
        gen(n, n + 2) = 0.5 * std::conj(xi) * c;  // a^2 term
        gen(n + 2, n) = -0.5 * xi * c;            // a^dag^2 term
    }
    FockVector out;
    out.amplitudes = gen.exp() * psi.amplitudes;
    return out;
}

DensityOperator density_from_ensemble(const std::vector<double>& weights,
                                      const std::vector<FockVector>& states) {
    if (weights.size() != states.size() || states.empty())
        throw DimensionMismatch("density_from_ensemble: weights/states size mismatch");
    const int dim = states.front().cutoff() + 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    double wsum = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
        if (states[i].cutoff() + 1 != dim)
            throw DimensionMismatch("density_from_ensemble: unequal cutoffs");
        rho.noalias() += weights[i] * (states[i].amplitudes * states[i].amplitudes.adjoint());
        wsum += weights[i];
    }
    if (wsum <= 0.0) throw DimensionMismatch("density_from_ensemble: nonpositive weight sum");
    rho /= rho.trace().real();
    return DensityOperator{std::move(rho)};
}

double purity(const DensityOperator& rho) {
    return (rho.matrix * rho.matrix).trace().real();
}

double linear_entropy(const DensityOperator& rho) { return 1.0 - purity(rho); }

double wigner_point(const FockVector& psi, cplx beta) {
    const int support = psi.effective_support();
    if (beyond_turning_radius(support, beta)) return 0.0;
    return parity_expectation(psi.amplitudes, support, beta) / M_PI;
}

double wigner_point(const DensityOperator& rho, cplx beta) {
    const int support = density_support(rho.matrix);
    if (beyond_turning_radius(support, beta)) return 0.0;
    return parity_expectation(rho.matrix, support, beta) / M_PI;
}

namespace {

template <typename Eval>
WignerMap map_from(const PhaseSpaceGrid& grid, Eval&& eval) {
    WignerMap w;
    w.grid = grid;
    const int nx = grid.nx();
    const int np = grid.np();
    w.values.resize(nx, np);
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    for (int i = 0; i < nx; ++i) {
        const double x = grid.x_min + i * grid.step;
        for (int j = 0; j < np; ++j) {
            const double p = grid.p_min + j * grid.step;
            w.values(i, j) = eval(cplx(x * inv_sqrt2, p * inv_sqrt2));
        }
    }
    if (w.boundary_max_abs() > 1e-6 * w.max_abs())
        throw GridTooSmall("wigner_map: boundary values not negligible");
    return w;
}

} // namespace

WignerMap wigner_map(const FockVector& psi, const PhaseSpaceGrid& grid) {
    const int support = psi.effective_support();
    return map_from(grid, [&](cplx beta) {
        if (beyond_turning_radius(support, beta)) return 0.0;
        return parity_expectation(psi.amplitudes, support, beta) / M_PI;
    });
}

WignerMap wigner_map(const DensityOperator& rho, const PhaseSpaceGrid& grid) {
    const int support = density_support(rho.matrix);
    return map_from(grid, [&](cplx beta) {
        if (beyond_turning_radius(support, beta)) return 0.0;
        return parity_expectation(rho.matrix, support, beta) / M_PI;
    });
}

double negativity_volume(const WignerMap& w) { return w.abs_integral() - 1.0; }

namespace {

template <typename State>
double negativity_refined(const State& state, double reach, double step) {
    const double ext = reach + 6.0;
    PhaseSpaceGrid grid{-ext, ext, -ext, ext, step};
    double prev = negativity_volume(wigner_map(state, grid));
    for (int iter = 0; iter < 4; ++iter) {
        step *= 0.5;
        grid.step = step;
        const double cur = negativity_volume(wigner_map(state, grid));
        if (std::abs(cur - prev) < 1e-3 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

double negativity_of_state(const FockVector& psi, double center_reach,
                           double initial_step) {
    return negativity_refined(psi, center_reach, initial_step);
}

double negativity_of_state(const DensityOperator& rho, double center_reach,
                           double initial_step) {
    return negativity_refined(rho, center_reach, initial_step);
}

} // namespace sqdati
