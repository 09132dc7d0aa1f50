#include "sqdati/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace sqdati {

namespace {

// K15 nodes on [-1,1] (positive half) and weights; G7 weights on the
// shared odd-indexed nodes.
constexpr double kK15Nodes[8] = {
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

constexpr double kK15Weights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

constexpr double kG7Weights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

} // namespace

std::complex<double> gk15_panel(const std::function<std::complex<double>(double)>& f,
                                double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::complex<double> k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 8; ++i) {
        std::complex<double> v;
        if (i == 0) {
            v = f(c);
            k15 += kK15Weights[0] * v;
            g7 += kG7Weights[0] * v;
        } else {
            const std::complex<double> vp = f(c + h * kK15Nodes[i]);
            const std::complex<double> vm = f(c - h * kK15Nodes[i]);
            v = vp + vm;
            k15 += kK15Weights[i] * v;
            if (i % 2 == 0) g7 += kG7Weights[i / 2] * v;
        }
    }
    k15 *= h;
    g7 *= h;
    err = std::abs(k15 - g7);
    return k15;
}

namespace {

std::complex<double> gk_recurse(const std::function<std::complex<double>(double)>& f,
                                double a, double b, double tol, int depth, int max_depth) {
    double err = 0.0;
    const std::complex<double> whole = gk15_panel(f, a, b, err);
    if (err <= tol || depth >= max_depth) return whole;
    const double c = 0.5 * (a + b);
    return gk_recurse(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           gk_recurse(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b,
                                  double rel_tol, double abs_floor, int max_depth) {
    if (a == b) return 0.0;
    double err = 0.0;
    const std::complex<double> rough = gk15_panel(f, a, b, err);
    const double tol = std::max(abs_floor, rel_tol * std::abs(rough));
    if (err <= tol) return rough;
    return gk_recurse(f, a, b, tol, 0, max_depth);
}

void gk15_ordered(double nodes[15], double wk[15], double wg[15]) {
    for (int i = 0; i < 15; ++i) {
        const int j = std::abs(i - 7); // distance from the central node
        nodes[i] = (i < 7 ? -1.0 : 1.0) * kK15Nodes[j];
        wk[i] = kK15Weights[j];
        wg[i] = (j % 2 == 0) ? kG7Weights[j / 2] : 0.0;
    }
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double off = std::sqrt(0.5 * i);
        j(i, i - 1) = off;
        j(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    nodes.resize(n);
    weights.resize(n);
    const double mu0 = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

} // namespace sqdati
