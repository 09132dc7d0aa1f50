#ifndef SQDATI_QOPTICS_HPP
#define SQDATI_QOPTICS_HPP

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace sqdati {

using cplx = std::complex<double>;

// Truncated single-mode pure state; amplitudes[n] multiplies |n>.
struct FockVector {
    Eigen::VectorXcd amplitudes;

    int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
    double norm2() const { return amplitudes.squaredNorm(); }
    void normalize();
    // Photon-number index above which the remaining tail mass is < tol.
    int effective_support(double tol = 1e-12) const;
};

struct DensityOperator {
    Eigen::MatrixXcd matrix;

    int cutoff() const { return static_cast<int>(matrix.rows()) - 1; }
};

struct PhaseSpaceGrid {
    double x_min = 0.0, x_max = 0.0;
    double p_min = 0.0, p_max = 0.0;
    double step = 0.05;

    int nx() const;
    int np() const;
};

struct WignerMap {
    PhaseSpaceGrid grid;
    Eigen::MatrixXd values; // values(i, j) = W(x_i, p_j)

    double integral() const;    // trapezoid of W
    double abs_integral() const; // trapezoid of |W|
    double max_abs() const;
    double boundary_max_abs() const;
};

// <alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(alpha) beta).
cplx coherent_overlap(cplx alpha, cplx beta);

// Fock amplitudes of D(beta)|n>, closed-form Laguerre matrix elements.
FockVector displaced_fock(cplx beta, int n, int cutoff);

// Applies D(beta) to an arbitrary truncated state column by column.
FockVector apply_displacement(cplx beta, const FockVector& psi);

// Fock-basis squeeze S(xi)|psi>, xi = r e^{i theta}, via matrix exponential of
// (xi* a^2 - xi a^dag^2)/2. Test/diagnostic helper; accurate only while the
// squeezed state fits the cutoff.
FockVector apply_squeeze(double r, double theta, const FockVector& psi);

DensityOperator density_from_ensemble(const std::vector<double>& weights,
                                      const std::vector<FockVector>& states);

double purity(const DensityOperator& rho);
double linear_entropy(const DensityOperator& rho);

WignerMap wigner_map(const FockVector& psi, const PhaseSpaceGrid& grid);
WignerMap wigner_map(const DensityOperator& rho, const PhaseSpaceGrid& grid);

// Pointwise Wigner value at beta = (x + ip)/sqrt(2), Royer parity form.
double wigner_point(const FockVector& psi, cplx beta);
double wigner_point(const DensityOperator& rho, cplx beta);

double negativity_volume(const WignerMap& w);

// Convenience: grid extents +-(center_reach + 6), step halved from
// initial_step until the negativity estimate changes by < 1e-3 relative.
double negativity_of_state(const FockVector& psi, double center_reach,
                           double initial_step = 0.1);
double negativity_of_state(const DensityOperator& rho, double center_reach,
                           double initial_step = 0.1);

} // namespace sqdati

#endif
