#pragma once

#include "qlm/electron.hpp"
#include "qlm/qoperator.hpp"

namespace qlm {

// Quadratic polynomial c0 + c1.q + q.c2.q over the mode quadratures.
struct QuadPoly {
    double c0 = 0.0;
    std::vector<double> c1;
    std::vector<double> c2; // row-major symmetric, empty = zero

    double eval(const std::vector<double>& q) const;
};

// Mean-field Hamiltonian acting on the field state, assembled from per-sample
// electron expectations with the vector potential kept as q-operators, in the
// canonical Hermitian form
//   H_B = V(q) + sum_k sym(L_k(q) i d/dq_k) + sum_jk K_jk d2/dq_j dq_k.
// With P(q) = sum_j beta_j cos(ph_j) q_j the parametric vector potential and
// sigma_j = beta_j sin(ph_j):
//   V   = [<p^2>/2 + <U>](q) - <p>(q) P/c + P^2/(2 c^2)
//   L_k = sigma_k (P/c^2 - <p>(q)/c)
//   K_jk = -sigma_j sigma_k / (2 c^2)
// The polynomial view (energy fitted to degree 2, momentum to degree 1 by
// least squares over the ensemble samples) drives the Gaussian path;
// fit_residual records the rms misfit so callers can reject a non-quadratic
// reduction.
struct BackactionCoefficients {
    std::vector<ModeSpec> modes;
    double t = 0.0; // trig factors evaluated at this time

    QuadPoly energy;   // <p^2>/2 + <U>
    QuadPoly momentum; // <p>, degree <= 1
    double fit_residual = 0.0;

    QuadPoly v;
    std::vector<double> l0; // L_k = l0[k] + sum_j l1[k*n+j] q_j
    std::vector<double> l1;
    std::vector<double> kmat;

    int n_modes() const { return static_cast<int>(modes.size()); }
};

BackactionCoefficients build_backaction(const ElectronEnsemble& ens,
                                        const std::vector<ModeSpec>& modes, double t);

// Tabulates the polynomial coefficients on a quadrature grid for CN steps.
QOperator discretize(const BackactionCoefficients& c,
                     const std::vector<QuadratureGrid>& grids);

// Grid path without the polynomial reduction: the ensemble samples must
// enumerate the tensor grid row-major; electron expectations enter V and L
// pointwise instead of through fits.
QOperator discretize_tabulated(const ElectronEnsemble& ens,
                               const std::vector<ModeSpec>& modes, double t,
                               const std::vector<QuadratureGrid>& grids);

} // namespace qlm
