#pragma once

#include "qlm/backaction.hpp"
#include "qlm/gaussian_state.hpp"

namespace qlm {

// One Crank-Nicolson step of the back-action Hamiltonian on the quadrature
// grid (coefficients frozen at the caller's midpoint evaluation). Grid path
// supports 1 or 2 modes up to 256 points per mode.
FieldStateGrid propagate_field_grid(const FieldStateGrid& g,
                                    const BackactionCoefficients& coeffs, double dt);

// Same step against a pre-discretized operator (tabulated grid path).
FieldStateGrid propagate_field_grid(const FieldStateGrid& g, const QOperator& op,
                                    double dt);

// One RK4 step of the coefficient ODEs induced by i dG/dt = H_B G on the
// Gaussian exponent (log_c, b, M). Requires an exactly quadratic H_B;
// rejects coefficients whose polynomial fit residual exceeds fit_tol.
GaussianFieldState propagate_gaussian(const GaussianFieldState& g,
                                      const BackactionCoefficients& coeffs, double dt,
                                      double fit_tol = 1e-8);

// Validity diagnostic for the no-zeros assumption: min|G|/max|G| over the
// region where |g0| > 1e-6. Throws guard_error when the ratio falls below
// threshold.
double zeros_guard(const FieldStateGrid& g, const FieldStateGrid& g0,
                   double threshold = 0.0);

} // namespace qlm
