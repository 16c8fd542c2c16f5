#pragma once

#include "qlm/field_state.hpp"

namespace qlm {

// One quadrature sample per mode; the field the electron sees parametrically.
struct ParametricField {
    std::vector<ModeSpec> modes;
    std::vector<double> q_values;
    bool include_sine_term = false;

    void validate() const;
};

// Log-derivative of the interaction-picture initial coherent state,
// G0^-1 dG0/dq = -(q - sqrt(2N)).
double local_substitution(const ModeSpec& mode, double q);

// Parametric vector potential summed over modes. Strong-field form is real:
// sum_j beta_j q_j cos(omega_j t - theta_j - kappa_dot_r_j). The full form
// adds the imaginary local-substitution sine term.
cplx vector_potential(const ParametricField& pf, double t);

enum class PictureMap { to_interaction, to_schroedinger };

// Per-mode number-phase rotation between the Schroedinger picture and the
// phase-independent interaction picture. Unitary; composes additively in t.
FieldStateGrid interaction_picture_map(const FieldStateGrid& state, double t,
                                       PictureMap direction);

// Sum of cosines with closed-form time integrals; the strong-field A(t) for
// one quadrature sample, as needed by the analytic free-electron propagator.
struct CosSum {
    struct Term {
        double amp;
        double omega;
        double phase0; // amp * cos(omega*t + phase0)
    };
    std::vector<Term> terms;

    double value(double t) const;
    double integral(double t) const;    // int_0^t A dtau
    double integral_sq(double t) const; // int_0^t A^2 dtau

    static CosSum from_parametric(const ParametricField& pf);
};

} // namespace qlm
