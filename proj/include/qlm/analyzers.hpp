#pragma once

#include "qlm/field_state.hpp"
#include "qlm/gaussian_state.hpp"

namespace qlm {

// First and second quadrature moments of one mode; p is the quadrature
// momentum -i d/dq.
struct QuadratureReport {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double var_q = 0.0;
    double var_p = 0.0;
    double uncertainty_product() const { return var_q * var_p; }
};

QuadratureReport quadrature_stats(const FieldStateGrid& g, int mode);
QuadratureReport quadrature_stats(const GaussianFieldState& g, int mode);

// Squeezing criterion Re(a) < -1/2 per mode, plus the same test in the
// principal axes of Re M (the per-coefficient criterion is basis-dependent
// for coupled modes). factor = var_q / (1/2).
struct SqueezeMode {
    cplx raw_a;
    double principal_a = 0.0;
    double factor = 1.0;
    bool squeezed = false;
};
std::vector<SqueezeMode> squeezing_detect(const GaussianFieldState& g);

// Photon-number statistics of one mode with N = (q^2 - d2/dq^2)/2.
// mean_n excludes the 1/2 zero-point; raw_mean keeps it.
struct PhotonStatistics {
    double mean_n = 0.0;
    double raw_mean = 0.0;
    double var_n = 0.0;
    double mandel_q = 0.0; // (var_n - mean_n)/mean_n; 0 for vacuum
};
PhotonStatistics photon_statistics(const FieldStateGrid& g, int mode);
PhotonStatistics photon_statistics(const GaussianFieldState& g, int mode);

// Two-mode correlation diagnostics: the q1 q2 exponent coefficient (read off
// the Gaussian directly or from the log-amplitude Hessian at the grid peak)
// and the purity of the reduced mode-1 state.
struct EntanglementReport {
    double offdiag_d = 0.0;
    double reduced_purity = 1.0;
};
EntanglementReport mode_entanglement(const FieldStateGrid& g);
EntanglementReport mode_entanglement(const GaussianFieldState& g);

// |<G1|G2>| with both sides normalized; the mixed overload evaluates the
// Gaussian on the grid state's quadrature grid.
double fidelity(const FieldStateGrid& a, const FieldStateGrid& b);
double fidelity(const GaussianFieldState& a, const GaussianFieldState& b);
double fidelity(const FieldStateGrid& a, const GaussianFieldState& b);

} // namespace qlm
