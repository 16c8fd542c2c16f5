#pragma once

#include <vector>

namespace qlm {

// One quantized plane-wave mode. Phases follow the signed convention
// phase(t) = omega*t - theta; traveling-wave operators additionally
// subtract kappa_dot_r (0 in the dipole approximation).
struct ModeSpec {
    double omega = 0.0;       // angular frequency, a.u.
    double theta = 0.0;       // initial phase, rad
    double n_photons = 0.0;   // mean initial photon number
    double beta = 0.0;        // coupling amplitude, a.u. of vector potential
    double kappa_dot_r = 0.0; // spatial phase offset, rad

    void validate() const; // throws validation_error

    double amplitude() const;           // A0 = beta*sqrt(2 n_photons)
    double center() const;              // sqrt(2 n_photons), coherent-state center in q
    double period() const;              // 2 pi / omega
    double phase(double t) const;       // omega*t - theta
    double field_phase(double t) const; // omega*t - theta - kappa_dot_r
};

double beta_from_volume(double omega, double volume);
double amplitude_from_photons(double beta, double n_photons);

// sqrt(N_e * W_e / W_field); the classical-field limit flag marks W_field -> inf.
struct BetaScale {
    double value = 0.0;
    bool classical_limit = false;
};
BetaScale beta_scaling_estimate(double n_electrons, double electron_osc_energy,
                                double field_energy);

} // namespace qlm
