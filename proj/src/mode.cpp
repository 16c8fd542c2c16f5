#include "qlm/mode.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"

#include <cmath>
#include <limits>

namespace qlm {

void ModeSpec::validate() const {
    if (!(omega > 0.0)) throw validation_error("ModeSpec: omega must be > 0");
    if (!(n_photons >= 0.0)) throw validation_error("ModeSpec: n_photons must be >= 0");
    // beta = 0 is the exact decoupled limit and stays valid end to end
    if (!(beta >= 0.0)) throw validation_error("ModeSpec: beta must be >= 0");
    if (!std::isfinite(theta) || !std::isfinite(kappa_dot_r))
        throw validation_error("ModeSpec: non-finite phase");
}

double ModeSpec::amplitude() const { return amplitude_from_photons(beta, n_photons); }
double ModeSpec::center() const { return std::sqrt(2.0 * n_photons); }
double ModeSpec::period() const { return 2.0 * pi / omega; }
double ModeSpec::phase(double t) const { return omega * t - theta; }
double ModeSpec::field_phase(double t) const { return omega * t - theta - kappa_dot_r; }

double beta_from_volume(double omega, double volume) {
    if (!(omega > 0.0) || !(volume > 0.0))
        throw validation_error("beta_from_volume: omega and volume must be > 0");
    return speed_of_light * std::sqrt(2.0 * pi / (omega * volume));
}

double amplitude_from_photons(double beta, double n_photons) {
    return beta * std::sqrt(2.0 * n_photons);
}

BetaScale beta_scaling_estimate(double n_electrons, double electron_osc_energy,
                                double field_energy) {
    if (!(n_electrons > 0.0) || !(electron_osc_energy > 0.0) || !(field_energy > 0.0))
        throw validation_error("beta_scaling_estimate: inputs must be > 0");
    BetaScale out;
    if (std::isinf(field_energy)) {
        out.value = 0.0;
        out.classical_limit = true;
        return out;
    }
    out.value = std::sqrt(n_electrons * electron_osc_energy / field_energy);
    return out;
}

} // namespace qlm
